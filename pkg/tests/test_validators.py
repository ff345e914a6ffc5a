import pytest

from core.errors import ParameterError
from utils.validators import Validator


def test_parse_assignments_keeps_decimal_text():
    valid, invalid = Validator.parse_assignments(["a=1", "x=0.2", "b", "c=one"])
    assert valid == {"a": "1", "x": "0.2"}
    assert invalid == ["b", "c=one"]


def test_parse_assignments_rejects_non_finite():
    valid, invalid = Validator.parse_assignments(["x=nan", "y=inf", " z = -3e-2 "])
    assert valid == {"z": "-3e-2"}
    assert invalid == ["x=nan", "y=inf"]


def test_parse_config_lines():
    lines = ["# comment\n", "\n", "domain = square\n", "f=3*x*y\n", "no separator\n", "=1\n"]
    values, malformed = Validator.parse_config_lines(lines)
    assert values == {"domain": "square", "f": "3*x*y"}
    assert malformed == ["no separator", "=1"]


@pytest.mark.parametrize("value, ok", [(0.0, True), (-0.5, True), (-1.0, False), (float("nan"), False)])
def test_validate_exponent(value, ok):
    assert Validator.validate_exponent(value) is ok


def test_require_exponents_names_offenders():
    with pytest.raises(ParameterError, match="beta=-2"):
        Validator.require_exponents(alpha=0.5, beta=-2.0)
    Validator.require_exponents(alpha=0.5, beta=0.0)


def test_require_index():
    Validator.require_index(0, 0)
    Validator.require_index(2, 2)
    with pytest.raises(ParameterError):
        Validator.require_index(3, 2)
    with pytest.raises(ParameterError):
        Validator.require_index(-1, 2)


def test_validate_delta():
    assert Validator.validate_delta(1e-3)
    assert not Validator.validate_delta(0.0)
    assert not Validator.validate_delta(float("inf"))
