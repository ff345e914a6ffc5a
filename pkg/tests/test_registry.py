import numpy as np
import pytest

from cli.registry import BUILTINS, lookup
from utils.expression import Expression


def test_polynomial_partials():
    poly = lookup("polynomial")
    assert poly.func(1.0, 2.0) == pytest.approx(4 - 4 + 6 - 2 + 1)
    # 6 x^2 y - 4 x + 3
    assert poly.partial(1, 1)(1.0, 2.0) == pytest.approx(11.0)
    assert poly.partial(3, 2)(0.3, 0.7) == pytest.approx(12.0)
    assert poly.partial(4, 0)(0.3, 0.7) == pytest.approx(0.0)


def test_trig_partials_shift_phase():
    trig = lookup("trig")
    assert trig.partial(1, 0)(0.1, 0.2) == pytest.approx(np.cos(0.5))
    assert trig.partial(0, 1)(0.1, 0.2) == pytest.approx(2 * np.cos(0.5))
    assert trig.partial(1, 1)(0.1, 0.2) == pytest.approx(-2 * np.sin(0.5))


def test_exp_decay_is_its_own_fractional_reference():
    decay = BUILTINS["exp-decay"]
    assert decay.fractional(0.3, 0.2) == pytest.approx(np.exp(-0.5))
    assert decay.partial(1, 2)(0.3, 0.2) == pytest.approx(-np.exp(-0.5))


def test_unknown_name_is_parsed_as_expression():
    function = lookup("x^2*y")
    assert isinstance(function.func, Expression)
    assert function.partial is None
    assert function.func(3.0, 2.0) == pytest.approx(18.0)
