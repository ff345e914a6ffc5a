import numpy as np
import pytest

from core.errors import ParameterError
from utils.expression import parse_expression


def test_caret_is_power():
    assert parse_expression("x^2 + 3*y")(2.0, 1.0) == pytest.approx(7.0)


def test_functions_and_constants():
    f = parse_expression("exp(x) + sin(pi*y) - cos(0)")
    assert f(0.0, 0.5) == pytest.approx(1.0)
    assert parse_expression("e")(0.0, 0.0) == pytest.approx(np.e)


def test_unary_minus_and_division():
    assert parse_expression("-(x - y) / 4")(1.0, 3.0) == pytest.approx(0.5)


def test_elementwise_on_arrays():
    f = parse_expression("x*y")
    np.testing.assert_allclose(f(np.array([1.0, 2.0]), np.array([3.0, 4.0])), [3.0, 8.0])


def test_constant_broadcasts_to_grid():
    grid_x, grid_y = np.meshgrid(np.linspace(0, 1, 3), np.linspace(0, 1, 4), indexing="ij")
    values = parse_expression("2.5")(grid_x, grid_y)
    assert values.shape == (3, 4)
    assert np.all(values == 2.5)


@pytest.mark.parametrize("text", [
    "z + 1",
    "__import__('os')",
    "x if y else 0",
    "log(x)",
    "exp(x, y)",
    "x.real",
    "'text'",
    "x +",
    "",
    "   ",
])
def test_rejected(text):
    with pytest.raises(ParameterError):
        parse_expression(text)
