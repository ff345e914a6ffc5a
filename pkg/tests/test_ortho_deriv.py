import numpy as np
import pytest

from core.errors import ParameterError, RegionError
from core.ortho_deriv import (
    SquareJacobiSpec,
    TriangleDerivSpec,
    d_delta_square,
    d_delta_triangle,
    delta_convergence,
    is_monotone_refinement,
    jacobi_norm_ratio,
)
from core.triangle_basis import TriangleWeight


def bilinear(x, y):
    return 3 * x * y + x - 2 * y + 5


def quadratic(x, y):
    return x ** 2 + 3 * x * y + y


def test_norm_ratio_legendre():
    assert jacobi_norm_ratio(0, 0.0, 0.0) == pytest.approx(2.0, rel=1e-14)
    assert jacobi_norm_ratio(1, 0.0, 0.0) == pytest.approx(2 / 3, rel=1e-14)


def test_norm_ratio_order_limit():
    with pytest.raises(ParameterError):
        jacobi_norm_ratio(13, 0.0, 0.0)


@pytest.mark.parametrize("delta", [0.5, 0.1, 0.01])
@pytest.mark.parametrize("weights", [(0.0, 0.0, 0.0, 0.0), (0.5, -0.3, 0.2, 0.4)])
def test_square_exact_on_low_degree(delta, weights):
    spec = SquareJacobiSpec(*weights, 1, 1)
    assert d_delta_square(bilinear, 0.3, -0.2, spec, delta) == pytest.approx(3.0, rel=1e-10)


def test_square_zeroth_order_mean():
    # (m, l) = (0, 0) with Legendre weights averages f over the square
    spec = SquareJacobiSpec(0.0, 0.0, 0.0, 0.0, 0, 0)
    assert d_delta_square(bilinear, 0.3, -0.2, spec, 0.4) == pytest.approx(bilinear(0.3, -0.2), rel=1e-13)


def test_square_convergence_on_exponential():
    spec = SquareJacobiSpec(0.0, 0.0, 0.0, 0.0, 2, 1)
    rows = delta_convergence(lambda d: d_delta_square(lambda x, y: np.exp(x + y), 0.0, 0.0, spec, d),
                             [0.2, 0.1, 0.05, 0.025], 1.0)
    assert is_monotone_refinement(rows)
    assert rows[-1][2] < 1e-3


def test_square_convergence_on_trig():
    spec = SquareJacobiSpec(0.0, 0.0, 0.0, 0.0, 1, 1)
    reference = -2 * np.sin(0.5)
    rows = delta_convergence(lambda d: d_delta_square(lambda x, y: np.sin(x + 2 * y), 0.1, 0.2, spec, d),
                             [0.2, 0.1, 0.05], reference)
    assert is_monotone_refinement(rows)


def test_square_rejects_bad_input():
    spec = SquareJacobiSpec(0.0, 0.0, 0.0, 0.0, 1, 1)
    with pytest.raises(ParameterError):
        d_delta_square(bilinear, 0.0, 0.0, spec, 0.0)
    with pytest.raises(ParameterError):
        SquareJacobiSpec(0.0, 0.0, 0.0, 0.0, -1, 1)
    with pytest.raises(ParameterError):
        SquareJacobiSpec(-1.5, 0.0, 0.0, 0.0, 1, 1)


def test_square_non_finite_samples():
    spec = SquareJacobiSpec(0.0, 0.0, 0.0, 0.0, 1, 0)

    def half_plane(x, y):
        return np.where(x > 0, x, np.nan)

    with pytest.raises(RegionError):
        d_delta_square(half_plane, 0.05, 0.0, spec, 0.1)


@pytest.mark.parametrize("weight", [(0.0, 0.0, 0.0), (0.5, 0.3, 0.2)])
@pytest.mark.parametrize("k, expected", [(0, 0.0), (1, 3.0), (2, 2.0)])
def test_triangle_exact_on_quadratics(weight, k, expected):
    spec = TriangleDerivSpec(TriangleWeight(*weight), k, 2, 0.1)
    assert d_delta_triangle(quadratic, 0.2, 0.1, spec) == pytest.approx(expected, abs=1e-10)


def test_triangle_first_order_bias():
    spec = TriangleDerivSpec(TriangleWeight(0.0, 0.0, 0.0), 1, 1, 0.05)
    # U_{1,1} = 1 - 2x - y; the quadratic part of f adds 1.4 delta to 2x + 3y
    assert d_delta_triangle(quadratic, 0.2, 0.1, spec) == pytest.approx(0.7 + 1.4 * 0.05, rel=1e-10)


def test_triangle_mixed_derivative_of_product():
    spec = TriangleDerivSpec(TriangleWeight(0.0, 0.0, 0.0), 1, 2, 0.2)
    assert d_delta_triangle(lambda x, y: x * y, 0.0, 0.0, spec) == pytest.approx(1.0, rel=1e-12)


def test_triangle_convergence_on_exponential():
    weight = TriangleWeight(0.0, 0.0, 0.0)
    rows = delta_convergence(
        lambda d: d_delta_triangle(lambda x, y: np.exp(x + y), 0.0, 0.0, TriangleDerivSpec(weight, 1, 2, d)),
        [0.2, 0.1, 0.05], 1.0)
    assert is_monotone_refinement(rows)


def test_triangle_spec_validation():
    with pytest.raises(ParameterError):
        TriangleDerivSpec(TriangleWeight(0.0, 0.0, 0.0), 3, 2, 0.1)
    with pytest.raises(ParameterError):
        TriangleDerivSpec(TriangleWeight(0.0, 0.0, 0.0), 1, 2, -0.1)


def test_monotone_refinement_detects_stall():
    assert not is_monotone_refinement([(0.2, 1.0, 0.1), (0.1, 1.0, 0.1)])
