import numpy as np
import pytest
from scipy import special

from core.errors import ParameterError, RegionError, TruncationError
from core.frac_deriv import (
    FracMethod,
    FracSpec,
    JKind,
    KernelSource,
    TriangleFracSpec,
    delta_halving,
    eigen_errors,
    j_kernel,
    relative_error,
    tail_limit,
    triangle_exp_decay_factor,
    triangle_kernel_table,
    w_delta_square,
    w_delta_triangle,
    weyl_integral,
)
from core.frac_kernel import DerivativeParams

HALF_ORDERS = FracSpec(0.0, 0.0, 0.0, 0.0, 2, 1, 0.5, 0.5)


def decay(x, y):
    return np.exp(-np.asarray(x) - np.asarray(y))


def growth(x, y):
    return np.exp(np.asarray(x) + np.asarray(y))


def test_delta_halving():
    assert delta_halving(0.2, 3) == pytest.approx([0.2, 0.1, 0.05])


def test_relative_error():
    assert relative_error(1.1, 1.0) == pytest.approx(0.1)
    assert relative_error(0.25, 0.0) == 0.25


def test_tail_limit():
    assert tail_limit(0.1) == pytest.approx(400.0)
    assert tail_limit(100.0) == 2.0


@pytest.mark.parametrize("order_x, order_y", [(0.5, 0.5), (1.0, 0.3), (1.7, 2.0)])
def test_weyl_integral_of_exponential(order_x, order_y):
    g = weyl_integral(decay, order_x, order_y)
    assert g(0.3, 0.2) == pytest.approx(np.exp(-0.5), rel=1e-12)


def test_weyl_integral_vectorizes():
    g = weyl_integral(decay, 0.5, 0.5)
    xs = np.array([0.0, 0.5, 1.0])
    np.testing.assert_allclose(g(xs, 0.0), np.exp(-xs), rtol=1e-12)


def test_weyl_integral_orders():
    with pytest.raises(ParameterError):
        weyl_integral(decay, 0.0, 0.5)


def test_j1_constant_polynomial():
    # lambda = 0, nu = -1: the integral of 1 over (-1, xi)
    assert j_kernel(JKind.J1, 0.4, 0, 0.0, 0.0, -1.0) == pytest.approx(1.4, rel=1e-12)


def test_j1_linear_polynomial():
    assert j_kernel(JKind.J1, 0.4, 1, 0.0, 0.0, 0.0) == pytest.approx((0.4 ** 2 - 1) / 2, rel=1e-12)


def test_j2_beyond_the_interval():
    assert j_kernel(JKind.J2, 3.0, 0, 0.0, 0.0, -1.0) == pytest.approx(2.0, rel=1e-12)


def test_j_kernel_domains():
    with pytest.raises(RegionError):
        j_kernel(JKind.J1, 1.5, 1, 0.0, 0.0, 0.5)
    with pytest.raises(RegionError):
        j_kernel(JKind.J2, 0.5, 1, 0.0, 0.0, 0.5)
    with pytest.raises(ParameterError):
        j_kernel(JKind.J1, 0.5, 1, 0.0, 0.0, 1.0)


def test_frac_spec_validation():
    with pytest.raises(ParameterError):
        FracSpec(0.0, 0.0, 0.0, 0.0, 2, 1, 1.0, 0.5)
    with pytest.raises(ParameterError):
        FracSpec(-1.0, 0.0, 0.0, 0.0, 2, 1, 0.5, 0.5)
    with pytest.raises(ParameterError):
        TriangleFracSpec(DerivativeParams(0.2, 0.2, 0.2, 1, 2, 0.4, 0.4), 0.0)


def test_square_eigenfunction_by_kernel():
    errors = eigen_errors(lambda d: w_delta_square(decay, 0.3, 0.2, HALF_ORDERS, d),
                          0.3, 0.2, delta_halving(0.1, 3))
    assert errors[1][1] <= 1e-2
    assert errors[2][1] < errors[1][1] < errors[0][1]


def test_square_eigenfunction_by_weyl():
    value = w_delta_square(decay, 0.3, 0.2, HALF_ORDERS, 0.05, method=FracMethod.WEYL)
    # each Legendre first-derivative factor is off by delta^2 / 10
    assert relative_error(value, np.exp(-0.5)) == pytest.approx(2 * 0.05 ** 2 / 10, rel=0.05)


def test_square_growth_is_truncated():
    with pytest.raises(TruncationError):
        w_delta_square(growth, 0.0, 0.0, HALF_ORDERS, 0.1)


def test_square_delta_must_be_positive():
    with pytest.raises(ParameterError):
        w_delta_square(decay, 0.0, 0.0, HALF_ORDERS, -0.1)


@pytest.mark.slow
def test_triangle_eigenfunction_by_weyl():
    dp = DerivativeParams(0.2, 0.2, 0.2, 1, 2, 0.4, 0.4)
    errors = eigen_errors(lambda d: w_delta_triangle(decay, 0.3, 0.2, TriangleFracSpec(dp, d)),
                          0.3, 0.2, delta_halving(0.05, 3))
    assert errors[0][1] <= 3.5e-2
    assert errors[-1][1] <= 1e-2
    assert errors[2][1] < errors[1][1] < errors[0][1]


HALF_TRIANGLE = DerivativeParams(0.0, 0.0, 0.0, 1, 2, 0.5, 0.5)


def zero(x, y):
    return np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)


def test_triangle_exp_decay_factor():
    assert triangle_exp_decay_factor(HALF_TRIANGLE, 0.0) == 1.0
    assert triangle_exp_decay_factor(HALF_TRIANGLE, 0.05) == pytest.approx(special.hyp1f1(4, 7, -0.05))
    dp = DerivativeParams(0.2, 0.2, 0.2, 1, 2, 0.4, 0.4)
    # first-order bias of about 2.85% at delta = 0.05
    assert 1 - triangle_exp_decay_factor(dp, 0.05) == pytest.approx(0.0285, abs=2e-4)


@pytest.mark.slow
def test_triangle_weyl_is_the_exact_eigenvalue():
    value = w_delta_triangle(decay, 0.3, 0.2, TriangleFracSpec(HALF_TRIANGLE, 0.05))
    assert value == pytest.approx(0.58947, rel=1e-4)
    assert value == pytest.approx(np.exp(-0.5) * triangle_exp_decay_factor(HALF_TRIANGLE, 0.05), rel=1e-8)


def test_triangle_kernel_method_of_zero_is_zero():
    spec = TriangleFracSpec(HALF_TRIANGLE, 0.5)
    assert w_delta_triangle(zero, 0.3, 0.2, spec, n_nodes=8, method=FracMethod.KERNEL) == 0.0


def test_triangle_kernel_method_is_finite_and_reuses_its_table():
    spec = TriangleFracSpec(HALF_TRIANGLE, 0.5)
    value = w_delta_triangle(decay, 0.3, 0.2, spec, n_nodes=8, method=FracMethod.KERNEL)
    hits = triangle_kernel_table.cache_info().hits
    again = w_delta_triangle(decay, 0.1, 0.4, spec, n_nodes=8, method=FracMethod.KERNEL)
    assert triangle_kernel_table.cache_info().hits > hits
    exact = triangle_exp_decay_factor(HALF_TRIANGLE, 0.5)
    assert value == pytest.approx(np.exp(-0.5) * exact, rel=0.1)
    assert again == pytest.approx(value, rel=1e-12)


@pytest.mark.slow
def test_triangle_kernel_method_matches_weyl():
    spec = TriangleFracSpec(HALF_TRIANGLE, 0.05)
    weyl = w_delta_triangle(decay, 0.3, 0.2, spec)
    kernel = w_delta_triangle(decay, 0.3, 0.2, spec, method=FracMethod.KERNEL)
    assert np.isfinite(kernel)
    assert kernel == pytest.approx(weyl, rel=1e-2)


@pytest.mark.slow
def test_triangle_kernel_sources_agree():
    spec = TriangleFracSpec(DerivativeParams(0.2, 0.2, 0.2, 1, 2, 0.5, 0.5), 0.5)
    closed = w_delta_triangle(decay, 0.3, 0.2, spec, n_nodes=6, method=FracMethod.KERNEL)
    oracle = w_delta_triangle(decay, 0.3, 0.2, spec, n_nodes=6, method=FracMethod.KERNEL,
                              source=KernelSource.ORACLE)
    assert oracle == pytest.approx(closed, rel=1e-6)
