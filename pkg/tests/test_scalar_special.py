import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import special

from core.errors import DivergenceError, PoleError
from core.scalar_special import (
    PochhammerArg,
    SeriesValue,
    beta2,
    beta3,
    gamma_ratio,
    hyp2f1,
    hyp2f1_array,
    hyp2f1_connection,
    hyp2f1_connection_array,
    hyp3f2_unit,
    log_gamma,
    log_gamma_ratio,
    log_pochhammer,
    pochhammer,
    termination_order,
)


def test_gamma_ratio_matches_factorials():
    assert gamma_ratio([5], [3]) == pytest.approx(12.0, rel=1e-14)
    assert gamma_ratio([0.5, 0.5], [1.0]) == pytest.approx(math.pi, rel=1e-14)


def test_gamma_ratio_denominator_pole_is_zero():
    assert gamma_ratio([1.5], [-2.0]) == 0.0


def test_gamma_ratio_numerator_pole_raises():
    with pytest.raises(PoleError):
        gamma_ratio([-1.0], [2.0])


def test_gamma_ratio_negative_arguments_keep_sign():
    expected = special.gamma(-0.5) * special.gamma(-1.5) / special.gamma(2.5)
    assert gamma_ratio([-0.5, -1.5], [2.5]) == pytest.approx(expected, rel=1e-13)


def test_log_gamma_sign():
    log, sign = log_gamma(-0.5)
    assert sign == -1.0
    assert math.exp(log) == pytest.approx(abs(special.gamma(-0.5)), rel=1e-14)
    with pytest.raises(PoleError):
        log_gamma(0.0)


def test_beta_functions():
    assert beta2(2, 3) == pytest.approx(1 / 12, rel=1e-14)
    assert beta3(1, 1, 1) == pytest.approx(0.5, rel=1e-14)
    assert beta2(0.3, 0.4) == pytest.approx(special.beta(0.3, 0.4), rel=1e-13)


@pytest.mark.parametrize("a, shift, expected", [
    (0.5, 3, 1.875),
    (3.0, -2, 0.5),
    (-2.0, 3, 0.0),
    (4.0, 0, 1.0),
])
def test_pochhammer_integer_shifts(a, shift, expected):
    assert pochhammer(a, shift) == pytest.approx(expected, abs=1e-15)


def test_pochhammer_real_shift_matches_scipy():
    assert pochhammer(2.5, 0.5) == pytest.approx(special.poch(2.5, 0.5), rel=1e-13)


def test_pochhammer_negative_shift_pole():
    # (1)_{-2} = 1 / (0)_2 has a pole
    with pytest.raises(PoleError):
        pochhammer(1.0, -2)


@pytest.mark.parametrize("base, shift", [(0.3, 4), (-1.5, 3), (2.5, -2), (0.7, 0.25)])
def test_pochhammer_paths_agree(base, shift):
    arg = PochhammerArg(base, shift)
    assert arg.value() == pytest.approx(arg.gamma_path(), rel=1e-12)


def test_log_pochhammer_terminating_parameter():
    log, sign = log_pochhammer(-2.0, [0, 1, 2, 3])
    assert_allclose(np.exp(log) * sign, [1.0, -2.0, 2.0, 0.0], atol=1e-14)


def test_log_pochhammer_negative_index():
    log, sign = log_pochhammer(0.5, [-1, -2])
    # (a)_{-i} = (-1)^i / (1-a)_i
    assert_allclose(np.exp(log) * sign, [-2.0, 1 / (0.5 * 1.5)], rtol=1e-13)


def test_termination_order():
    assert termination_order(0.5, -3.0, -1.0) == 1
    assert termination_order(0.5, 2.0) is None


def test_series_value_combine_weights_errors():
    first = SeriesValue(2.0, 10, 1e-12, True)
    second = SeriesValue(1.0, 5, 1e-10, True)
    combined = SeriesValue.combine([(1.0, first), (-1.0, second)])
    assert combined.value == 1.0
    assert combined.terms_used == 15
    assert combined.err_estimate == pytest.approx(2e-12 + 1e-10)
    assert combined.converged


@pytest.mark.parametrize("a, b, c, z", [
    (0.3, 0.7, 1.9, 0.3),
    (0.3, 0.7, 1.9, 0.8),
    (1.2, -0.4, 2.5, -3.0),
    (0.5, 0.5, 1.5, 0.25),
    (2.0, 1.5, 3.7, 0.95),
])
def test_hyp2f1_matches_scipy(a, b, c, z):
    result = hyp2f1(a, b, c, z)
    assert result.converged
    assert result.value == pytest.approx(special.hyp2f1(a, b, c, z), rel=1e-10)


def test_hyp2f1_gauss_sum_at_one():
    expected = special.gamma(1.5) * special.gamma(0.8) / (special.gamma(1.2) * special.gamma(1.1))
    assert hyp2f1(0.3, 0.4, 1.5, 1.0).value == pytest.approx(expected, rel=1e-13)


def test_hyp2f1_terminating_polynomial_anywhere():
    assert hyp2f1(-2, 1.0, 1.0, 3.0).value == pytest.approx(4.0, rel=1e-14)


def test_hyp2f1_divergence():
    with pytest.raises(DivergenceError):
        hyp2f1(0.3, 0.4, 1.5, 1.2)
    with pytest.raises(DivergenceError):
        hyp2f1(0.8, 0.9, 1.5, 1.0)


def test_hyp2f1_lower_pole():
    with pytest.raises(PoleError):
        hyp2f1(0.3, 0.4, -2.0, 0.2)


def test_hyp3f2_unit_reduces_to_gauss_sum():
    # 3F2(a, b, c; c, e; 1) = 2F1(a, b; e; 1)
    expected = special.gamma(2.5) * special.gamma(1.8) / (special.gamma(2.2) * special.gamma(2.1))
    result = hyp3f2_unit(0.3, 0.4, 1.7, 1.7, 2.5, tol=1e-12)
    assert result.value == pytest.approx(expected, rel=1e-9)


def test_hyp3f2_unit_through_thomae():
    # largest numerator parameter exceeds the excess, so the transformed sum is taken
    expected = special.gamma(3.5) * special.gamma(0.7) / (special.gamma(1.0) * special.gamma(3.2))
    result = hyp3f2_unit(2.5, 0.3, 0.7, 0.7, 3.5, tol=1e-12)
    assert result.value == pytest.approx(expected, rel=1e-9)


def test_hyp3f2_unit_needs_positive_excess():
    with pytest.raises(DivergenceError):
        hyp3f2_unit(1.0, 1.0, 1.0, 1.5, 1.5)


def test_pochhammer_small_values():
    assert pochhammer(3, 4) == pytest.approx(360.0)
    assert pochhammer(-4.2, 0) == pytest.approx(1.0)
    assert pochhammer(2, -1) == pytest.approx(1.0)


@pytest.mark.parametrize("a", [0.3, -1.7, 2.25])
def test_pochhammer_shift_identities(a):
    for i in range(4):
        assert pochhammer(1 - a, i) * pochhammer(a, -i) == pytest.approx((-1.0) ** i, rel=1e-12)
        for j in range(4):
            assert pochhammer(a, i + j) == pytest.approx(pochhammer(a, i) * pochhammer(a + i, j), rel=1e-12)


def test_beta3_factorizations():
    rng = np.random.default_rng(11)
    for x, y, z in rng.uniform(0.2, 3.0, size=(5, 3)):
        value = beta3(x, y, z)
        assert value == pytest.approx(beta2(x, y + z) * beta2(y, z), rel=1e-12)
        assert value == pytest.approx(beta2(y, x + z) * beta2(x, z), rel=1e-12)
        assert value == pytest.approx(beta2(z, x + y) * beta2(x, y), rel=1e-12)


def test_hyp2f1_array_matches_scipy():
    z = np.array([-2.5, -0.7, -0.2, 0.0, 0.3, 0.6, 0.9, 0.99])
    assert_allclose(hyp2f1_array(0.7, 0.4, 1.3, z), special.hyp2f1(0.7, 0.4, 1.3, z), rtol=1e-10)


def test_hyp2f1_array_terminating():
    z = np.array([-0.5, 0.25, 0.75])
    # 2F1(-2, b; c; z) = 1 - 2 b z / c + b (b + 1) z^2 / (c (c + 1))
    b, c = 0.4, 1.3
    expected = 1 - 2 * b * z / c + b * (b + 1) * z ** 2 / (c * (c + 1))
    assert_allclose(hyp2f1_array(-2.0, b, c, z), expected, rtol=1e-13)


def test_hyp2f1_array_divergence():
    with pytest.raises(DivergenceError):
        hyp2f1_array(0.7, 0.4, 1.3, np.array([0.2, 1.0]))


def test_hyp2f1_connection_with_terminating_upper_parameter():
    # the second connection term vanishes through 1 / Gamma(a)
    value = hyp2f1_connection(-8.0, 2.0, 1.5, 0.77).value
    assert value == pytest.approx(special.hyp2f1(-8.0, 2.0, 1.5, 0.77), rel=1e-10)


def test_hyp2f1_connection_large_negative_excess():
    # Gamma(a+b-c) (1 - z)^{c-a-b} is near the top of the float range and goes through log space
    assert np.isfinite(hyp2f1_connection(300.5, -0.5, 1.5, 0.9).value)


def test_hyp2f1_connection_overflow_is_a_divergence_error():
    with pytest.raises(DivergenceError):
        hyp2f1_connection(300.5, -0.5, 1.5, 0.95)
    with pytest.raises(DivergenceError):
        hyp2f1_connection_array(300.5, -0.5, 1.5, np.array([0.6, 0.95]))


def test_series_value_rejects_non_finite_values():
    with pytest.raises(DivergenceError):
        SeriesValue(math.inf, 1, 0.0, True)
    with pytest.raises(DivergenceError):
        SeriesValue.combine([(1e300, SeriesValue.exact(1e300))])


def test_log_gamma_ratio_matches_gamma_ratio():
    log, sign = log_gamma_ratio([-0.5, 300.5], [2.5, 298.5])
    assert sign * math.exp(log) == pytest.approx(gamma_ratio([-0.5, 300.5], [2.5, 298.5]), rel=1e-12)
    assert log_gamma_ratio([1.5], [-2.0])[1] == 0.0
