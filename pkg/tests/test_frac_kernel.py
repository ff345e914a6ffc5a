from dataclasses import astuple

import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.errors import DegeneracyError, ParameterError, RegionError
from core.frac_kernel import (
    Boundary,
    DerivativeParams,
    KernelParams,
    boundary_gap,
    derivative_kernel_oracle,
    kernel_at,
    kernel_closed_form,
    kernel_closed_form_array,
    kernel_fq_form,
    kernel_i5_i6_split,
    kernel_series,
    kernel_symmetric_form,
    one_sided_limit,
    pde_residual,
    pde_solutions,
)
from core.quad_oracle import integrate_kernel_region, integrate_kernel_split
from core.regions import RegionTag

UNIT = KernelParams(1.0, 1.0, 1.0, 1.0, 0.0)
# satisfies the region-V integral conditions with margin
FIVE = KernelParams(0.5, 0.9, 0.4, 0.6, 0.3)
SMOOTH = KernelParams(1.3, 1.6, 2.3, 2.7, 0.4)


@pytest.mark.parametrize("region, s, t, area", [
    (RegionTag.I, 0.3, 0.4, 0.12),
    (RegionTag.II, 1.5, 2.0, 0.5),
    (RegionTag.III, 0.5, 2.0, 0.375),
    (RegionTag.IV, 2.0, 0.5, 0.375),
])
def test_unit_parameters_give_areas(region, s, t, area):
    assert kernel_closed_form(region, UNIT, s, t) == pytest.approx(area, rel=1e-12)


def test_kernel_at_classifies():
    region, value = kernel_at(UNIT, 0.3, 0.4)
    assert region is RegionTag.I
    assert value == pytest.approx(0.12)
    assert kernel_at(UNIT, -1.0, 0.4) == (RegionTag.OUTSIDE, 0.0)


def test_wrong_region_raises():
    with pytest.raises(RegionError):
        kernel_closed_form(RegionTag.II, UNIT, 0.3, 0.4)


def test_strict_conditions():
    p = KernelParams(0.7, 1.3, -0.5, 1.5, 0.4)
    with pytest.raises(ParameterError):
        kernel_closed_form(RegionTag.I, p, 0.3, 0.4, strict=True)
    # without strict the closed form acts as a continuation in c
    assert np.isfinite(kernel_closed_form(RegionTag.I, p, 0.3, 0.4))


@pytest.mark.parametrize("region, s, t", [
    (RegionTag.I, 0.3, 0.4),
    (RegionTag.II, 1.5, 2.0),
    (RegionTag.III, 0.4, 1.8),
    (RegionTag.IV, 1.8, 0.4),
])
def test_closed_forms_match_quadrature(region, s, t):
    p = KernelParams(0.7, 1.3, 0.8, 1.5, 0.4)
    closed = kernel_closed_form(region, p, s, t, strict=True)
    assert closed == pytest.approx(integrate_kernel_region(region, p, s, t), rel=1e-6)


@pytest.mark.slow
def test_region_five_matches_quadrature():
    closed = kernel_closed_form(RegionTag.V, FIVE, 0.6, 0.7, strict=True)
    assert closed == pytest.approx(integrate_kernel_region(RegionTag.V, FIVE, 0.6, 0.7), rel=1e-6)


@pytest.mark.slow
def test_split_matches_quadrature():
    i5, i6 = kernel_i5_i6_split(FIVE, 0.6, 0.7)
    lower, upper = integrate_kernel_split(FIVE, 0.6, 0.7)
    assert i5 == pytest.approx(lower, rel=1e-6)
    assert i6 == pytest.approx(upper, rel=1e-6)


def test_split_sums_to_closed_form():
    i5, i6 = kernel_i5_i6_split(FIVE, 0.6, 0.7)
    assert i5 + i6 == pytest.approx(kernel_closed_form(RegionTag.V, FIVE, 0.6, 0.7), rel=1e-10)


def test_split_needs_nonzero_d():
    with pytest.raises(DegeneracyError):
        kernel_i5_i6_split(KernelParams(0.5, 0.9, 0.4, 0.0, 0.3), 0.6, 0.7)


def test_split_outside_region_five():
    with pytest.raises(RegionError):
        kernel_i5_i6_split(FIVE, 0.3, 0.4)


def test_swap_symmetry():
    for p, (s, t) in (
        (FIVE, (0.6, 0.7)),
        (KernelParams(0.3, 1.2, 0.7, 0.25, 0.55), (0.8, 0.45)),
        (KernelParams(0.65, 0.6, 0.35, 0.5, 0.15), (0.4, 0.85)),
    ):
        value = kernel_closed_form(RegionTag.V, p, s, t, tol=1e-13)
        mirrored = kernel_closed_form(RegionTag.V, p.swapped(), t, s, tol=1e-13)
        assert mirrored == pytest.approx(value, rel=1e-10)


def test_symmetric_form_matches_closed_form():
    value = kernel_closed_form(RegionTag.V, FIVE, 0.6, 0.7)
    assert kernel_symmetric_form(FIVE, 0.6, 0.7) == pytest.approx(value, rel=1e-7)


def test_symmetric_form_rejects_integer_gap():
    with pytest.raises(DegeneracyError):
        kernel_symmetric_form(KernelParams(0.5, 0.9, 0.4, 0.4, 0.3), 0.6, 0.7)


def test_fq_form_matches_closed_form():
    p = KernelParams(0.5, 0.8, 0.4, 0.6, 0.3)
    value = kernel_closed_form(RegionTag.V, p, 0.85, 0.4)
    assert kernel_fq_form(p, 0.85, 0.4) == pytest.approx(value, rel=1e-7)


def test_fq_form_region():
    with pytest.raises(RegionError):
        kernel_fq_form(FIVE, 0.6, 0.7)


def test_derivative_parameter_map():
    dp = DerivativeParams(0.2, 0.3, 0.1, 1, 2, 0.4, 0.3)
    p = KernelParams.from_derivative(dp)
    assert astuple(p) == pytest.approx((2.2, 2.3, -0.4, -0.3, -2.1))
    back = p.to_derivative(1, 2)
    assert (back.k, back.n) == (1, 2)
    assert astuple(back) == pytest.approx(astuple(dp))


def test_derivative_params_validation():
    with pytest.raises(ParameterError):
        DerivativeParams(0.2, 0.3, 0.1, 1, 2, 1.0, 0.3)
    with pytest.raises(ParameterError):
        DerivativeParams(0.2, 0.3, 0.1, 3, 2, 0.4, 0.3)


@pytest.mark.slow
@pytest.mark.parametrize("s, t", [(0.3, 0.4), (0.6, 0.7), (0.6, 0.3999), (0.7727, 1.0002), (1.0002, 0.7727),
                                  (1.05, 1.1)])
def test_derivative_style_kernel_matches_oracle(s, t):
    dp = DerivativeParams(0.2, 0.3, 0.1, 1, 2, 0.4, 0.3)
    closed = kernel_at(KernelParams.from_derivative(dp), s, t)[1]
    assert closed == pytest.approx(derivative_kernel_oracle(dp, s, t), rel=1e-6, abs=1e-9)


def test_derivative_oracle_outside_is_zero():
    dp = DerivativeParams(0.2, 0.3, 0.1, 1, 2, 0.4, 0.3)
    assert derivative_kernel_oracle(dp, -0.5, 0.5) == 0.0


def test_pde_solutions_satisfy_the_system():
    p = KernelParams(0.6, 0.7, 0.45, 0.35, 0.3)
    for solution in pde_solutions(p):
        s0, s1, t0, t1 = solution.box
        r1, r2 = pde_residual(p, solution, 0.5 * (s0 + s1), 0.5 * (t0 + t1))
        assert abs(r1) < 1e-4, solution.label
        assert abs(r2) < 1e-4, solution.label


def test_one_sided_limit_exact_for_quadratics():
    assert one_sided_limit(lambda eps: 2.0 + 3.0 * eps - 5.0 * eps ** 2, 0.1) == pytest.approx(2.0, abs=1e-14)


@pytest.mark.parametrize("boundary, at", [
    (Boundary.S_ONE, 0.6),
    (Boundary.T_ONE, 0.6),
    (Boundary.CORNER, 0.0),
    (Boundary.DIAGONAL, 0.4),
])
def test_kernel_continuous_across_region_boundaries(boundary, at):
    inside, outside = boundary_gap(SMOOTH, boundary, at)
    assert inside == pytest.approx(outside, abs=1e-5)


def test_kernel_series_reports_convergence():
    result = kernel_series(RegionTag.V, FIVE, 0.6, 0.7)
    assert result.converged
    assert result.value == pytest.approx(kernel_closed_form(RegionTag.V, FIVE, 0.6, 0.7), rel=1e-14)
    assert kernel_series(RegionTag.OUTSIDE, FIVE, -0.6, 0.7).value == 0.0


@pytest.mark.parametrize("p", [KernelParams(0.7, 1.3, 0.8, 1.5, 0.4), KernelParams(2.2, 2.2, -0.5, -0.5, -2.2)])
@pytest.mark.parametrize("region, s, t", [
    (RegionTag.I, [0.1, 0.3, 0.6], [0.2, 0.4, 0.3999]),
    (RegionTag.II, [1.001, 1.5, 3.0], [1.2, 2.0, 40.0]),
    (RegionTag.III, [0.2, 0.7727, 0.95], [1.0002, 1.5, 8.0]),
    (RegionTag.IV, [1.0002, 1.5, 8.0], [0.2, 0.7727, 0.95]),
    (RegionTag.V, [0.6, 0.9], [0.7, 0.2]),
])
def test_closed_form_array_matches_pointwise(p, region, s, t):
    expected = [kernel_closed_form(region, p, u, v) for u, v in zip(s, t)]
    assert_allclose(kernel_closed_form_array(region, p, np.array(s), np.array(t)), expected, rtol=1e-8)


def test_closed_form_array_checks_regions():
    with pytest.raises(RegionError):
        kernel_closed_form_array(RegionTag.I, FIVE, np.array([0.3, 0.8]), np.array([0.4, 0.5]))
