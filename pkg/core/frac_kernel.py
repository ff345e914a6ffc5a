"""Kernel integrals I1..I6 of the triangle fractional derivative.

The kernel over region r is the integral of
u^{a-1} (s-u)^{c-1} v^{b-1} (t-v)^{d-1} (1-u-v)^{-e}
over the part of the unit triangle with u < s and v < t.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Tuple

import numpy as np

from utils.validators import Validator

from .config import DEFAULT_TOL, NEAR_INTEGER, ORACLE_NODES
from .errors import DegeneracyError, ParameterError, RegionError
from .hyp2var import f2, f2_array, f2_pde_residual, f3, f3_array, f3_extended, fp, fq, h2, h2_array
from .quad_oracle import KernelIntegrand, integrate_kernel_region
from .regions import RegionTag, region_classify
from .scalar_special import SeriesValue, beta2, beta3, gamma_ratio
from .triangle_basis import BasisIndex, TriangleWeight, u_poly

logger = logging.getLogger(__name__)

# Series tolerance for PDE residual checks; central differences divide by h^2
PDE_TOL = 1e-14


@dataclass(frozen=True)
class DerivativeParams:
    """Weight exponents, basis index and fractional orders of a triangle derivative"""
    alpha: float
    beta: float
    gamma: float
    k: int
    n: int
    mu: float
    nu: float

    def __post_init__(self):
        Validator.require_exponents(alpha=self.alpha, beta=self.beta, gamma=self.gamma)
        Validator.require_index(self.k, self.n)
        if not (self.k - self.mu > 0 and self.n - self.k - self.nu > 0):
            raise ParameterError(f"fractional orders need k - mu > 0 and n - k - nu > 0, "
                                 f"got k={self.k}, n={self.n}, mu={self.mu}, nu={self.nu}")

    @property
    def weight(self) -> TriangleWeight:
        return TriangleWeight(self.alpha, self.beta, self.gamma)


@dataclass(frozen=True)
class KernelParams:
    a: float
    b: float
    c: float
    d: float
    e: float

    @staticmethod
    def from_derivative(dp: DerivativeParams) -> "KernelParams":
        return KernelParams(dp.k + dp.alpha + 1, dp.n - dp.k + dp.beta + 1, -dp.mu, -dp.nu,
                            -dp.n - dp.gamma)

    def to_derivative(self, k: int, n: int) -> DerivativeParams:
        """Inverse of from_derivative once the basis index is fixed"""
        return DerivativeParams(self.a - k - 1, self.b - n + k - 1, -self.e - n, k, n,
                                -self.c, -self.d)

    def swapped(self) -> "KernelParams":
        """Parameters of the kernel with the roles of (u, s) and (v, t) exchanged"""
        return KernelParams(self.b, self.a, self.d, self.c, self.e)

    def check_conditions(self, region: RegionTag):
        """Raise ParameterError unless the defining integral of region converges"""
        a, b, c, d, e = self.a, self.b, self.c, self.d, self.e
        if region is RegionTag.I:
            checks = {"a > 0": a > 0, "b > 0": b > 0, "c > 0": c > 0, "d > 0": d > 0}
        elif region is RegionTag.II:
            checks = {"a > 0": a > 0, "b > 0": b > 0, "e < 1": e < 1}
        elif region is RegionTag.III:
            checks = {"a > 0": a > 0, "b > 0": b > 0, "c > 0": c > 0, "e < 1": e < 1}
        elif region is RegionTag.IV:
            checks = {"a > 0": a > 0, "b > 0": b > 0, "d > 0": d > 0, "e < 1": e < 1}
        elif region is RegionTag.V:
            checks = {"0 < a < 1": 0 < a < 1, "b > 0": b > 0, "0 < c < 1": 0 < c < 1,
                      "0 < d < 1": 0 < d < 1, "0 < e < 1": 0 < e < 1}
        else:
            checks = {}
        failed = [name for name, ok in checks.items() if not ok]
        if failed:
            raise ParameterError(f"region {region.value} kernel needs {', '.join(failed)} for {self}")


# --- Closed forms ----------------------------------------------------------

def _kernel_one(p: KernelParams, s, t, tol) -> SeriesValue:
    a, b, c, d, e = p.a, p.b, p.c, p.d, p.e
    scale = beta2(a, c) * beta2(b, d) * s ** (a + c - 1) * t ** (b + d - 1)
    return f2(e, a, b, a + c, b + d, s, t, tol).scaled(scale)


def _kernel_two(p: KernelParams, s, t, tol) -> SeriesValue:
    a, b, c, d, e = p.a, p.b, p.c, p.d, p.e
    scale = beta3(a, b, 1 - e) * s ** (c - 1) * t ** (d - 1)
    return f3(a, b, 1 - c, 1 - d, a + b + 1 - e, 1 / s, 1 / t, tol).scaled(scale)


def _kernel_three(p: KernelParams, s, t, tol) -> SeriesValue:
    a, b, c, d, e = p.a, p.b, p.c, p.d, p.e
    scale = beta2(a, c) * beta2(b, 1 - e) * s ** (a + c - 1) * t ** (d - 1)
    return h2(e - b, a, 1 - d, b, a + c, s, -1 / t, tol).scaled(scale)


def _kernel_four(p: KernelParams, s, t, tol) -> SeriesValue:
    return _kernel_three(p.swapped(), t, s, tol)


def _fp_term(p: KernelParams, s, t, tol) -> SeriesValue:
    """B(a, c-e) B(b, d) s^{a+c-1} t^{b+d-1} F_P(e, b, a, b+d, a+c; t, s)"""
    a, b, c, d, e = p.a, p.b, p.c, p.d, p.e
    scale = beta2(a, c - e) * beta2(b, d)
    if scale == 0.0:
        return SeriesValue.exact(0.0)
    return fp(e, b, a, b + d, a + c, t, s, tol).scaled(scale * s ** (a + c - 1) * t ** (b + d - 1))


def _lower_f3_term(p: KernelParams, s, t, tol) -> SeriesValue:
    """B(c, e-c) B(b, c-e+1) s^{a-1} (1-s)^{b+c-e} t^{d-1} F3(1-a, b; c, 1-d; b+c-e+1; ...)"""
    a, b, c, d, e = p.a, p.b, p.c, p.d, p.e
    scale = beta2(c, e - c) * beta2(b, c - e + 1)
    if scale == 0.0:
        return SeriesValue.exact(0.0)
    series = f3(1 - a, b, c, 1 - d, b + c - e + 1, (s - 1) / s, (1 - s) / t, tol)
    return series.scaled(scale * s ** (a - 1) * (1 - s) ** (b + c - e) * t ** (d - 1))


def _upper_f3_term(p: KernelParams, s, t, tol) -> SeriesValue:
    """B(1-e, e-c) B(d, 1-e+c) s^{a-1} t^{b-1} (s+t-1)^{c+d-e} F3(1-a, 1-b; c, d; c+d-e+1; ...)"""
    a, b, c, d, e = p.a, p.b, p.c, p.d, p.e
    scale = beta2(1 - e, e - c) * beta2(d, 1 - e + c)
    if scale == 0.0:
        return SeriesValue.exact(0.0)
    excess = s + t - 1
    series = f3(1 - a, 1 - b, c, d, c + d - e + 1, excess / s, excess / t, tol)
    return series.scaled(scale * s ** (a - 1) * t ** (b - 1) * excess ** (c + d - e))


def _split_term(p: KernelParams, s, t, tol) -> SeriesValue:
    """Regular part of I6 at the line s + t = 1, carried by the extended F3"""
    a, b, c, d, e = p.a, p.b, p.c, p.d, p.e
    if d == 0.0:
        raise DegeneracyError("the I5/I6 split needs d != 0")
    excess = s + t - 1
    series = f3_extended(1, 1 - b, e - a - c + 1, d, d + 1, e, e - c + 1, excess / s, excess / t, tol)
    return series.scaled(beta2(a, c - e) / d * s ** (a + c - e - 1) * t ** (b - 1) * excess ** d)


def _kernel_five(p: KernelParams, s, t, tol) -> SeriesValue:
    terms = (_fp_term, _lower_f3_term, _upper_f3_term)
    return SeriesValue.combine([(1.0, term(p, s, t, tol)) for term in terms])


_CLOSED_FORMS: Dict[RegionTag, Callable[[KernelParams, float, float, float], SeriesValue]] = {
    RegionTag.I: _kernel_one,
    RegionTag.II: _kernel_two,
    RegionTag.III: _kernel_three,
    RegionTag.IV: _kernel_four,
    RegionTag.V: _kernel_five,
}


def kernel_series(region: RegionTag, p: KernelParams, s: float, t: float,
                  strict: bool = False, tol: float = DEFAULT_TOL) -> SeriesValue:
    """Closed-form kernel of region at (s, t) with the diagnostics of its series;
    region V gives I5 + I6.

    With strict=False the formulas are used as analytic continuations in the
    parameters and only Gamma poles are rejected.
    """
    actual = region_classify(s, t)
    if actual is not region:
        raise RegionError(f"({s}, {t}) lies in region {actual.value}, not {region.value}")
    if region is RegionTag.OUTSIDE:
        return SeriesValue.exact(0.0)
    if strict:
        p.check_conditions(region)
    result = _CLOSED_FORMS[region](p, s, t, tol)
    if not result.converged:
        logger.warning(f"kernel {region.value} at ({s}, {t}) did not converge, "
                       f"error estimate {result.err_estimate:.2e}")
    logger.debug(f"kernel {region.value} at ({s}, {t}) = {result.value:.12g}")
    return result


def kernel_closed_form(region: RegionTag, p: KernelParams, s: float, t: float,
                       strict: bool = False, tol: float = DEFAULT_TOL) -> float:
    return kernel_series(region, p, s, t, strict, tol).value


def kernel_closed_form_array(region: RegionTag, p: KernelParams, s: np.ndarray, t: np.ndarray,
                             tol: float = DEFAULT_TOL) -> np.ndarray:
    """kernel_closed_form at every point of the 1-D arrays (s, t), all inside region"""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    for si, ti in zip(s, t):
        actual = region_classify(si, ti)
        if actual is not region:
            raise RegionError(f"({si}, {ti}) lies in region {actual.value}, not {region.value}")
    if s.size == 0 or region is RegionTag.OUTSIDE:
        return np.zeros(s.shape)
    a, b, c, d, e = p.a, p.b, p.c, p.d, p.e
    if region is RegionTag.I:
        scale = beta2(a, c) * beta2(b, d) * s ** (a + c - 1) * t ** (b + d - 1)
        return scale * f2_array(e, a, b, a + c, b + d, s, t, tol)
    if region is RegionTag.II:
        scale = beta3(a, b, 1 - e) * s ** (c - 1) * t ** (d - 1)
        return scale * f3_array(a, b, 1 - c, 1 - d, a + b + 1 - e, 1 / s, 1 / t, tol)
    if region is RegionTag.III:
        scale = beta2(a, c) * beta2(b, 1 - e) * s ** (a + c - 1) * t ** (d - 1)
        return scale * h2_array(e - b, a, 1 - d, b, a + c, s, -1 / t, tol)
    if region is RegionTag.IV:
        q = p.swapped()
        scale = beta2(q.a, q.c) * beta2(q.b, 1 - q.e) * t ** (q.a + q.c - 1) * s ** (q.d - 1)
        return scale * h2_array(q.e - q.b, q.a, 1 - q.d, q.b, q.a + q.c, t, -1 / s, tol)
    return np.array([_kernel_five(p, si, ti, tol).value for si, ti in zip(s, t)])


def kernel_at(p: KernelParams, s: float, t: float, tol: float = DEFAULT_TOL) -> Tuple[RegionTag, float]:
    """Region of (s, t) and the closed-form kernel there"""
    region = region_classify(s, t)
    return region, kernel_closed_form(region, p, s, t, tol=tol)


class Boundary(Enum):
    """Lines where the region-V kernel meets another region's formula"""
    S_ONE = "s=1"
    T_ONE = "t=1"
    CORNER = "s=t=1"
    DIAGONAL = "s+t=1"


# Point on the boundary at position `at`, and the unit step into V and into the neighbour
_APPROACH = {
    Boundary.S_ONE: (lambda at: (1.0, at), (-1.0, 0.0), (1.0, 0.0)),
    Boundary.T_ONE: (lambda at: (at, 1.0), (0.0, -1.0), (0.0, 1.0)),
    Boundary.CORNER: (lambda at: (1.0, 1.0), (-1.0, -1.0), (1.0, 1.0)),
    Boundary.DIAGONAL: (lambda at: (at, 1.0 - at), (0.0, 1.0), (0.0, -1.0)),
}


def one_sided_limit(kernel: Callable[[float], float], h: float) -> float:
    """Limit of kernel(eps) as eps -> 0+ from eps = h, h/2, h/4, exact for quadratics in eps"""
    return (8.0 * kernel(h / 4) - 6.0 * kernel(h / 2) + kernel(h)) / 3.0


def boundary_gap(p: KernelParams, boundary: Boundary, at: float = 0.6, h: float = 1e-2,
                 tol: float = DEFAULT_TOL) -> Tuple[float, float]:
    """(limit from region V, limit from the neighbouring region) of the closed-form kernels at a
    boundary point; the two agree when the kernel is smooth up to the line from both sides."""
    point, into_five, into_other = _APPROACH[boundary]
    s0, t0 = point(at)

    def side(step):
        def kernel(eps):
            return kernel_at(p, s0 + eps * step[0], t0 + eps * step[1], tol)[1]
        return kernel

    return one_sided_limit(side(into_five), h), one_sided_limit(side(into_other), h)


def _require_region_five(s, t):
    if region_classify(s, t) is not RegionTag.V:
        raise RegionError(f"({s}, {t}) is not in region V")


def kernel_i5_i6_split(p: KernelParams, s: float, t: float,
                       tol: float = DEFAULT_TOL) -> Tuple[float, float]:
    """I5 (v < 1-s) and I6 (v > 1-s) separately"""
    _require_region_five(s, t)
    regular = _split_term(p, s, t, tol).value
    i5 = _lower_f3_term(p, s, t, tol).value + _fp_term(p, s, t, tol).value - regular
    i6 = regular + _upper_f3_term(p, s, t, tol).value
    return i5, i6


def _symmetric_coefficients(p: KernelParams) -> Tuple[float, float, float, float]:
    a, b, c, d, e = p.a, p.b, p.c, p.d, p.e
    gap = c - d
    if abs(gap - round(gap)) < NEAR_INTEGER:
        raise DegeneracyError(f"symmetric form needs c - d off the integers, got {gap}")
    a1 = gamma_ratio([a, b, e, c - d, d - c + 1, 1 - e], [a + c - e, b + d, 1 - d, e - c + 1])
    a2 = gamma_ratio([a, b, e, d - c, c - d + 1, 1 - e], [b + d - e, a + c, 1 - c, e - d + 1])
    a3 = gamma_ratio([a, d, c - d, d - c + 1, 1 - e], [c, 1 - c, a + d - e + 1])
    a4 = gamma_ratio([b, c, d - c, c - d + 1, 1 - e], [d, 1 - d, c + b - e + 1])
    return a1, a2, a3, a4


def kernel_symmetric_form(p: KernelParams, s: float, t: float, tol: float = DEFAULT_TOL) -> float:
    """I5 + I6 written so that exchanging (a, c, s) with (b, d, t) maps terms onto each other"""
    _require_region_five(s, t)
    a, b, c, d, e = p.a, p.b, p.c, p.d, p.e
    a1, a2, a3, a4 = _symmetric_coefficients(p)
    power = s ** (a + c - 1) * t ** (b + d - 1)
    total = 0.0
    if a1 != 0.0:
        total += a1 * power * fp(e, b, a, b + d, a + c, t, s, tol).value
    if a2 != 0.0:
        total += a2 * power * fp(e, a, b, a + c, b + d, s, t, tol).value
    if a3 != 0.0:
        series = f3(d, a, 1 - b, 1 - c, a + d - e + 1, (t - 1) / t, (1 - t) / s, tol)
        total += a3 * t ** (b - 1) * (1 - t) ** (a + d - e) * s ** (c - 1) * series.value
    if a4 != 0.0:
        series = f3(c, b, 1 - a, 1 - d, b + c - e + 1, (s - 1) / s, (1 - s) / t, tol)
        total += a4 * s ** (a - 1) * (1 - s) ** (b + c - e) * t ** (d - 1) * series.value
    return total


def kernel_fq_form(p: KernelParams, s: float, t: float, tol: float = DEFAULT_TOL) -> float:
    """I5 + I6 through F_P, F_Q and F3; needs t < 2s - 1"""
    _require_region_five(s, t)
    if not t < 2 * s - 1:
        raise RegionError(f"F_Q form needs t < 2s - 1, got ({s}, {t})")
    a, b, c, d, e = p.a, p.b, p.c, p.d, p.e
    excess = s + t - 1
    total = _fp_term(p, s, t, tol).value
    scale = beta2(1 - e, e - c) * beta2(d, c - e + b)
    if scale != 0.0:
        series = fq(e, c, d, a + c, b + d, s / excess, t / excess, tol)
        total += (scale * s ** (a + c - 1) * t ** (b + d - 1) * excess ** (-e) * series.value)
    scale = beta2(e - b - c, c) * beta2(1 - e, b)
    if scale != 0.0:
        series = f3(1 - a, b, c, 1 - d, b + c - e + 1, (s - 1) / s, (1 - s) / t, tol)
        total += scale * s ** (a - 1) * (1 - s) ** (b + c - e) * t ** (d - 1) * series.value
    return total


# --- Quadrature counterpart for derivative-style parameters ----------------

def derivative_integrand(dp: DerivativeParams) -> Tuple[float, KernelIntegrand]:
    """(prefactor, integrand) whose product integrates to the kernel of from_derivative(dp).

    Moving the Rodrigues derivatives of U_{k,n} onto the power factors leaves
    u^alpha (s-u)^{k-mu-1} v^beta (t-v)^{n-k-nu-1} (1-u-v)^gamma U_{k,n}(u, v),
    which is integrable for every admissible dp.
    """
    k, n, mu, nu = dp.k, dp.n, dp.mu, dp.nu
    idx = BasisIndex(k, n)
    weight = dp.weight
    prefactor = gamma_ratio([-mu, -nu], [k - mu, n - k - nu])
    integrand = KernelIntegrand(dp.alpha, k - mu - 1, dp.beta, n - k - nu - 1, dp.gamma,
                                factor=lambda u, v: u_poly(idx, weight, u, v))
    return prefactor, integrand


def derivative_kernel_oracle(dp: DerivativeParams, s: float, t: float,
                             n_nodes: int = ORACLE_NODES) -> float:
    """Quadrature value of kernel_closed_form for KernelParams.from_derivative(dp)"""
    region = region_classify(s, t)
    if region is RegionTag.OUTSIDE:
        return 0.0
    prefactor, integrand = derivative_integrand(dp)
    return prefactor * integrate_kernel_region(region, integrand, s, t, n_nodes)


# --- Solutions of the F2 system --------------------------------------------

@dataclass(frozen=True)
class PdeSolution:
    """One explicit solution with a box (s0, s1, t0, t1) of points where it is evaluable"""
    label: str
    evaluate: Callable
    box: Tuple[float, float, float, float]


def pde_coefficients(p: KernelParams) -> Tuple[float, float, float, float, float]:
    """(a0, b1, b2, c1, c2) of the F2 system solved by every kernel with parameters p"""
    a, b, c, d, e = p.a, p.b, p.c, p.d, p.e
    return e - a - b - c - d + 2, 1 - c, 1 - d, 2 - a - c, 2 - b - d


def pde_solutions(p: KernelParams, tol: float = PDE_TOL) -> List[PdeSolution]:
    a, b, c, d, e = p.a, p.b, p.c, p.d, p.e

    def sol_a(s, t):
        return s ** (a + c - 1) * t ** (b + d - 1) * f2(e, a, b, a + c, b + d, s, t, tol).value

    def sol_b(s, t):
        return s ** (a + c - 1) * f2(e - b - d + 1, a, 1 - d, a + c, 2 - b - d, s, t, tol).value

    def sol_c(s, t):
        return s ** (c - 1) * t ** (d - 1) * f3(a, b, 1 - c, 1 - d, a + b + 1 - e, 1 / s, 1 / t, tol).value

    def sol_d(s, t):
        return t ** (b + d - 1) * fp(e - c - a + 1, b, 1 - c, b + d, 2 - a - c, t, s, tol).value

    def sol_e(s, t):
        series = f3(1 - a, b, c, 1 - d, b + c - e + 1, (s - 1) / s, (1 - s) / t, tol)
        return s ** (a - 1) * t ** (d - 1) * (1 - s) ** (b + c - e) * series.value

    def sol_f(s, t):
        series = f3(1 - a, 1 - b, c, d, c + d - e + 1, (s + t - 1) / s, (s + t - 1) / t, tol)
        return s ** (a - 1) * t ** (b - 1) * (1 - s - t) ** (c + d - e) * series.value

    def sol_g(s, t):
        return s ** (a + c - 1) * t ** (d - 1) * h2(e - b, a, 1 - d, b, a + c, s, -1 / t, tol).value

    layout = [
        ("a", sol_a, (0.1, 0.35, 0.1, 0.35)),
        ("b", sol_b, (0.1, 0.35, 0.1, 0.35)),
        ("c", sol_c, (2.0, 4.0, 2.0, 4.0)),
        ("d", sol_d, (0.5, 0.8, 0.4, 0.7)),
        ("e", sol_e, (0.6, 0.8, 0.6, 0.9)),
        ("f", sol_f, (0.4, 0.45, 0.4, 0.45)),
        ("g", sol_g, (0.2, 0.5, 2.0, 3.0)),
    ]
    return [PdeSolution(label, np.vectorize(func, otypes=[float]), box)
            for label, func, box in layout]


def pde_residual(p: KernelParams, solution: PdeSolution, s: float, t: float,
                 h: float = 1e-3) -> Tuple[float, float]:
    """Residuals of the F2 system of p at (s, t) for one of its explicit solutions"""
    return f2_pde_residual(*pde_coefficients(p), solution.evaluate, s, t, h)
