"""Quadrature and finite-difference machinery used as ground truth for the closed forms.

Nothing here calls the kernel closed forms or the two-variable series.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import linalg, special

from .config import ORACLE_NODES, REGION_MARGIN
from .errors import ParameterError, RegionError, StencilError
from .regions import RegionTag, region_classify
from .scalar_special import beta2, beta3

logger = logging.getLogger(__name__)

ScalarField2D = Callable[[np.ndarray, np.ndarray], np.ndarray]

# Central difference stencils (offsets, coefficients), all O(h^2)
STENCILS = {
    0: (np.array([0]), np.array([1.0])),
    1: (np.array([-1, 0, 1]), np.array([-0.5, 0.0, 0.5])),
    2: (np.array([-1, 0, 1]), np.array([1.0, -2.0, 1.0])),
    3: (np.array([-2, -1, 0, 1, 2]), np.array([-0.5, 1.0, 0.0, -1.0, 0.5])),
    4: (np.array([-2, -1, 0, 1, 2]), np.array([1.0, -4.0, 6.0, -4.0, 1.0])),
}


@dataclass(frozen=True)
class JacobiRule:
    """Gauss rule on (-1, 1) for the weight (1-x)^alpha (1+x)^beta"""
    nodes: np.ndarray
    weights: np.ndarray
    alpha: float
    beta: float


@dataclass(frozen=True)
class Leg:
    """One-dimensional rule on [lo, hi] with endpoint distances kept exact"""
    x: np.ndarray
    w: np.ndarray
    from_lo: np.ndarray
    to_hi: np.ndarray


def _check_exponent(name: str, value: float):
    if value <= -1.0:
        raise ParameterError(f"exponent {name}={value} makes the integral divergent")


@lru_cache(maxsize=512)
def _golub_welsch(n: int, alpha: float, beta: float) -> Tuple[np.ndarray, np.ndarray]:
    ab = alpha + beta
    i = np.arange(1, n, dtype=float)
    diag = np.empty(n)
    diag[0] = (beta - alpha) / (ab + 2.0)
    s = 2.0 * i + ab
    diag[1:] = (beta * beta - alpha * alpha) / (s * (s + 2.0))
    off = np.empty(n - 1)
    if n > 1:
        # first entry in cancelled form, (1 + ab) appears in both numerator and denominator
        off[0] = 4.0 * (1 + alpha) * (1 + beta) / ((2 + ab) ** 2 * (3 + ab))
        j = i[1:]
        sj = 2.0 * j + ab
        off[1:] = 4.0 * j * (j + alpha) * (j + beta) * (j + ab) / (sj * sj * (sj * sj - 1.0))
    mass = 2.0 ** (ab + 1.0) * beta2(alpha + 1.0, beta + 1.0)
    if n == 1:
        nodes, weights = diag.copy(), np.array([mass])
    else:
        nodes, vectors = linalg.eigh_tridiagonal(diag, np.sqrt(off))
        weights = mass * vectors[0, :] ** 2
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def gauss_jacobi_rule(n_nodes: int, alpha: float, beta: float) -> JacobiRule:
    """Golub-Welsch Gauss-Jacobi rule, nodes ascending"""
    if n_nodes < 1:
        raise ParameterError(f"n_nodes must be positive, got {n_nodes}")
    _check_exponent("alpha", alpha)
    _check_exponent("beta", beta)
    nodes, weights = _golub_welsch(int(n_nodes), float(alpha), float(beta))
    return JacobiRule(nodes, weights, float(alpha), float(beta))


@lru_cache(maxsize=128)
def laguerre_rule(n_nodes: int, alpha: float) -> Tuple[np.ndarray, np.ndarray]:
    """Generalized Gauss-Laguerre rule for the weight z^alpha e^{-z} on (0, inf)"""
    _check_exponent("alpha", alpha)
    nodes, weights = special.roots_genlaguerre(int(n_nodes), float(alpha))
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def leg(n_nodes: int, lo: float, hi: float, left: float = 0.0, right: float = 0.0) -> Leg:
    """Rule for int_lo^hi (x-lo)^left (hi-x)^right g(x) dx; weights carry the endpoint powers"""
    rule = gauss_jacobi_rule(n_nodes, right, left)
    half = 0.5 * (hi - lo)
    from_lo = half * (1.0 + rule.nodes)
    to_hi = half * (1.0 - rule.nodes)
    weights = rule.weights * half ** (left + right + 1.0)
    return Leg(lo + from_lo, weights, from_lo, to_hi)


def mapped_rule(n_nodes: int, lo: float, hi: float, left_exp: float = 0.0,
                right_exp: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
    rule = leg(n_nodes, lo, hi, left_exp, right_exp)
    return rule.x, rule.w


@dataclass(frozen=True)
class TriangleRule:
    """Duffy-mapped product rule; weights integrate the normalized simplex weight"""
    u: np.ndarray
    v: np.ndarray
    weights: np.ndarray

    def integrate(self, f: ScalarField2D) -> float:
        values = np.asarray(f(self.u, self.v), dtype=float)
        if not np.all(np.isfinite(values)):
            raise ParameterError("integrand produced non-finite samples on the triangle")
        return float(np.sum(self.weights * values))


@lru_cache(maxsize=64)
def triangle_rule(alpha: float, beta: float, gamma: float, n_nodes: int) -> TriangleRule:
    """(u, v) = (xi, (1-xi) eta) with u^alpha v^beta (1-u-v)^gamma absorbed"""
    for name, value in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        _check_exponent(name, value)
    xi = leg(n_nodes, 0.0, 1.0, alpha, beta + gamma + 1.0)
    eta = leg(n_nodes, 0.0, 1.0, beta, gamma)
    u = np.repeat(xi.x, n_nodes)
    v = np.outer(xi.to_hi, eta.x).ravel()
    weights = np.outer(xi.w, eta.w).ravel() / beta3(alpha + 1.0, beta + 1.0, gamma + 1.0)
    return TriangleRule(u, v, weights)


def integrate_triangle(f: ScalarField2D, w, n_nodes: int = 32) -> float:
    """Integral of f against the normalized weight W_{alpha,beta,gamma} over the unit simplex"""
    return triangle_rule(float(w.alpha), float(w.beta), float(w.gamma), int(n_nodes)).integrate(f)


def finite_diff_partial(f: ScalarField2D, x: float, y: float, m: int, l: int, h: float,
                        domain: Optional[Callable[[float, float], bool]] = None) -> float:
    """Central-difference estimate of d^{m+l} f / dx^m dy^l"""
    if m < 0 or l < 0 or m + l > 4:
        raise ParameterError(f"finite differences support m + l <= 4, got ({m}, {l})")
    offsets_x, coeffs_x = STENCILS[m]
    offsets_y, coeffs_y = STENCILS[l]
    xs = x + h * offsets_x
    ys = y + h * offsets_y
    if domain is not None:
        outside = [(a, b) for a in xs for b in ys if not domain(a, b)]
        if outside:
            raise StencilError(f"stencil point {outside[0]} leaves the domain")
    grid_x, grid_y = np.meshgrid(xs, ys, indexing="ij")
    try:
        values = np.asarray(f(grid_x, grid_y), dtype=float)
    except RegionError as exc:
        raise StencilError(f"stencil around ({x}, {y}) leaves the domain: {exc}") from exc
    return float(coeffs_x @ values @ coeffs_y) / h ** (m + l)


@dataclass(frozen=True)
class KernelIntegrand:
    """u^A (s-u)^C v^B (t-v)^D (1-u-v)^E g(u, v)"""
    A: float
    C: float
    B: float
    D: float
    E: float
    factor: Optional[ScalarField2D] = None

    @staticmethod
    def from_kernel(p) -> "KernelIntegrand":
        return KernelIntegrand(p.a - 1.0, p.c - 1.0, p.b - 1.0, p.d - 1.0, -p.e)


_EXPONENTS = {"I": "ACBD", "II": "ABE", "III": "ACBE", "IV": "ABDE", "V": "ACBDE"}


def _inside(region: RegionTag, s: float, t: float) -> bool:
    m = REGION_MARGIN
    if region is RegionTag.I:
        return s > m and t > m and s + t < 1 - m
    if region is RegionTag.II:
        return s > 1 + m and t > 1 + m
    if region is RegionTag.III:
        return m < s < 1 - m and t > 1 + m
    if region is RegionTag.IV:
        return m < t < 1 - m and s > 1 + m
    if region is RegionTag.V:
        return s < 1 - m and t < 1 - m and s + t > 1 + m
    return region_classify(s, t) is RegionTag.OUTSIDE


def _sum(ig: KernelIntegrand, weights, absorbed: str, u, su, v, tv, w) -> float:
    """Sum of weights times every factor of the integrand not already in the weights"""
    value = weights
    for name, base, exponent in (("u", u, ig.A), ("s", su, ig.C), ("v", v, ig.B),
                                 ("t", tv, ig.D), ("w", w, ig.E)):
        if name not in absorbed and exponent != 0.0:
            value = value * base ** exponent
    if ig.factor is not None:
        value = value * ig.factor(u, v)
    return float(np.sum(value))


def _grid(first: Leg, second: Leg):
    """Tensor grid of two legs as flattened (x1, x2, weight) plus exact end distances"""
    a = lambda arr: np.repeat(arr, second.x.size)
    b = lambda arr: np.tile(arr, first.x.size)
    return a, b, np.outer(first.w, second.w).ravel()


def _rectangle(ig, n, s, t) -> float:
    U = leg(n, 0.0, s, ig.A, ig.C)
    V = leg(n, 0.0, t, ig.B, ig.D)
    a, b, weights = _grid(U, V)
    u, v = a(U.x), b(V.x)
    return _sum(ig, weights, "usvt", u, a(U.to_hi), v, b(V.to_hi), 1.0 - u - v)


def _whole_triangle(ig, n, s, t) -> float:
    Xi = leg(n, 0.0, 1.0, ig.A, ig.B + ig.E + 1.0)
    Eta = leg(n, 0.0, 1.0, ig.B, ig.E)
    a, b, weights = _grid(Xi, Eta)
    u = a(Xi.x)
    v = a(Xi.to_hi) * b(Eta.x)
    w = a(Xi.to_hi) * b(Eta.to_hi)
    return _sum(ig, weights, "uvw", u, s - u, v, t - v, w)


def _strip_u(ig, n, s, t) -> float:
    """0 < u < s, 0 < v < 1-u with t > 1"""
    U = leg(n, 0.0, s, ig.A, ig.C)
    Eta = leg(n, 0.0, 1.0, ig.B, ig.E)
    a, b, weights = _grid(U, Eta)
    rest = 1.0 - a(U.x)
    v = rest * b(Eta.x)
    weights = weights * rest ** (ig.B + ig.E + 1.0)
    return _sum(ig, weights, "usvw", a(U.x), a(U.to_hi), v, t - v, rest * b(Eta.to_hi))


def _strip_v(ig, n, s, t) -> float:
    """0 < v < t, 0 < u < 1-v with s > 1"""
    V = leg(n, 0.0, t, ig.B, ig.D)
    Xi = leg(n, 0.0, 1.0, ig.A, ig.E)
    a, b, weights = _grid(V, Xi)
    rest = 1.0 - a(V.x)
    u = rest * b(Xi.x)
    weights = weights * rest ** (ig.A + ig.E + 1.0)
    return _sum(ig, weights, "vtuw", u, s - u, a(V.x), a(V.to_hi), rest * b(Xi.to_hi))


def _corner(n, p_len, q_len, p_exp, q_exp):
    """Rectangle (0,p_len) x (0,q_len) with integrand p^p_exp (p+q)^q_exp, Duffy split on the diagonal.

    Returns flattened (p, q, weight) where the weights carry both singular factors.
    """
    total = p_exp + q_exp + 1.0
    pieces = []
    rho = leg(n, 0.0, 1.0, total, 0.0)
    flat = leg(n, 0.0, 1.0, 0.0, 0.0)
    a, b, weights = _grid(rho, flat)
    r, sigma = a(rho.x), b(flat.x)
    scale = p_len * q_len * p_len ** p_exp
    pieces.append((p_len * r, q_len * r * sigma,
                   weights * scale * (p_len + q_len * sigma) ** q_exp))
    graded = leg(n, 0.0, 1.0, p_exp, 0.0)
    a, b, weights = _grid(rho, graded)
    r, sigma = a(rho.x), b(graded.x)
    pieces.append((p_len * r * sigma, q_len * r,
                   weights * scale * (p_len * sigma + q_len) ** q_exp))
    return [np.concatenate(parts) for parts in zip(*pieces)]


def _region_five_lower(ig, n, s, t) -> float:
    """I5 domain: 0 < u < s, 0 < v < 1-s"""
    half_u, half_v = 0.5 * s, 0.5 * (1.0 - s)
    total = 0.0
    U = leg(n, 0.0, half_u, ig.A, 0.0)
    V = leg(n, 0.0, half_v, ig.B, 0.0)
    a, b, weights = _grid(U, V)
    u, v = a(U.x), b(V.x)
    total += _sum(ig, weights, "uv", u, s - u, v, t - v, 1.0 - u - v)
    V = leg(n, half_v, 1.0 - s)
    a, b, weights = _grid(U, V)
    u, v = a(U.x), b(V.x)
    total += _sum(ig, weights, "u", u, s - u, v, t - v, (s - u) + b(V.to_hi))
    U = leg(n, half_u, s, 0.0, ig.C)
    V = leg(n, 0.0, half_v, ig.B, 0.0)
    a, b, weights = _grid(U, V)
    u, v = a(U.x), b(V.x)
    total += _sum(ig, weights, "sv", u, a(U.to_hi), v, t - v, a(U.to_hi) + (1.0 - s - v))
    # corner at (s, 1-s): p = s-u, q = 1-s-v
    p, q, weights = _corner(n, half_u, half_v, ig.C, ig.E)
    u, v = s - p, (1.0 - s) - q
    total += _sum(ig, weights, "sw", u, p, v, t - v, p + q)
    return total


def _region_five_upper(ig, n, s, t) -> float:
    """I6 domain: 1-s < v < t, 0 < u < 1-v"""
    mid = 0.5 * (1.0 - s + t)
    width = mid - (1.0 - s)
    total = 0.0
    V = leg(n, mid, t, 0.0, ig.D)
    Xi = leg(n, 0.0, 1.0, ig.A, ig.E)
    a, b, weights = _grid(V, Xi)
    rest = 1.0 - a(V.x)
    u = rest * b(Xi.x)
    weights = weights * rest ** (ig.A + ig.E + 1.0)
    total += _sum(ig, weights, "tuw", u, s - u, a(V.x), a(V.to_hi), rest * b(Xi.to_hi))
    # lower strip: r = v - (1-s) in (0, width), q = 1-u-v in (0, s-r)
    cut = 0.5 * (s - width)
    q, r, weights = _corner(n, cut, width, ig.E, ig.C)
    total += _sum(ig, weights, "ws", s - r - q, r + q, 1.0 - s + r, 2.0 * width - r, q)
    R = leg(n, 0.0, width)
    Tau = leg(n, 0.0, 1.0, 0.0, ig.A)
    a, b, weights = _grid(R, Tau)
    r = a(R.x)
    span = s - r - cut
    q = cut + span * b(Tau.x)
    weights = weights * span ** (ig.A + 1.0)
    total += _sum(ig, weights, "u", span * b(Tau.to_hi), r + q, 1.0 - s + r, 2.0 * width - r, q)
    return total


def _prepare(region: RegionTag, p, s: float, t: float) -> KernelIntegrand:
    if not _inside(region, s, t):
        raise RegionError(f"({s}, {t}) is not strictly inside region {region.value}")
    ig = p if isinstance(p, KernelIntegrand) else KernelIntegrand.from_kernel(p)
    for name in _EXPONENTS.get(region.value, ""):
        _check_exponent(name, getattr(ig, name))
    if region is RegionTag.V:
        _check_exponent("C+E+1", ig.C + ig.E + 1.0)
    return ig


def integrate_kernel_split(p, s: float, t: float, n_nodes: int = ORACLE_NODES) -> Tuple[float, float]:
    """Region-V integral split into its v < 1-s and v > 1-s parts"""
    ig = _prepare(RegionTag.V, p, s, t)
    return _region_five_lower(ig, n_nodes, s, t), _region_five_upper(ig, n_nodes, s, t)


def integrate_kernel_region(region: RegionTag, p, s: float, t: float,
                            n_nodes: int = ORACLE_NODES) -> float:
    """Brute-force quadrature of the kernel integral over the part of the triangle below (s, t).

    p is KernelParams-like (a..e) or a KernelIntegrand with general exponents.
    """
    if region is RegionTag.OUTSIDE:
        _prepare(region, p, s, t)
        return 0.0
    ig = _prepare(region, p, s, t)
    if region is RegionTag.I:
        return _rectangle(ig, n_nodes, s, t)
    if region is RegionTag.II:
        return _whole_triangle(ig, n_nodes, s, t)
    if region is RegionTag.III:
        return _strip_u(ig, n_nodes, s, t)
    if region is RegionTag.IV:
        return _strip_v(ig, n_nodes, s, t)
    lower, upper = integrate_kernel_split(ig, s, t, n_nodes)
    return lower + upper
