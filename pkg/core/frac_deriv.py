"""Finite-delta fractional orthogonal derivatives W_delta on the square and the triangle."""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import factorial
from typing import Callable, List, Tuple

import numpy as np
from scipy import special

from utils.validators import Validator

from .config import DECAY_RATE, DEFAULT_TOL, ORACLE_NODES, TAIL_CUTOFF
from .errors import DivergenceError, ParameterError, RegionError, TruncationError
from .frac_kernel import DerivativeParams, KernelParams, derivative_kernel_oracle, kernel_closed_form_array
from .ortho_deriv import (
    SquareJacobiSpec,
    TriangleDerivSpec,
    d_delta_square,
    d_delta_triangle,
    jacobi_norm_ratio,
    sample_field,
)
from .quad_oracle import ScalarField2D, laguerre_rule, leg
from .regions import RegionTag
from .scalar_special import gamma_ratio, hyp2f1

logger = logging.getLogger(__name__)

# Largest share of the result the outermost improper piece may carry
TAIL_TOL = 1e-8
# Grading exponent for legs ending on a kernel singularity
GRADING = 3


class JKind(Enum):
    """Inner convolution integral of a Jacobi polynomial: inside (-1, 1) or beyond 1"""
    J1 = "J1"
    J2 = "J2"


class FracMethod(Enum):
    KERNEL = "kernel"
    WEYL = "weyl"


class KernelSource(Enum):
    """Where w_delta_triangle takes its kernel values from"""
    CLOSED = "closed"
    ORACLE = "oracle"


@dataclass(frozen=True)
class FracSpec:
    """Square fractional derivative of total order m: x-order m - l with P^{(alpha, beta)},
    y-order l with P^{(gamma, delta_exp)}"""
    alpha: float
    beta: float
    gamma: float
    delta_exp: float
    m: int
    l: int
    mu: float
    nu: float

    def __post_init__(self):
        Validator.require_exponents(alpha=self.alpha, beta=self.beta,
                                    gamma=self.gamma, delta_exp=self.delta_exp)
        if not (self.m - self.l - self.mu > 0 and self.l - self.nu > 0):
            raise ParameterError(f"square fractional derivative needs m - l - mu > 0 and l - nu > 0, "
                                 f"got m={self.m}, l={self.l}, mu={self.mu}, nu={self.nu}")

    @property
    def jacobi(self) -> SquareJacobiSpec:
        return SquareJacobiSpec(self.alpha, self.beta, self.gamma, self.delta_exp,
                                self.m - self.l, self.l)


@dataclass(frozen=True)
class TriangleFracSpec:
    params: DerivativeParams
    delta: float

    def __post_init__(self):
        if not Validator.validate_delta(self.delta):
            raise ParameterError(f"delta must be positive, got {self.delta}")


# --- J kernels -------------------------------------------------------------

def _check_j(lam: int, alpha: float, beta: float, nu: float):
    Validator.require_exponents(alpha=alpha, beta=beta)
    if lam < 0 or lam - nu <= 0:
        raise ParameterError(f"J kernels need lambda >= 0 and lambda - nu > 0, got {lam}, {nu}")


def j_kernel(which: JKind, xi: float, lam: int, alpha: float, beta: float, nu: float,
             tol: float = DEFAULT_TOL) -> float:
    """Integral over u < xi of (xi-u)^{lam-nu-1} P_lam^{(alpha, beta)}(u) (1-u)^alpha (1+u)^beta"""
    _check_j(lam, alpha, beta, nu)
    sign = (-1.0) ** lam
    if which is JKind.J1:
        if not -1.0 < xi < 1.0:
            raise RegionError(f"J1 needs -1 < xi < 1, got {xi}")
        scale = gamma_ratio([lam + beta + 1, lam - nu], [lam - nu + beta + 1]) / (
            2.0 ** (lam - nu) * factorial(lam))
        series = hyp2f1(-nu, 2 * lam - nu + alpha + beta + 1, lam - nu + beta + 1, (1 + xi) / 2, tol)
        return (sign * scale * (1 - xi) ** (lam + alpha - nu) * (1 + xi) ** (lam + beta - nu)
                * series.value)
    if not xi > 1.0:
        raise RegionError(f"J2 needs xi > 1, got {xi}")
    scale = gamma_ratio([lam - nu, lam + alpha + 1, lam + beta + 1],
                        [-nu, 2 * lam + alpha + beta + 2]) / factorial(lam)
    if scale == 0.0:
        return 0.0
    series = hyp2f1(nu + 1, lam + beta + 1, 2 * lam + alpha + beta + 2, 2 / (xi + 1), tol)
    return (sign * scale * 2.0 ** (lam + alpha + beta + 1) / (xi + 1) ** (nu + 1)
            * series.value)


# --- Improper legs ---------------------------------------------------------

def tail_limit(delta: float, kappa: float = DECAY_RATE) -> float:
    """End of the improper legs: where kappa * delta * s reaches TAIL_CUTOFF"""
    return max(TAIL_CUTOFF / (kappa * delta), 2.0)


def _graded(n_nodes: int, lo: float, hi: float, toward_hi: bool) -> Tuple[np.ndarray, np.ndarray]:
    rule = leg(n_nodes, 0.0, 1.0)
    width = hi - lo
    weights = rule.w * width * GRADING * rule.x ** (GRADING - 1)
    offset = width * rule.x ** GRADING
    return (hi - offset if toward_hi else lo + offset), weights


def _tail_pieces(n_nodes: int, s_max: float) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Dyadic pieces (1, 2), (2, 4), ... covering (1, s_max); the first is graded toward 1"""
    pieces = [_graded(n_nodes, 1.0, min(2.0, s_max), toward_hi=False)]
    lo = 2.0
    while lo < s_max:
        hi = min(2 * lo, s_max)
        rule = leg(n_nodes, lo, hi)
        pieces.append((rule.x, rule.w))
        lo = hi
    return pieces


def _j_axis_rule(lam: int, alpha: float, beta: float, nu: float, s_max: float,
                 n_nodes: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(nodes, weights times J, mask of the outermost piece) on (-1, s_max)"""
    j1 = np.vectorize(lambda xi: j_kernel(JKind.J1, xi, lam, alpha, beta, nu), otypes=[float])
    j2 = np.vectorize(lambda xi: j_kernel(JKind.J2, xi, lam, alpha, beta, nu), otypes=[float])
    power = lam + beta - nu
    left = leg(n_nodes, -1.0, 0.0, power, 0.0)
    nodes = [left.x]
    weights = [left.w * j1(left.x) / left.from_lo ** power]
    xi, w = _graded(n_nodes, 0.0, 1.0, toward_hi=True)
    nodes.append(xi)
    weights.append(w * j1(xi))
    pieces = _tail_pieces(n_nodes, s_max)
    for xi, w in pieces:
        nodes.append(xi)
        weights.append(w * j2(xi))
    nodes = np.concatenate(nodes)
    last = np.zeros(nodes.size, dtype=bool)
    last[-pieces[-1][0].size:] = True
    return nodes, np.concatenate(weights), last


def _check_tail(total: float, tail: float, where: str):
    bound = abs(tail)
    logger.debug(f"{where}: outermost improper piece contributes {bound:.3e}")
    if bound > TAIL_TOL * abs(total) and bound > 0.0:
        raise TruncationError(f"{where}: outermost piece carries {bound:.3e} of {total:.3e}; "
                              f"the test function does not decay like exp(-kappa (x + y))")


# --- Weyl fractional integral ----------------------------------------------

def weyl_integral(f: ScalarField2D, order_x: float, order_y: float,
                  kappa: float = DECAY_RATE, n_nodes: int = 32) -> ScalarField2D:
    """The field (x, y) -> int_0^inf int_0^inf f(x+z, y+w) z^{order_x-1} w^{order_y-1} dz dw
    / (Gamma(order_x) Gamma(order_y)), by generalized Gauss-Laguerre rules."""
    if order_x <= 0 or order_y <= 0:
        raise ParameterError(f"Weyl integral orders must be positive, got ({order_x}, {order_y})")
    zx, wx = laguerre_rule(n_nodes, order_x - 1.0)
    zy, wy = laguerre_rule(n_nodes, order_y - 1.0)
    with np.errstate(divide="ignore"):
        ax = np.exp(np.log(wx) + zx)
        ay = np.exp(np.log(wy) + zy)
    scale = gamma_ratio([], [order_x, order_y]) * kappa ** (-order_x - order_y)
    table = scale * np.outer(ax, ay)
    shift_x = zx[:, None] / kappa
    shift_y = zy[None, :] / kappa

    def integral(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        values = sample_field(f, x[..., None, None] + shift_x, y[..., None, None] + shift_y)
        return np.tensordot(values, table, axes=([-2, -1], [0, 1]))

    return integral


# --- Square ----------------------------------------------------------------

def _square_kernel(f, x, y, spec: FracSpec, delta, n_nodes, kappa) -> float:
    s_max = tail_limit(delta, kappa)
    sx, wx, last_x = _j_axis_rule(spec.m - spec.l, spec.alpha, spec.beta, spec.mu, s_max, n_nodes)
    sy, wy, last_y = _j_axis_rule(spec.l, spec.gamma, spec.delta_exp, spec.nu, s_max, n_nodes)
    grid_x, grid_y = np.meshgrid(x + delta * sx, y + delta * sy, indexing="ij")
    weighted = sample_field(f, grid_x, grid_y) * np.outer(wx, wy)
    total = float(np.sum(weighted))
    _check_tail(total, float(np.sum(weighted[last_x, :]) + np.sum(weighted[:, last_y])),
                "square fractional derivative")
    ratio = (jacobi_norm_ratio(spec.m - spec.l, spec.alpha, spec.beta)
             * jacobi_norm_ratio(spec.l, spec.gamma, spec.delta_exp))
    prefactor = ((-1) ** spec.m * factorial(spec.m - spec.l) * factorial(spec.l) / ratio
                 * gamma_ratio([], [spec.m - spec.l - spec.mu, spec.l - spec.nu]))
    return prefactor * total / delta ** (spec.mu + spec.nu)


def w_delta_square(f: ScalarField2D, x: float, y: float, spec: FracSpec, delta: float,
                   n_nodes: int = 32, method: FracMethod = FracMethod.KERNEL,
                   kappa: float = DECAY_RATE) -> float:
    """Finite-delta fractional Jacobi derivative on the square; f must decay like exp(-kappa (x + y))"""
    if not Validator.validate_delta(delta):
        raise ParameterError(f"delta must be positive, got {delta}")
    if method is FracMethod.KERNEL:
        return _square_kernel(f, x, y, spec, delta, n_nodes, kappa)
    g = weyl_integral(f, spec.m - spec.l - spec.mu, spec.l - spec.nu, kappa, n_nodes)
    return (-1) ** spec.m * d_delta_square(g, x, y, spec.jacobi, delta)


# --- Triangle --------------------------------------------------------------

def _unit_leg(n_nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    rule = leg(n_nodes, 0.0, 1.0)
    return rule.x, rule.w


def _tensor(first, second):
    (x1, w1), (x2, w2) = first, second
    return np.repeat(x1, x2.size), np.tile(x2, x1.size), np.outer(w1, w2).ravel()


def triangle_outer_nodes(n_nodes: int, s_max: float):
    """(region, s, t, weight, outermost) node sets covering the first quadrant up to s_max"""
    sets = []
    xi, eta, w = _tensor(_unit_leg(n_nodes), _unit_leg(n_nodes))
    sets.append((RegionTag.I, xi, (1 - xi) * eta, w * (1 - xi), np.zeros(xi.size, dtype=bool)))
    sets.append((RegionTag.V, xi, 1 - xi + xi * eta, w * xi, np.zeros(xi.size, dtype=bool)))
    pieces = _tail_pieces(n_nodes, s_max)
    outer = len(pieces) - 1
    for i, piece in enumerate(pieces):
        s, t, w = _tensor(_unit_leg(n_nodes), piece)
        sets.append((RegionTag.III, s, t, w, np.full(s.size, i == outer)))
        t, s, w = _tensor(_unit_leg(n_nodes), piece)
        sets.append((RegionTag.IV, s, t, w, np.full(s.size, i == outer)))
        for j, other in enumerate(pieces):
            s, t, w = _tensor(piece, other)
            sets.append((RegionTag.II, s, t, w, np.full(s.size, outer in (i, j))))
    return sets


@lru_cache(maxsize=8)
def triangle_kernel_table(source: KernelSource, dp: DerivativeParams, n_nodes: int, s_max: float,
                          oracle_nodes: int = ORACLE_NODES):
    """(s, t, weight, outermost, kernel) per node set of triangle_outer_nodes.

    The table depends on delta only through s_max, so every point of a grid reuses it.
    """
    p = KernelParams.from_derivative(dp)
    table = []
    for region, s, t, w, outer in triangle_outer_nodes(n_nodes, s_max):
        if source is KernelSource.CLOSED:
            kernels = kernel_closed_form_array(region, p, s, t)
        else:
            kernels = np.array([derivative_kernel_oracle(dp, si, ti, oracle_nodes) for si, ti in zip(s, t)])
        if not np.all(np.isfinite(kernels)):
            raise DivergenceError(f"region {region.value} kernel is not finite at some nodes")
        logger.debug(f"kernel table: {s.size} nodes in region {region.value}")
        for array in (s, t, w, outer, kernels):
            array.setflags(write=False)
        table.append((s, t, w, outer, kernels))
    return table


def _triangle_kernel(f, x, y, spec: TriangleFracSpec, n_nodes, kappa, source,
                     oracle_nodes) -> float:
    dp, delta = spec.params, spec.delta
    total = 0.0
    tail = 0.0
    for s, t, w, outer, kernels in triangle_kernel_table(source, dp, n_nodes, tail_limit(delta, kappa),
                                                         oracle_nodes):
        values = sample_field(f, x + delta * s, y + delta * t)
        contribution = w * values * kernels
        total += float(np.sum(contribution))
        tail += float(np.sum(contribution[outer]))
    _check_tail(total, tail, "triangle fractional derivative")
    weight = dp.weight
    # h1 / (Gamma(-mu) Gamma(-nu)) with h1 = 1 / B(alpha+1+k, beta+1+n-k, gamma+1+n)
    prefactor = gamma_ratio([weight.alpha + weight.beta + weight.gamma + 3 + 2 * dp.n],
                            [weight.alpha + 1 + dp.k, weight.beta + 1 + dp.n - dp.k, weight.gamma + 1 + dp.n,
                             -dp.mu, -dp.nu])
    return prefactor * total / delta ** (dp.mu + dp.nu)


def w_delta_triangle(f: ScalarField2D, x: float, y: float, spec: TriangleFracSpec,
                     n_nodes: int = 24, method: FracMethod = FracMethod.WEYL,
                     kappa: float = DECAY_RATE, source: KernelSource = KernelSource.CLOSED,
                     oracle_nodes: int = ORACLE_NODES) -> float:
    """Finite-delta fractional biorthogonal derivative on the triangle.

    The Weyl method takes the integer-order triangle derivative of the Weyl
    fractional integral of f; the kernel method integrates f against the
    region kernels I1..I6 over the first quadrant.
    """
    if method is FracMethod.KERNEL:
        return _triangle_kernel(f, x, y, spec, n_nodes, kappa, source, oracle_nodes)
    dp = spec.params
    g = weyl_integral(f, dp.k - dp.mu, dp.n - dp.k - dp.nu, kappa, n_nodes)
    deriv = TriangleDerivSpec(dp.weight, dp.k, dp.n, spec.delta)
    return (-1) ** dp.n * d_delta_triangle(g, x, y, deriv)


def delta_halving(start: float, steps: int) -> List[float]:
    """start, start/2, ..., steps values"""
    return [start / 2 ** i for i in range(steps)]


def relative_error(value: float, reference: float) -> float:
    scale = abs(reference) if reference != 0.0 else 1.0
    return abs(value - reference) / scale


def eigen_errors(apply: Callable[[float], float], x: float, y: float,
                 deltas: List[float]) -> List[Tuple[float, float]]:
    """(delta, relative error against exp(-x-y)) for the operator applied to exp(-x-y)"""
    reference = float(np.exp(-x - y))
    return [(delta, relative_error(apply(delta), reference)) for delta in deltas]


def triangle_exp_decay_factor(dp: DerivativeParams, delta: float) -> float:
    """W_delta exp(-x-y) / exp(-x-y) on the triangle.

    exp(-delta (u + v)) integrates against the biorthogonal weight to
    1F1(a + b; a + b + 1 - e; -delta) with the kernel parameters of dp, so the
    eigenvalue reaches 1 only as delta -> 0.
    """
    p = KernelParams.from_derivative(dp)
    return float(special.hyp1f1(p.a + p.b, p.a + p.b + 1 - p.e, -delta))
