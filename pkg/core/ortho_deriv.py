"""Finite-delta orthogonal derivatives on the square and on the triangle."""
import logging
from dataclasses import dataclass
from math import factorial
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from utils.validators import Validator

from .errors import ParameterError, RegionError
from .quad_oracle import ScalarField2D, gauss_jacobi_rule, integrate_triangle
from .scalar_special import pochhammer
from .triangle_basis import BasisIndex, TriangleWeight, u_poly

logger = logging.getLogger(__name__)

MAX_JACOBI_ORDER = 12


@dataclass(frozen=True)
class SquareJacobiSpec:
    """Product Jacobi weight (1-u)^alpha (1+u)^beta (1-v)^gamma (1+v)^delta_exp, orders (m, l)"""
    alpha: float
    beta: float
    gamma: float
    delta_exp: float
    m: int
    l: int

    def __post_init__(self):
        Validator.require_exponents(alpha=self.alpha, beta=self.beta,
                                    gamma=self.gamma, delta_exp=self.delta_exp)
        if self.m < 0 or self.l < 0:
            raise ParameterError(f"derivative orders must be >= 0, got ({self.m}, {self.l})")


@dataclass(frozen=True)
class TriangleDerivSpec:
    weight: TriangleWeight
    k: int
    n: int
    delta: float

    def __post_init__(self):
        Validator.require_index(self.k, self.n)
        if not Validator.validate_delta(self.delta):
            raise ParameterError(f"delta must be positive, got {self.delta}")


def sample_field(f: ScalarField2D, x, y) -> np.ndarray:
    """f on a sampling grid; non-finite samples mean the grid left f's domain"""
    values = np.asarray(f(x, y), dtype=float)
    values = np.broadcast_to(values, np.broadcast(x, y).shape)
    if not np.all(np.isfinite(values)):
        raise RegionError("test function is not finite on the sampling domain")
    return values


def jacobi_norm_ratio(order: int, alpha: float, beta: float, n_nodes: Optional[int] = None) -> float:
    """h/k for P_order^{(alpha, beta)}: the integral of P_order(u) u^order against the Jacobi weight"""
    if not 0 <= order <= MAX_JACOBI_ORDER:
        raise ParameterError(f"Jacobi order must be in [0, {MAX_JACOBI_ORDER}], got {order}")
    rule = gauss_jacobi_rule(n_nodes or 2 * order + 16, alpha, beta)
    values = special.eval_jacobi(order, alpha, beta, rule.nodes) * rule.nodes ** order
    return float(np.sum(rule.weights * values))


def _axis_factor(order: int, alpha: float, beta: float, n_nodes: int) -> float:
    return factorial(order) / jacobi_norm_ratio(order, alpha, beta, n_nodes)


def d_delta_square(f: ScalarField2D, x: float, y: float, spec: SquareJacobiSpec, delta: float,
                   n_nodes: Optional[int] = None) -> float:
    """Approximation of d^{m+l} f / dx^m dy^l from samples on [x-delta, x+delta] x [y-delta, y+delta]"""
    if not Validator.validate_delta(delta):
        raise ParameterError(f"delta must be positive, got {delta}")
    n_nodes = n_nodes or 2 * max(spec.m, spec.l) + 16
    rule_u = gauss_jacobi_rule(n_nodes, spec.alpha, spec.beta)
    rule_v = gauss_jacobi_rule(n_nodes, spec.gamma, spec.delta_exp)
    weight_u = rule_u.weights * special.eval_jacobi(spec.m, spec.alpha, spec.beta, rule_u.nodes)
    weight_v = rule_v.weights * special.eval_jacobi(spec.l, spec.gamma, spec.delta_exp, rule_v.nodes)
    grid_x, grid_y = np.meshgrid(x + delta * rule_u.nodes, y + delta * rule_v.nodes, indexing="ij")
    integral = float(weight_u @ sample_field(f, grid_x, grid_y) @ weight_v)
    scale = (_axis_factor(spec.m, spec.alpha, spec.beta, n_nodes)
             * _axis_factor(spec.l, spec.gamma, spec.delta_exp, n_nodes))
    return scale * integral / delta ** (spec.m + spec.l)


def d_delta_triangle(f: ScalarField2D, x: float, y: float, spec: TriangleDerivSpec,
                     n_nodes: Optional[int] = None) -> float:
    """Approximation of d^n f / dx^k dy^{n-k} from samples on (x, y) + delta * triangle"""
    w, k, n = spec.weight, spec.k, spec.n
    idx = BasisIndex(k, n)
    # B(alpha+1, beta+1, gamma+1) / B(alpha+1+k, beta+1+n-k, gamma+1+n)
    ratio = pochhammer(w.alpha + w.beta + w.gamma + 3, 2 * n) / (
        pochhammer(w.alpha + 1, k) * pochhammer(w.beta + 1, n - k) * pochhammer(w.gamma + 1, n))
    delta = spec.delta

    def integrand(u, v):
        return sample_field(f, x + delta * u, y + delta * v) * u_poly(idx, w, u, v)

    integral = integrate_triangle(integrand, w, n_nodes or 2 * n + 16)
    return (-1) ** n * ratio * integral / delta ** n


def delta_convergence(apply: Callable[[float], float], deltas: Sequence[float],
                      reference: float) -> List[Tuple[float, float, float]]:
    """(delta, value, |value - reference|) for each delta, in the given order"""
    rows = []
    for delta in deltas:
        value = apply(delta)
        rows.append((delta, value, abs(value - reference)))
        logger.debug(f"delta={delta:g}: value={value:.12g}, error={abs(value - reference):.3e}")
    return rows


def is_monotone_refinement(rows: Sequence[Tuple[float, float, float]]) -> bool:
    """True when the error strictly decreases along rows ordered by decreasing delta"""
    errors = [row[2] for row in rows]
    return all(later < earlier for earlier, later in zip(errors, errors[1:]))
