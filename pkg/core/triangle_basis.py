"""Biorthogonal polynomial systems U and V on the triangle 0 <= x, y, x + y <= 1."""
import logging
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import List, Tuple

import numpy as np

from utils.validators import Validator

from .config import DEFAULT_TOL, TRIANGLE_DEGREE_CAP
from .errors import RegionError
from .hyp2var import TermSpec, double_series, f2
from .quad_oracle import integrate_triangle
from .scalar_special import beta3, pochhammer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TriangleWeight:
    """Normalized weight x^alpha y^beta (1-x-y)^gamma / B(alpha+1, beta+1, gamma+1)"""
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        Validator.require_exponents(alpha=self.alpha, beta=self.beta, gamma=self.gamma)

    @property
    def mass(self) -> float:
        return beta3(self.alpha + 1, self.beta + 1, self.gamma + 1)

    def density(self, x, y):
        return x ** self.alpha * y ** self.beta * (1 - x - y) ** self.gamma / self.mass


@dataclass(frozen=True)
class BasisIndex:
    """U-family index with 0 <= k <= n"""
    k: int
    n: int

    def __post_init__(self):
        Validator.require_index(self.k, self.n)


def _warn_degree(n: int):
    if n > TRIANGLE_DEGREE_CAP:
        logger.warning(f"triangle basis degree {n} exceeds {TRIANGLE_DEGREE_CAP}; "
                       f"Pochhammer growth makes values unreliable")


def _check_simplex(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    eps = 1e-12
    if np.any(x < -eps) or np.any(y < -eps) or np.any(x + y > 1 + eps):
        raise RegionError("U polynomials are evaluated on the triangle 0 <= x, y, x + y <= 1")
    return x, y


@lru_cache(maxsize=256)
def _u_coefficients(k: int, n: int, w: TriangleWeight) -> Tuple[Tuple[int, int, float], ...]:
    """Coefficients c_ij of U = sum c_ij (-x)^i (-y)^j (1-x-y)^{n-i-j}"""
    lead = pochhammer(w.alpha + 1, k) * pochhammer(w.beta + 1, n - k)
    table = []
    for i in range(k + 1):
        for j in range(n - k + 1):
            coef = (pochhammer(-w.gamma - n, i + j) * pochhammer(-k, i) * pochhammer(k - n, j)
                    / (pochhammer(w.alpha + 1, i) * pochhammer(w.beta + 1, j)
                       * factorial(i) * factorial(j)))
            if coef != 0.0:
                table.append((i, j, lead * coef))
    return tuple(table)


def u_poly(idx: BasisIndex, w: TriangleWeight, x, y):
    """U_{k,n}(x, y), a polynomial of total degree n.

    The F2 of the closed form is rewritten by its (1-x-y) transformation into a
    terminating double sum, so the (1-x-y)^{-gamma} prefactor cancels exactly.
    """
    _warn_degree(idx.n)
    x, y = _check_simplex(x, y)
    rest = 1.0 - x - y
    total = np.zeros(np.broadcast(x, y).shape)
    for i, j, coef in _u_coefficients(idx.k, idx.n, w):
        total = total + coef * (-x) ** i * (-y) ** j * rest ** (idx.n - i - j)
    return float(total) if total.ndim == 0 else total


def u_poly_f2(idx: BasisIndex, w: TriangleWeight, x: float, y: float,
              tol: float = DEFAULT_TOL) -> float:
    """U_{k,n} through (alpha+1)_k (beta+1)_{n-k} (1-x-y)^{-gamma} F2(-gamma-n; ...; x, y)"""
    k, n = idx.k, idx.n
    _check_simplex(x, y)
    lead = pochhammer(w.alpha + 1, k) * pochhammer(w.beta + 1, n - k)
    series = f2(-w.gamma - n, w.alpha + 1 + k, w.beta + 1 + n - k, w.alpha + 1, w.beta + 1, x, y, tol)
    return lead * (1.0 - x - y) ** (-w.gamma) * series.value


def _shift(w: TriangleWeight) -> float:
    return w.alpha + w.beta + w.gamma + 2


def v_poly(m: int, n: int, w: TriangleWeight, x, y):
    """V_{m,n}(x, y) = x^m y^n + lower-degree terms, as its finite double sum"""
    if m < 0 or n < 0:
        Validator.require_index(0, min(m, n))
    _warn_degree(m + n)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    S = _shift(w)
    lead = pochhammer(w.alpha + 1, m) * pochhammer(w.beta + 1, n) / pochhammer(S, 2 * m + 2 * n)
    total = np.zeros(np.broadcast(x, y).shape)
    for i in range(m + 1):
        for j in range(n + 1):
            coef = ((-1) ** (m + n + i + j) * comb(m, i) * comb(n, j) * pochhammer(S, m + n + i + j)
                    / (pochhammer(w.alpha + 1, i) * pochhammer(w.beta + 1, j)))
            total = total + lead * coef * x ** i * y ** j
    return float(total) if total.ndim == 0 else total


def v_poly_f2(m: int, n: int, w: TriangleWeight, x: float, y: float) -> float:
    """V_{m,n} through the terminating F2(S+m+n; -m, -n; alpha+1, beta+1; x, y)"""
    S = _shift(w)
    lead = ((-1) ** (m + n) * pochhammer(w.alpha + 1, m) * pochhammer(w.beta + 1, n)
            * pochhammer(S, m + n) / pochhammer(S, 2 * m + 2 * n))
    spec = TermSpec(ij_num=(S + m + n,), i_num=(-m,), j_num=(-n,),
                    i_den=(w.alpha + 1,), j_den=(w.beta + 1,))
    return lead * double_series(spec, x, y).value


def biortho_constant(k: int, n: int, w: TriangleWeight) -> float:
    """<U_{k,n}, V_{k,n-k}> in closed form"""
    Validator.require_index(k, n)
    return ((-1) ** n * pochhammer(w.alpha + 1, k) * pochhammer(w.beta + 1, n - k)
            * pochhammer(w.gamma + 1, n) * factorial(k) * factorial(n - k)
            / pochhammer(w.alpha + w.beta + w.gamma + 3, 2 * n))


def basis_indices(n_max: int) -> List[Tuple[int, int]]:
    """(n, k) pairs in the row order of pairing_matrix"""
    return [(n, k) for n in range(n_max + 1) for k in range(n + 1)]


def pairing_matrix(n_max: int, m_max: int, w: TriangleWeight, n_nodes: int = 32) -> np.ndarray:
    """Gram matrix <U_{k,n}, V_{j,m-j}>; rows follow basis_indices(n_max), columns basis_indices(m_max)"""
    _warn_degree(max(n_max, m_max))
    rows = basis_indices(n_max)
    cols = basis_indices(m_max)
    matrix = np.empty((len(rows), len(cols)))
    for r, (n, k) in enumerate(rows):
        u_index = BasisIndex(k, n)
        for c, (m, j) in enumerate(cols):
            matrix[r, c] = integrate_triangle(
                lambda u, v: u_poly(u_index, w, u, v) * v_poly(j, m - j, w, u, v), w, n_nodes)
    return matrix
