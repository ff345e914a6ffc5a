"""Two-variable hypergeometric functions: Appell F1/F2/F3, the extended F3, Horn H2
and Olsson's F_P, F_Q and F_PR, with their convergence regions and continuations.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_TOL, INTEGRAL_NODES, MAX_DIAGONALS, NEAR_INTEGER, REGION_MARGIN
from .errors import DivergenceError, ParameterError, PoleError, RegionError
from .quad_oracle import finite_diff_partial, leg
from .scalar_special import (
    PATIENCE,
    LogTerms,
    SeriesAccumulator,
    SeriesValue,
    gamma_ratio,
    hyp2f1,
    hyp2f1_array,
    hyp2f1_connection,
    hyp2f1_connection_array,
    hyp3f2_unit,
    hyper_terms,
    termination_order,
)

logger = logging.getLogger(__name__)

# Rate below which the raw series is used without looking for a faster route
SERIES_RATE = 0.9
# Rate above which an integral representation is preferred when its conditions hold
SLOW_RATE = 0.97
# Single-sum rate below which no integral route is tried
FAST_SUM_RATE = 0.5
# Gauss nodes per piece of the single-integral routes
EULER_NODES = 24
# Diagonal counts of the array series, smallest first
DIAGONAL_LEVELS = (16, 32, 64, 128, 256)
# Points per block of the array series
ARRAY_CHUNK = 2048

M = REGION_MARGIN


class Hyp2Kind(Enum):
    """Two-variable functions exposed by this module"""
    F1 = "F1"
    F2 = "F2"
    F3 = "F3"
    F3EXT = "F3ext"
    H2 = "H2"
    FP = "FP"
    FQ = "FQ"
    FPR = "FPR"


ARITY: Dict[Hyp2Kind, int] = {
    Hyp2Kind.F1: 4,
    Hyp2Kind.F2: 5,
    Hyp2Kind.F3: 5,
    Hyp2Kind.F3EXT: 7,
    Hyp2Kind.H2: 5,
    Hyp2Kind.FP: 5,
    Hyp2Kind.FQ: 5,
    Hyp2Kind.FPR: 5,
}


class RegionStatus(Enum):
    """Where a point lies relative to a function's series and continuation regions"""
    INSIDE_SERIES = "inside_series"
    INSIDE_CONTINUATION = "inside_continuation"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class Hyp2Params:
    kind: Hyp2Kind
    params: Tuple[float, ...]
    x: float
    y: float

    def __post_init__(self):
        expected = ARITY[self.kind]
        if len(self.params) != expected:
            raise ParameterError(
                f"{self.kind.value} takes {expected} parameters, got {len(self.params)}")


@dataclass(frozen=True)
class TermSpec:
    """Pochhammer layout of a double-series term.

    Parameters in the *_num / *_den tuples enter as (p)_i, (p)_j, (p)_{i+j} or
    (p)_{i-j} in numerator or denominator; the term also carries x^i y^j / (i! j!).
    """
    i_num: Tuple[float, ...] = ()
    i_den: Tuple[float, ...] = ()
    j_num: Tuple[float, ...] = ()
    j_den: Tuple[float, ...] = ()
    ij_num: Tuple[float, ...] = ()
    ij_den: Tuple[float, ...] = ()
    imj_num: Tuple[float, ...] = ()
    imj_den: Tuple[float, ...] = ()

    def degree_bound(self) -> Optional[int]:
        """Largest total degree with a nonzero term, when the series terminates"""
        bounds = []
        along_sum = termination_order(*self.ij_num)
        if along_sum is not None:
            bounds.append(along_sum)
        along_i = termination_order(*self.i_num)
        along_j = termination_order(*self.j_num)
        if along_i is not None and along_j is not None:
            bounds.append(along_i + along_j)
        return min(bounds) if bounds else None


def _coefficients(spec: TermSpec, i: np.ndarray, j: np.ndarray) -> LogTerms:
    """Coefficients of the terms (i, j) of spec in log space, without the powers of x and y"""
    d = i + j
    terms = LogTerms(i.shape)
    for p in spec.i_num:
        terms.rising(p, i)
    for p in spec.i_den:
        terms.falling(p, i)
    for p in spec.j_num:
        terms.rising(p, j)
    for p in spec.j_den:
        terms.falling(p, j)
    for p in spec.ij_num:
        terms.rising(p, d)
    for p in spec.ij_den:
        terms.falling(p, d)
    for p in spec.imj_num:
        terms.rising(p, i - j)
    for p in spec.imj_den:
        terms.falling(p, i - j)
    return terms.factorial(i).factorial(j)


def _diagonal_terms(spec: TermSpec, x: float, y: float, d0: int, d1: int):
    """Terms of the diagonals d0 <= i+j < d1, flattened, with the diagonal of each term"""
    i = np.concatenate([np.arange(d + 1) for d in range(d0, d1)]).astype(float)
    d = np.repeat(np.arange(d0, d1), np.arange(d0, d1) + 1).astype(float)
    j = d - i
    values = _coefficients(spec, i, j).power(x, i).power(y, j).values()
    return values, (d - d0).astype(int)


def double_series(spec: TermSpec, x: float, y: float, tol: float = DEFAULT_TOL,
                  max_diagonals: int = MAX_DIAGONALS) -> SeriesValue:
    """Sum of a double series by total degree.

    Stops once PATIENCE consecutive diagonals have absolute sum <= tol * |sum|;
    terminating layouts are summed exactly.
    """
    bound = spec.degree_bound()
    if bound is not None:
        values, _ = _diagonal_terms(spec, x, y, 0, bound + 1)
        return SeriesValue.exact(float(np.sum(values)), values.size)
    acc = SeriesAccumulator(tol)
    peak = 0.0
    terms = 0
    start = 0
    block = 16
    while start < max_diagonals:
        stop = min(start + block, max_diagonals)
        values, index = _diagonal_terms(spec, x, y, start, stop)
        sums = np.bincount(index, weights=values, minlength=stop - start)
        sizes = np.bincount(index, weights=np.abs(values), minlength=stop - start)
        for offset in range(stop - start):
            acc.total += sums[offset]
            terms += start + offset + 1
            peak = max(peak, sizes[offset])
            scale = abs(acc.total) if acc.total != 0.0 else peak
            if sizes[offset] <= acc.tol * scale:
                acc.tail = max(acc.tail, sizes[offset]) if acc.small_run else sizes[offset]
                acc.small_run += 1
                if acc.small_run >= acc.patience:
                    acc.count = terms
                    return acc.result(True)
            else:
                acc.small_run = 0
        start = stop
        block = min(2 * block, 256)
    acc.count = terms
    acc.tail = max(acc.tail, float(sizes[-1]))
    logger.warning(f"double series at ({x}, {y}) hit the {max_diagonals}-diagonal cap")
    return acc.result(False)


def double_series_array(spec: TermSpec, x: np.ndarray, y: np.ndarray, diagonals: int,
                        tol: float = DEFAULT_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """Sums of spec over i + j < diagonals at every point of the 1-D arrays (x, y).

    Also returns the mask of points whose last PATIENCE diagonals stay below
    tol * |sum|, the stopping rule of double_series. Terminating layouts are exact.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    bound = spec.degree_bound()
    exact = bound is not None
    size = bound + 1 if exact else diagonals
    i, j = np.divmod(np.arange(size * size), size)
    keep = i + j < size
    coef = np.zeros(size * size)
    coef[keep] = _coefficients(spec, i[keep].astype(float), j[keep].astype(float)).values()
    coef = coef.reshape(size, size)
    k = np.arange(size)
    values = np.empty(x.shape)
    ok = np.ones(x.shape, dtype=bool)
    for start in range(0, x.size, ARRAY_CHUNK):
        part = slice(start, start + ARRAY_CHUNK)
        xp = x[part][:, None] ** k
        yp = y[part][:, None] ** k
        values[part] = np.sum((xp @ coef) * yp, axis=1)
        if exact:
            continue
        tail = np.zeros(xp.shape[0])
        for d in range(size - PATIENCE, size):
            idx = np.arange(d + 1)
            diagonal = np.abs(coef[idx, d - idx] * xp[:, idx] * yp[:, d - idx]).sum(axis=1)
            tail = np.maximum(tail, diagonal)
        ok[part] = tail <= tol * np.abs(values[part])
    return values, ok


def _series_by_rate(spec: TermSpec, x: np.ndarray, y: np.ndarray, rate: np.ndarray,
                    tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """double_series_array with a diagonal count per point taken from its decay rate"""
    need = math.log(tol * 1e-2) / np.log(np.clip(rate, 1e-300, 1.0 - M)) + 8
    values = np.zeros(x.shape)
    ok = np.zeros(x.shape, dtype=bool)
    done = np.zeros(x.shape, dtype=bool)
    for level in DIAGONAL_LEVELS:
        members = ~done & (need <= level)
        if np.any(members):
            values[members], ok[members] = double_series_array(spec, x[members], y[members], level, tol)
            done |= members
    return values, ok


def _fill_scalar(values: np.ndarray, ok: np.ndarray, scalar: Callable[[float, float], float],
                 x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Replaces every point outside ok (or not finite) by the scalar route"""
    ok = ok & np.isfinite(values)
    rest = np.flatnonzero(~ok)
    if rest.size:
        logger.debug(f"{rest.size} of {values.size} points left to the scalar route")
    for idx in rest:
        values[idx] = scalar(float(x[idx]), float(y[idx]))
    return values


def _outer_sum(ratio: Callable[[int], float], inner: Callable[[int], SeriesValue],
               tol: float, max_terms: int = MAX_DIAGONALS) -> SeriesValue:
    """sum_j c_j inner(j) with c_0 = 1 and c_{j+1} = c_j ratio(j)"""
    acc = SeriesAccumulator(tol)
    coef = 1.0
    inner_err = 0.0
    inner_ok = True
    for j in range(max_terms):
        if coef == 0.0:
            return SeriesValue(acc.total, acc.count, inner_err, inner_ok)
        part = inner(j)
        inner_err = max(inner_err, part.err_estimate)
        inner_ok = inner_ok and part.converged
        if acc.add(coef * part.value):
            result = acc.result(True)
            err = max(result.err_estimate, inner_err)
            return SeriesValue(result.value, result.terms_used, err, inner_ok)
        coef *= ratio(j)
    logger.warning(f"single-sum continuation hit the {max_terms}-term cap")
    result = acc.result(False)
    return SeriesValue(result.value, result.terms_used, max(result.err_estimate, inner_err), False)


def _outer_sum_array(ratio: Callable[[int], float], y: np.ndarray,
                     inner: Callable[[int], np.ndarray], tol: float,
                     max_terms: int = 1000) -> Tuple[np.ndarray, np.ndarray]:
    """_outer_sum at every point with c_j y^j in place of c_j; also returns the converged mask"""
    total = np.zeros(y.shape)
    power = np.ones(y.shape)
    small = np.zeros(y.shape, dtype=int)
    coef = 1.0
    for j in range(max_terms):
        if coef == 0.0:
            return total, np.ones(y.shape, dtype=bool)
        term = coef * power * inner(j)
        total += term
        small = np.where(np.abs(term) <= tol * np.abs(total), small + 1, 0)
        if np.all(small >= PATIENCE):
            break
        coef *= ratio(j)
        power = power * y
    return total, small >= PATIENCE


def _beta_mean(integrand: Callable, exponents: Sequence[Tuple[float, float]], tol: float,
               n_nodes: int = INTEGRAL_NODES) -> SeriesValue:
    """Mean of integrand over the unit cube against prod u^{p-1} (1-u)^{q-1}.

    integrand receives one (u, 1-u) pair per axis on a broadcast grid. The rule is
    applied at n and 2n nodes per axis; their difference is the error estimate.
    """
    estimates = []
    for n in (n_nodes, 2 * n_nodes):
        legs = [leg(n, 0.0, 1.0, p - 1.0, q - 1.0) for p, q in exponents]
        dims = len(legs)
        axes = []
        for k, rule in enumerate(legs):
            shape = [1] * dims
            shape[k] = n
            axes.append((rule.x.reshape(shape), rule.to_hi.reshape(shape)))
        weights = reduce(np.multiply.outer, [rule.w / rule.w.sum() for rule in legs])
        estimates.append(float(np.sum(weights * integrand(*axes))))
    coarse, fine = estimates
    scale = abs(fine) if fine != 0.0 else 1.0
    err = abs(fine - coarse) / scale
    return SeriesValue(fine, sum(n ** len(exponents) for n in (n_nodes, 2 * n_nodes)), err, err <= tol)


# --- Euler-type single integrals --------------------------------------------
# int_0^1 u^{lower-1} (1-u)^{q-1} (1-xu)^{-a} G(zeta(u)) du with G a Gauss function.
# For q <= 0 the integral is read as its finite part at u = 1, which continues it
# analytically in q.

def _euler_allowed(lower: float, q: float) -> bool:
    return lower > 0 and not (round(q) <= 0 and abs(q - round(q)) < NEAR_INTEGER)


def _subtracted_terms(q: float) -> int:
    """Taylor terms removed at u = 1 so that (1-u)^{q-1+m} is integrable"""
    return 0 if q > 0 else int(math.floor(-q)) + 1


def _gauss_derivatives(a: float, b: float, c: float, z0: float, m: int, tol: float) -> np.ndarray:
    """2F1^{(r)}(a, b; c; z0) / r! for r < m"""
    shifted = np.array([hyp2f1(a + r, b + r, c + r, z0, tol).value for r in range(m)])
    return hyper_terms((a, b), (c,), 1.0, np.arange(m)) * shifted if m else shifted


def _compose(outer: np.ndarray, shift: np.ndarray) -> np.ndarray:
    """Taylor coefficients of sum_r outer[r] s(e)^r, where shift holds s(e) with s(0) = 0"""
    m = outer.size
    result = np.zeros(m)
    power = np.zeros(m)
    if m:
        power[0] = 1.0
    for r in range(m):
        result += outer[r] * power
        power = np.convolve(power, shift)[:m]
    return result


def _euler_taylor(lower: float, a: float, x: float, outer: np.ndarray, shift: np.ndarray) -> np.ndarray:
    """Taylor coefficients in e = 1-u of u^{lower-1} (1-xu)^{-a} G(zeta(u)).

    outer holds G^{(r)}(zeta(1)) / r! and shift the coefficients of zeta(1-e) - zeta(1).
    """
    m = outer.size
    if m == 0:
        return np.zeros(0)
    k = np.arange(m)
    power = hyper_terms((1.0 - lower,), (), 1.0, k)
    base = (1.0 - x) ** (-a) * hyper_terms((a,), (), -x / (1.0 - x), k)
    return reduce(lambda p, f: np.convolve(p, f)[:m], [power, base, _compose(outer, shift)])


def _graded_breaks(singular: Sequence[float]) -> np.ndarray:
    """Piece ends on [0, 1]: 1/2 plus breaks r, 4r, 16r, ... away from the end nearest each
    singular point, r being its distance to that end"""
    breaks = {0.0, 0.5, 1.0}
    for p in singular:
        if 0.0 <= p <= 1.0:
            raise RegionError(f"integrand is singular at u={p} inside the interval")
        r = -p if p < 0.0 else p - 1.0
        while r < 0.5:
            breaks.add(r if p < 0.0 else 1.0 - r)
            r *= 4.0
    return np.array(sorted(breaks))


def _finite_part_sum(h: Callable[[np.ndarray], np.ndarray], lower: float, q: float,
                     taylor: np.ndarray, breaks: np.ndarray, n: int) -> float:
    m = taylor.size
    first = leg(n, 0.0, breaks[1], lower - 1.0, 0.0)
    total = float(np.sum(first.w * (1.0 - first.x) ** (q - 1.0) * h(first.x)))
    for lo, hi in zip(breaks[1:-2], breaks[2:-1]):
        rule = leg(n, lo, hi)
        rest = (1.0 - hi) + rule.to_hi
        total += float(np.sum(rule.w * rule.x ** (lower - 1.0) * rest ** (q - 1.0) * h(rule.x)))
    last = leg(n, breaks[-2], 1.0, 0.0, q + m - 1.0)
    values = last.x ** (lower - 1.0) * h(last.x)
    if m:
        eps = last.to_hi
        values = (values - np.polynomial.polynomial.polyval(eps, taylor)) / eps ** m
        k = np.arange(m)
        width = 1.0 - breaks[-2]
        total += float(np.sum(taylor * width ** (q + k) / (q + k)))
    return total + float(np.sum(last.w * values))


def _euler_integral(h: Callable[[np.ndarray], np.ndarray], lower: float, q: float,
                    taylor: np.ndarray, singular: Sequence[float], tol: float,
                    n_nodes: int) -> SeriesValue:
    """Finite-part integral at n and 2n nodes per piece; their difference is the error estimate"""
    breaks = _graded_breaks(singular)
    coarse, fine = (_finite_part_sum(h, lower, q, taylor, breaks, n) for n in (n_nodes, 2 * n_nodes))
    scale = abs(fine) if fine != 0.0 else 1.0
    err = abs(fine - coarse) / scale
    return SeriesValue(fine, 3 * n_nodes * (breaks.size - 1), err, err <= tol)


def _rate(*parts: float) -> float:
    return sum(abs(p) for p in parts)


# --- Appell F1 -------------------------------------------------------------

def f1(a: float, b1: float, b2: float, c: float, x: float, y: float,
       tol: float = DEFAULT_TOL) -> SeriesValue:
    """Appell F1(a; b1, b2; c; x, y) for |x| < 1, |y| < 1"""
    if not (abs(x) < 1 - M and abs(y) < 1 - M):
        raise RegionError(f"F1 needs |x| < 1 and |y| < 1, got ({x}, {y})")
    return double_series(TermSpec(ij_num=(a,), i_num=(b1,), j_num=(b2,), ij_den=(c,)), x, y, tol)


# --- Appell F2 -------------------------------------------------------------

def _f2_spec(a, b1, b2, c1, c2) -> TermSpec:
    return TermSpec(ij_num=(a,), i_num=(b1,), j_num=(b2,), i_den=(c1,), j_den=(c2,))


def f2_series(a: float, b1: float, b2: float, c1: float, c2: float, x: float, y: float,
              tol: float = DEFAULT_TOL) -> SeriesValue:
    """Raw F2 double series, |x| + |y| < 1"""
    if _rate(x, y) >= 1 - M:
        raise RegionError(f"F2 series needs |x| + |y| < 1, got ({x}, {y})")
    return double_series(_f2_spec(a, b1, b2, c1, c2), x, y, tol)


def _f2_transform(which: int, a, b1, b2, c1, c2, x, y):
    """(prefactor, parameters, arguments) of the three Euler-type F2 transformations"""
    if which == 1:
        return (1 - x) ** (-a), (a, c1 - b1, b2, c1, c2), (x / (x - 1), y / (1 - x))
    if which == 2:
        return (1 - y) ** (-a), (a, b1, c2 - b2, c1, c2), (x / (1 - y), y / (y - 1))
    if which == 3:
        w = x + y - 1
        return (1 - x - y) ** (-a), (a, c1 - b1, c2 - b2, c1, c2), (x / w, y / w)
    raise ParameterError(f"F2 transformation must be 1, 2 or 3, got {which}")


def f2_transformed(which: int, a: float, b1: float, b2: float, c1: float, c2: float,
                   x: float, y: float, tol: float = DEFAULT_TOL) -> SeriesValue:
    _check_f2_region(x, y)
    factor, params, (u, v) = _f2_transform(which, a, b1, b2, c1, c2, x, y)
    return f2_series(*params, u, v, tol).scaled(factor)


def f2_integral(a: float, b1: float, b2: float, c1: float, c2: float, x: float, y: float,
                tol: float = DEFAULT_TOL, n_nodes: int = INTEGRAL_NODES) -> SeriesValue:
    """Double-integral representation, valid for c1 > b1 > 0 and c2 > b2 > 0"""
    _check_f2_region(x, y)
    if not (c1 > b1 > 0 and c2 > b2 > 0):
        raise ParameterError("F2 integral needs c1 > b1 > 0 and c2 > b2 > 0")
    return _beta_mean(lambda u, v: (1.0 - u[0] * x - v[0] * y) ** (-a),
                      [(b1, c1 - b1), (b2, c2 - b2)], tol, n_nodes)


def f2_single_integral(a: float, b1: float, b2: float, c1: float, c2: float, x: float, y: float,
                       tol: float = DEFAULT_TOL, n_nodes: int = EULER_NODES) -> SeriesValue:
    """Integral over 0 < u < 1 of u^{b1-1} (1-u)^{c1-b1-1} (1-xu)^{-a} 2F1(a, b2; c2; y/(1-xu)).

    Needs b1 > 0; c1 - b1 <= 0 is reached through the finite part at u = 1. Covers
    the whole continuation region.
    """
    _check_f2_region(x, y)
    q = c1 - b1
    if not _euler_allowed(b1, q):
        raise ParameterError(f"F2 single integral needs b1 > 0 and c1 - b1 off the nonpositive "
                             f"integers, got b1={b1}, c1={c1}")
    m = _subtracted_terms(q)
    zeta = y / (1.0 - x)
    shift = zeta * (-x / (1.0 - x)) ** np.arange(m)
    shift[:1] = 0.0
    taylor = _euler_taylor(b1, a, x, _gauss_derivatives(a, b2, c2, zeta, m, tol), shift)

    def h(u):
        rest = 1.0 - x * u
        return rest ** (-a) * hyp2f1_array(a, b2, c2, y / rest, tol)

    singular = [1.0 / x, (1.0 - y) / x] if x != 0.0 else []
    result = _euler_integral(h, b1, q, taylor, singular, tol, n_nodes)
    return result.scaled(gamma_ratio([c1], [b1, q]))


def _check_f2_region(x, y):
    if not (x < 1 - M and y < 1 - M and x + y < 1 - M):
        raise RegionError(f"F2 is continued only to x < 1, y < 1, x + y < 1, got ({x}, {y})")


def f2(a: float, b1: float, b2: float, c1: float, c2: float, x: float, y: float,
       tol: float = DEFAULT_TOL) -> SeriesValue:
    """Appell F2 on its continuation region x < 1, y < 1, x + y < 1"""
    _check_f2_region(x, y)
    terminating = _f2_spec(a, b1, b2, c1, c2).degree_bound() is not None
    if _rate(x, y) <= SERIES_RATE or (terminating and _rate(x, y) < 1 - M):
        return f2_series(a, b1, b2, c1, c2, x, y, tol)
    rates = {k: _rate(*_f2_transform(k, a, b1, b2, c1, c2, x, y)[2]) for k in (1, 2, 3)}
    rates[0] = _rate(x, y)
    best = min(rates, key=rates.get)
    if rates[best] >= SLOW_RATE:
        if c1 > b1 > 0 and c2 > b2 > 0:
            logger.debug(f"F2 at ({x}, {y}): every series route is slow, using the integral")
            return f2_integral(a, b1, b2, c1, c2, x, y, tol)
        if _euler_allowed(b1, c1 - b1):
            logger.debug(f"F2 at ({x}, {y}): every series route is slow, using the single integral")
            return f2_single_integral(a, b1, b2, c1, c2, x, y, tol)
        if _euler_allowed(b2, c2 - b2):
            logger.debug(f"F2 at ({x}, {y}): every series route is slow, using the mirrored single integral")
            return f2_single_integral(a, b2, b1, c2, c1, y, x, tol)
    if rates[best] >= 1 - M:
        raise RegionError(f"F2 at ({x}, {y}): no convergent route for these parameters")
    logger.debug(f"F2 at ({x}, {y}): route {best} with rate {rates[best]:.3f}")
    if best == 0:
        return f2_series(a, b1, b2, c1, c2, x, y, tol)
    return f2_transformed(best, a, b1, b2, c1, c2, x, y, tol)


def f2_array(a: float, b1: float, b2: float, c1: float, c2: float, x: np.ndarray, y: np.ndarray,
             tol: float = DEFAULT_TOL) -> np.ndarray:
    """f2 values at every point of the 1-D arrays (x, y); fast points share one series table"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    rate = np.abs(x) + np.abs(y)
    fast = rate <= SERIES_RATE
    values = np.zeros(x.shape)
    ok = np.zeros(x.shape, dtype=bool)
    try:
        if np.any(fast):
            values[fast], ok[fast] = _series_by_rate(_f2_spec(a, b1, b2, c1, c2), x[fast], y[fast],
                                                     rate[fast], tol)
    except DivergenceError as exc:
        logger.debug(f"F2 array route failed ({exc}), evaluating point by point")
        ok[:] = False
    return _fill_scalar(values, ok, lambda u, v: f2(a, b1, b2, c1, c2, u, v, tol).value, x, y)


# --- Appell F3 -------------------------------------------------------------

def f3_series(a1: float, a2: float, b1: float, b2: float, c: float, x: float, y: float,
              tol: float = DEFAULT_TOL) -> SeriesValue:
    if not (abs(x) < 1 - M and abs(y) < 1 - M):
        raise RegionError(f"F3 series needs |x| < 1 and |y| < 1, got ({x}, {y})")
    return double_series(TermSpec(i_num=(a1, b1), j_num=(a2, b2), ij_den=(c,)), x, y, tol)


def f3_single_sum(a1: float, a2: float, b1: float, b2: float, c: float, x: float, y: float,
                  tol: float = DEFAULT_TOL) -> SeriesValue:
    """sum_j (a2)_j (b2)_j / ((c)_j j!) y^j 2F1(a1, b1; c + j; x), for |y| < 1 and x < 1"""
    if not (abs(y) < 1 - M and x < 1 - M):
        raise RegionError(f"F3 single sum needs |y| < 1 and x < 1, got ({x}, {y})")
    return _outer_sum(lambda j: (a2 + j) * (b2 + j) * y / ((c + j) * (j + 1)),
                      lambda j: hyp2f1(a1, b1, c + j, x, tol), tol)


def _f3_integral_layout(a1, a2, b1, b2, c):
    """(p, p', q, q') with p from {a1, b1}, q from {a2, b2} and p, q, c-p-q > 0"""
    best = None
    for p, p_other in ((a1, b1), (b1, a1)):
        for q, q_other in ((a2, b2), (b2, a2)):
            margin = min(p, q, c - p - q)
            if margin > 0 and (best is None or margin > best[0]):
                best = (margin, p, p_other, q, q_other)
    return best[1:] if best else None


def f3_integral(a1: float, a2: float, b1: float, b2: float, c: float, x: float, y: float,
                tol: float = DEFAULT_TOL, n_nodes: int = INTEGRAL_NODES) -> SeriesValue:
    """Double-integral representation of F3, valid on x < 1, y < 1"""
    if not (x < 1 - M and y < 1 - M):
        raise RegionError(f"F3 is continued only to x < 1, y < 1, got ({x}, {y})")
    layout = _f3_integral_layout(a1, a2, b1, b2, c)
    if layout is None:
        raise ParameterError(f"F3 integral needs p, q, c-p-q > 0 for some p in (a1, b1), q in (a2, b2)")
    p, p_other, q, q_other = layout

    def integrand(u, v):
        return (1.0 - y * v[0]) ** (-q_other) * (1.0 - x * u[0] * v[1]) ** (-p_other)

    return _beta_mean(integrand, [(p, c - p - q), (q, c - q)], tol, n_nodes)


def f3(a1: float, a2: float, b1: float, b2: float, c: float, x: float, y: float,
       tol: float = DEFAULT_TOL) -> SeriesValue:
    """Appell F3(a1, a2; b1, b2; c; x, y) on x < 1, y < 1"""
    if not (x < 1 - M and y < 1 - M):
        raise RegionError(f"F3 is continued only to x < 1, y < 1, got ({x}, {y})")
    if abs(x) <= SERIES_RATE and abs(y) <= SERIES_RATE:
        return f3_series(a1, a2, b1, b2, c, x, y, tol)
    if min(abs(x), abs(y)) <= SERIES_RATE:
        return _f3_single(a1, a2, b1, b2, c, x, y, tol)
    if _f3_integral_layout(a1, a2, b1, b2, c) is not None:
        logger.debug(f"F3 at ({x}, {y}): using the integral representation")
        return f3_integral(a1, a2, b1, b2, c, x, y, tol)
    if min(abs(x), abs(y)) < 1 - M:
        return _f3_single(a1, a2, b1, b2, c, x, y, tol)
    raise ParameterError(f"F3 at ({x}, {y}) needs the integral representation, "
                         f"whose parameter conditions fail")


def _f3_single(a1, a2, b1, b2, c, x, y, tol):
    if abs(y) <= abs(x):
        return f3_single_sum(a1, a2, b1, b2, c, x, y, tol)
    return f3_single_sum(a2, a1, b2, b1, c, y, x, tol)


def f3_single_sum_array(a1: float, a2: float, b1: float, b2: float, c: float, x: np.ndarray,
                        y: np.ndarray, tol: float = DEFAULT_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """f3_single_sum at every point of the 1-D arrays (x, y), with the converged mask"""
    if np.any(np.abs(y) >= 1 - M) or np.any(x >= 1 - M):
        raise RegionError("F3 single sum needs |y| < 1 and x < 1 at every point")
    return _outer_sum_array(lambda j: (a2 + j) * (b2 + j) / ((c + j) * (j + 1)), y,
                            lambda j: hyp2f1_array(a1, b1, c + j, x, tol), tol)


def f3_array(a1: float, a2: float, b1: float, b2: float, c: float, x: np.ndarray, y: np.ndarray,
             tol: float = DEFAULT_TOL) -> np.ndarray:
    """f3 values at every point of the 1-D arrays (x, y)"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x >= 1 - M) or np.any(y >= 1 - M):
        raise RegionError("F3 is continued only to x < 1, y < 1")
    rate = np.maximum(np.abs(x), np.abs(y))
    series = rate <= SERIES_RATE
    single = ~series & (np.minimum(np.abs(x), np.abs(y)) <= SERIES_RATE)
    along_x = single & (np.abs(y) <= np.abs(x))
    along_y = single & ~along_x
    values = np.zeros(x.shape)
    ok = np.zeros(x.shape, dtype=bool)
    try:
        if np.any(series):
            spec = TermSpec(i_num=(a1, b1), j_num=(a2, b2), ij_den=(c,))
            values[series], ok[series] = _series_by_rate(spec, x[series], y[series], rate[series], tol)
        if np.any(along_x):
            values[along_x], ok[along_x] = f3_single_sum_array(a1, a2, b1, b2, c, x[along_x],
                                                               y[along_x], tol)
        if np.any(along_y):
            values[along_y], ok[along_y] = f3_single_sum_array(a2, a1, b2, b1, c, y[along_y],
                                                               x[along_y], tol)
    except DivergenceError as exc:
        logger.debug(f"F3 array route failed ({exc}), evaluating point by point")
        ok[:] = False
    return _fill_scalar(values, ok, lambda u, v: f3(a1, a2, b1, b2, c, u, v, tol).value, x, y)


# --- Extended F3 -----------------------------------------------------------

def _f3ext_integral_allowed(a1, a2, c, d1, d2) -> bool:
    return c > a1 > 0 and c - a1 > a2 > 0 and d2 > d1 > 0


def f3_extended_integral(a1: float, a2: float, b1: float, b2: float, c: float, d1: float,
                         d2: float, x: float, y: float, tol: float = DEFAULT_TOL,
                         n_nodes: int = INTEGRAL_NODES // 2) -> SeriesValue:
    """Triple-integral representation of the extended F3 on x < 1, y < 1"""
    if not (x < 1 - M and y < 1 - M):
        raise RegionError(f"extended F3 is continued only to x < 1, y < 1, got ({x}, {y})")
    if not _f3ext_integral_allowed(a1, a2, c, d1, d2):
        raise ParameterError("extended F3 integral needs c > a1 > 0, c - a1 > a2 > 0, d2 > d1 > 0")

    def integrand(u, v, w):
        return (1.0 - y * v[0] * u[1]) ** (-b2) * (1.0 - x * u[0] * w[0]) ** (-b1)

    return _beta_mean(integrand, [(a1, c - a1), (a2, c - a1 - a2), (d1, d2 - d1)], tol, n_nodes)


def f3_extended(a1: float, a2: float, b1: float, b2: float, c: float, d1: float, d2: float,
                x: float, y: float, tol: float = DEFAULT_TOL) -> SeriesValue:
    """F3 with the extra factor (d1)_i / (d2)_i in its terms"""
    if not (x < 1 - M and y < 1 - M):
        raise RegionError(f"extended F3 is continued only to x < 1, y < 1, got ({x}, {y})")
    series_ok = abs(x) < 1 - M and abs(y) < 1 - M
    fast = abs(x) <= SERIES_RATE and abs(y) <= SERIES_RATE
    if (fast or not _f3ext_integral_allowed(a1, a2, c, d1, d2)) and series_ok:
        spec = TermSpec(i_num=(a1, b1, d1), i_den=(d2,), j_num=(a2, b2), ij_den=(c,))
        return double_series(spec, x, y, tol)
    if _f3ext_integral_allowed(a1, a2, c, d1, d2):
        return f3_extended_integral(a1, a2, b1, b2, c, d1, d2, x, y, tol)
    raise ParameterError(f"extended F3 at ({x}, {y}) needs the triple integral, "
                         f"whose parameter conditions fail")


# --- Horn H2 ---------------------------------------------------------------

def _h2_series_region(x: float, y: float) -> bool:
    return abs(x) < 1 - M and abs(y) * (1 + abs(x)) < 1 - M


def _h2_continuation_region(x: float, y: float) -> bool:
    if x < -M:
        return (x - 1) * y < 1 - M
    return 0 <= x < 1 - M and y > -1 + M


def _h2_sum_rate(x, y):
    """Decay rate of the single sum; the inner 2F1 grows like (1 - x)^j only for x < 0"""
    return np.abs(y) * (1 - np.minimum(x, 0.0))


def _h2_spec(a, b1, b2, c1, c2) -> TermSpec:
    return TermSpec(imj_num=(a,), i_num=(b1,), j_num=(b2, c1), i_den=(c2,))


def h2_series(a: float, b1: float, b2: float, c1: float, c2: float, x: float, y: float,
              tol: float = DEFAULT_TOL) -> SeriesValue:
    if not _h2_series_region(x, y):
        raise RegionError(f"H2 series needs |x| < 1, |y| < 1/(1+|x|), got ({x}, {y})")
    return double_series(_h2_spec(a, b1, b2, c1, c2), x, y, tol)


def _h2_inner(a, b1, c2, x, j, tol) -> SeriesValue:
    """2F1(a - j, b1; c2; x): Pfaff for x < 0, Euler up to x = 1/2, connection above"""
    if x == 0.0:
        return SeriesValue.exact(1.0)
    if x < 0.0:
        return hyp2f1(b1, a - j, c2, x, tol)
    if x > 0.5:
        return hyp2f1_connection(a - j, b1, c2, x, tol)
    exponent = c2 - a + j - b1
    return hyp2f1(c2 - a + j, c2 - b1, c2, x, tol).scaled((1.0 - x) ** exponent)


def _h2_ratio(a, b2, c1):
    def ratio(j: int) -> float:
        if (b2 + j) * (c1 + j) == 0.0:
            return 0.0
        if a - j - 1 == 0.0:
            raise PoleError(f"(a)_{{-j}} has a pole at a={a}, j={j + 1}")
        return (b2 + j) * (c1 + j) / ((j + 1) * (a - j - 1))
    return ratio


def h2_single_sum(a: float, b1: float, b2: float, c1: float, c2: float, x: float, y: float,
                  tol: float = DEFAULT_TOL) -> SeriesValue:
    """sum_j (b2)_j (c1)_j (a)_{-j} y^j / j! 2F1(a - j, b1; c2; x).

    Converges for x < 1 with |y| < 1 when x >= 0 and |y| (1 - x) < 1 when x < 0.
    """
    if not (x < 1 - M and _h2_sum_rate(x, y) < 1 - M):
        raise RegionError(f"H2 single sum diverges at ({x}, {y})")
    ratio = _h2_ratio(a, b2, c1)
    return _outer_sum(lambda j: ratio(j) * y if y != 0.0 else 0.0,
                      lambda j: _h2_inner(a, b1, c2, x, j, tol), tol)


def h2_integral(a: float, b1: float, b2: float, c1: float, c2: float, x: float, y: float,
                tol: float = DEFAULT_TOL, n_nodes: int = EULER_NODES) -> SeriesValue:
    """Integral over 0 < u < 1 of u^{b1-1} (1-u)^{c2-b1-1} (1-xu)^{-a} 2F1(b2, c1; 1-a; -y(1-xu)).

    Needs b1 > 0; c2 - b1 <= 0 is reached through the finite part at u = 1. Covers
    the whole continuation region, including |y| close to 1.
    """
    if not _h2_continuation_region(x, y):
        raise RegionError(f"({x}, {y}) is outside the H2 continuation region")
    q = c2 - b1
    if not _euler_allowed(b1, q):
        raise ParameterError(f"H2 integral needs b1 > 0 and c2 - b1 off the nonpositive "
                             f"integers, got b1={b1}, c2={c2}")
    m = _subtracted_terms(q)
    shift = np.zeros(m)
    if m > 1:
        shift[1] = -y * x
    outer = _gauss_derivatives(b2, c1, 1.0 - a, -y * (1.0 - x), m, tol)
    taylor = _euler_taylor(b1, a, x, outer, shift)

    def h(u):
        rest = 1.0 - x * u
        return rest ** (-a) * hyp2f1_array(b2, c1, 1.0 - a, -y * rest, tol)

    singular = []
    if x != 0.0:
        singular.append(1.0 / x)
        if y != 0.0:
            singular.append((1.0 + 1.0 / y) / x)
    result = _euler_integral(h, b1, q, taylor, singular, tol, n_nodes)
    return result.scaled(gamma_ratio([c2], [b1, q]))


def h2(a: float, b1: float, b2: float, c1: float, c2: float, x: float, y: float,
       tol: float = DEFAULT_TOL) -> SeriesValue:
    """Horn H2 on the series region and its continuation region"""
    if not (_h2_continuation_region(x, y) or _h2_series_region(x, y)):
        raise RegionError(f"({x}, {y}) is outside the H2 continuation region")
    series_rate = max(abs(x), abs(y) * (1 + abs(x)))
    sum_rate = float(_h2_sum_rate(x, y))
    if series_rate <= SERIES_RATE and series_rate <= sum_rate:
        return h2_series(a, b1, b2, c1, c2, x, y, tol)
    if sum_rate <= FAST_SUM_RATE:
        return h2_single_sum(a, b1, b2, c1, c2, x, y, tol)
    if _euler_allowed(b1, c2 - b1):
        logger.debug(f"H2 at ({x}, {y}): single-sum rate {sum_rate:.3f}, using the integral")
        return h2_integral(a, b1, b2, c1, c2, x, y, tol)
    if sum_rate < 1 - M:
        logger.debug(f"H2 at ({x}, {y}): single sum with rate {sum_rate:.3f}")
        return h2_single_sum(a, b1, b2, c1, c2, x, y, tol)
    if series_rate < 1 - M:
        return h2_series(a, b1, b2, c1, c2, x, y, tol)
    raise RegionError(f"H2 at ({x}, {y}): no implemented route converges there")


def _h2_inner_array(a, b1, c2, x: np.ndarray, j: int, tol: float) -> np.ndarray:
    values = np.ones(x.shape)
    neg, mid, high = x < 0.0, (x > 0.0) & (x <= 0.5), x > 0.5
    if np.any(neg):
        values[neg] = hyp2f1_array(b1, a - j, c2, x[neg], tol)
    if np.any(mid):
        exponent = c2 - a + j - b1
        values[mid] = hyp2f1_array(c2 - a + j, c2 - b1, c2, x[mid], tol) * (1.0 - x[mid]) ** exponent
    if np.any(high):
        values[high] = hyp2f1_connection_array(a - j, b1, c2, x[high], tol)
    return values


def h2_single_sum_array(a: float, b1: float, b2: float, c1: float, c2: float, x: np.ndarray,
                        y: np.ndarray, tol: float = DEFAULT_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """h2_single_sum at every point of the 1-D arrays (x, y), with the converged mask"""
    if np.any(x >= 1 - M) or np.any(_h2_sum_rate(x, y) >= 1 - M):
        raise RegionError("H2 single sum diverges at some of the points")
    return _outer_sum_array(_h2_ratio(a, b2, c1), y,
                            lambda j: _h2_inner_array(a, b1, c2, x, j, tol), tol)


def h2_array(a: float, b1: float, b2: float, c1: float, c2: float, x: np.ndarray, y: np.ndarray,
             tol: float = DEFAULT_TOL) -> np.ndarray:
    """h2 values at every point of the 1-D arrays (x, y); points the shared series and
    single-sum tables leave unconverged go through h2 one by one"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    outside = [(u, v) for u, v in zip(x, y)
               if not (_h2_continuation_region(u, v) or _h2_series_region(u, v))]
    if outside:
        raise RegionError(f"{outside[0]} is outside the H2 continuation region")
    series_rate = np.maximum(np.abs(x), np.abs(y) * (1 + np.abs(x)))
    sum_rate = _h2_sum_rate(x, y)
    series = (series_rate <= SERIES_RATE) & (series_rate <= sum_rate)
    single = ~series & (sum_rate <= SERIES_RATE)
    values = np.zeros(x.shape)
    ok = np.zeros(x.shape, dtype=bool)
    try:
        if np.any(series):
            values[series], ok[series] = _series_by_rate(_h2_spec(a, b1, b2, c1, c2), x[series],
                                                         y[series], series_rate[series], tol)
        if np.any(single):
            values[single], ok[single] = h2_single_sum_array(a, b1, b2, c1, c2, x[single],
                                                             y[single], tol)
    except DivergenceError as exc:
        logger.debug(f"H2 array route failed ({exc}), evaluating point by point")
        ok[:] = False
    return _fill_scalar(values, ok, lambda u, v: h2(a, b1, b2, c1, c2, u, v, tol).value, x, y)


# --- Olsson F_P, F_Q, F_PR -------------------------------------------------

def fp_series_xy(a: float, b1: float, b2: float, c1: float, c2: float, x: float, y: float,
                 tol: float = DEFAULT_TOL) -> SeriesValue:
    """F_P as a series in x and 1 - y, for |x| < 1, |y - 1| < 1"""
    if not (abs(x) < 1 - M and abs(1 - y) < 1 - M):
        raise RegionError(f"F_P series in (x, 1-y) needs |x| < 1, |y-1| < 1, got ({x}, {y})")
    spec = TermSpec(ij_num=(a,), i_num=(a - c2 + 1, b1), j_num=(b2,),
                    ij_den=(a + b2 - c2 + 1,), i_den=(c1,))
    return double_series(spec, x, 1.0 - y, tol)


def fp_series_ratio(a: float, b1: float, b2: float, c1: float, c2: float, x: float, y: float,
                    tol: float = DEFAULT_TOL) -> SeriesValue:
    """F_P as y^{-a} times a series in x/y and (y-1)/y, for |x/y| + |1 - 1/y| < 1"""
    if not (y > M and _rate(x / y, (y - 1) / y) < 1 - M):
        raise RegionError(f"F_P series in (x/y, (y-1)/y) diverges at ({x}, {y})")
    spec = TermSpec(ij_num=(a, a - c2 + 1), i_num=(b1,), ij_den=(a + b2 - c2 + 1,), i_den=(c1,))
    return double_series(spec, x / y, (y - 1) / y, tol).scaled(y ** (-a))


def fpr(a: float, b1: float, b2: float, c1: float, c2: float, x: float, y: float,
        tol: float = DEFAULT_TOL, max_diagonals: int = 2000) -> SeriesValue:
    """Part of F_P regular at (1, 1): double sum in (1-x, 1-y) with inner 3F2 at unit argument"""
    if not _rate(x - 1, y - 1) < 1 - M:
        raise RegionError(f"F_PR needs |x-1| + |y-1| < 1, got ({x}, {y})")
    if a <= 0:
        raise ParameterError(f"F_PR needs a > 0 for its inner 3F2, got a={a}")
    prefactor = gamma_ratio([a + b2 - c2 + 1, c1 - b1 + b2 - a, c1],
                            [a, c1 - b1 + b2 - c2 + 1, c1 + b2 - a])
    spec = TermSpec(i_num=(a - c2 + 1, b1), j_num=(b2,), i_den=(a + b1 - c1 - b2 + 1,))
    u, v = 1.0 - x, 1.0 - y
    acc = SeriesAccumulator(tol)
    peak = 0.0
    inner_err = 0.0
    inner_ok = True
    terms = 0
    for d in range(max_diagonals):
        coefs, _ = _diagonal_terms(spec, u, v, d, d + 1)
        diagonal = 0.0
        size = 0.0
        for i, coef in enumerate(coefs):
            if coef == 0.0:
                continue
            j = d - i
            inner = hyp3f2_unit(b2 - c2 + 1, c1 - b1 + b2 - a - i, c1 - a - j,
                                c1 - b1 + b2 - c2 + 1, c1 + b2 - a, tol)
            inner_err = max(inner_err, inner.err_estimate)
            inner_ok = inner_ok and inner.converged
            diagonal += coef * inner.value
            size += abs(coef * inner.value)
        terms += d + 1
        acc.total += diagonal
        peak = max(peak, size)
        scale = abs(acc.total) if acc.total != 0.0 else peak
        if size <= tol * scale:
            acc.tail = max(acc.tail, size) if acc.small_run else size
            acc.small_run += 1
            if acc.small_run >= acc.patience:
                acc.count = terms
                result = acc.result(True)
                return SeriesValue(result.value * prefactor, terms,
                                   max(result.err_estimate, inner_err), inner_ok)
        else:
            acc.small_run = 0
    logger.warning(f"F_PR at ({x}, {y}) hit the {max_diagonals}-diagonal cap")
    acc.count = terms
    result = acc.result(False)
    return SeriesValue(result.value * prefactor, terms, max(result.err_estimate, inner_err), False)


def fp_decomposition(a: float, b1: float, b2: float, c1: float, c2: float, x: float, y: float,
                     tol: float = DEFAULT_TOL) -> SeriesValue:
    """F_P = F_PR + the singular F3 term at (1, 1)"""
    if x <= M or y <= M:
        raise RegionError(f"F_P decomposition needs x > 0 and y > 0, got ({x}, {y})")
    regular = fpr(a, b1, b2, c1, c2, x, y, tol)
    factor = gamma_ratio([a + b2 - c2 + 1, a + b1 - c1 - b2, c1], [a, b1, a - c2 + 1])
    if factor == 0.0:
        return regular
    exponent = c1 - b1 + b2 - a
    if x == 1.0:
        if exponent > 0:
            return regular
        raise RegionError(f"F_P singular term blows up at x=1 for c1-b1+b2-a={exponent}")
    factor *= x ** (b1 - c1) * y ** (-b2) * (1.0 - x) ** exponent
    singular = f3(1 - b1, b2, c1 - b1, b2 - c2 + 1, exponent + 1, (x - 1) / x, (1 - x) / y, tol)
    return SeriesValue.combine([(1.0, regular), (factor, singular)])


def fp(a: float, b1: float, b2: float, c1: float, c2: float, x: float, y: float,
       tol: float = DEFAULT_TOL) -> SeriesValue:
    """Olsson F_P on its continuation region x < 1, y > 0"""
    if not (x < 1 - M and y > M):
        raise RegionError(f"F_P is continued only to x < 1, y > 0, got ({x}, {y})")
    rate_xy = max(abs(x), abs(1 - y))
    rate_ratio = _rate(x / y, (y - 1) / y)
    if min(rate_xy, rate_ratio) <= SERIES_RATE:
        if rate_xy <= rate_ratio:
            return fp_series_xy(a, b1, b2, c1, c2, x, y, tol)
        return fp_series_ratio(a, b1, b2, c1, c2, x, y, tol)
    if a > 0 and x > 0 and _rate(x - 1, y - 1) <= SERIES_RATE:
        try:
            logger.debug(f"F_P at ({x}, {y}): regular part plus F3 term")
            return fp_decomposition(a, b1, b2, c1, c2, x, y, tol)
        except (PoleError, RegionError) as exc:
            logger.debug(f"F_P decomposition unavailable: {exc}")
    if rate_xy < 1 - M and rate_xy <= rate_ratio:
        return fp_series_xy(a, b1, b2, c1, c2, x, y, tol)
    if rate_ratio < 1 - M:
        return fp_series_ratio(a, b1, b2, c1, c2, x, y, tol)
    raise RegionError(f"F_P at ({x}, {y}): no implemented route converges there")


def _fq_region(x: float, y: float) -> bool:
    return x > M and y > M and abs(y - 1) < y - M and abs(y - 1) + y < x - M


def fq(a: float, b1: float, b2: float, c1: float, c2: float, x: float, y: float,
       tol: float = DEFAULT_TOL) -> SeriesValue:
    """Olsson F_Q, for |y-1| < |y| and |y-1| + |y| < |x| with x, y > 0"""
    if not _fq_region(x, y):
        raise RegionError(f"({x}, {y}) is outside the F_Q series region")
    spec = TermSpec(imj_num=(b1 + c2 - b2 - a,), i_num=(b1, b1 - c1 + 1),
                    imj_den=(b1 - a + 1, b1 + c2 - a))
    series = double_series(spec, y / x, (1 - y) / y, tol)
    return series.scaled(x ** (-b1) * y ** (b1 - a))


def f3_inverse_continuation(a0: float, b1: float, b2: float, c1: float, c2: float,
                            x1: float, x2: float, tol: float = DEFAULT_TOL) -> Tuple[float, float]:
    """Both sides of the identity writing F3(a0, b1; b2, c1; c2; x1, x2) through F_Q in
    (1/x1, 1/x2) plus an F3 in (x1 (x2-1)/x2, 1 - x2)."""
    left = f3(a0, b1, b2, c1, c2, x1, x2, tol).value
    first = gamma_ratio([c2, c2 - b1 - c1], [c2 - b1, c2 - c1])
    second = gamma_ratio([c2, b1 + c1 - c2], [b1, c1])
    right = 0.0
    if first != 0.0:
        q = fq(b2 + c1 - c2 + 1, b2, c1, 1 - a0 + b2, c1 - b1 + 1, 1 / x1, 1 / x2, tol)
        right += first * x1 ** (-b2) * x2 ** (-c1) * q.value
    if second != 0.0:
        g = f3(a0, 1 - b1, b2, 1 - c1, 1 - b1 - c1 + c2, x1 * (x2 - 1) / x2, 1 - x2, tol)
        right += second * x2 ** (1 - c2) * (1 - x2) ** (c2 - b1 - c1) * g.value
    return left, right


# --- Regions and dispatch --------------------------------------------------

def convergence_region(kind: Hyp2Kind, x: float, y: float) -> RegionStatus:
    if kind is Hyp2Kind.F1:
        series, continued = abs(x) < 1 - M and abs(y) < 1 - M, False
    elif kind is Hyp2Kind.F2:
        series = _rate(x, y) < 1 - M
        continued = x < 1 - M and y < 1 - M and x + y < 1 - M
    elif kind in (Hyp2Kind.F3, Hyp2Kind.F3EXT):
        series = abs(x) < 1 - M and abs(y) < 1 - M
        continued = x < 1 - M and y < 1 - M
    elif kind is Hyp2Kind.H2:
        series = _h2_series_region(x, y)
        continued = _h2_continuation_region(x, y)
    elif kind is Hyp2Kind.FP:
        series = abs(x) < 1 - M and abs(1 - y) < 1 - M
        continued = x < 1 - M and y > M
    elif kind is Hyp2Kind.FQ:
        series, continued = _fq_region(x, y), False
    else:
        series, continued = _rate(x - 1, y - 1) < 1 - M, False
    if series:
        return RegionStatus.INSIDE_SERIES
    return RegionStatus.INSIDE_CONTINUATION if continued else RegionStatus.OUTSIDE


_DISPATCH: Dict[Hyp2Kind, Callable[..., SeriesValue]] = {
    Hyp2Kind.F1: f1,
    Hyp2Kind.F2: f2,
    Hyp2Kind.F3: f3,
    Hyp2Kind.F3EXT: f3_extended,
    Hyp2Kind.H2: h2,
    Hyp2Kind.FP: fp,
    Hyp2Kind.FQ: fq,
    Hyp2Kind.FPR: fpr,
}


def evaluate(hp: Hyp2Params, tol: float = DEFAULT_TOL) -> SeriesValue:
    return _DISPATCH[hp.kind](*hp.params, hp.x, hp.y, tol=tol)


def f2_pde_residual(a0: float, b1: float, b2: float, c1: float, c2: float,
                    solution: Callable, x: float, y: float, h: float = 1e-3) -> Tuple[float, float]:
    """Residuals of the two second-order equations solved by F2(a0; b1, b2; c1, c2; x, y),
    with derivatives of solution replaced by central differences of step h."""
    F = float(np.asarray(solution(np.array([[x]]), np.array([[y]]))).ravel()[0])
    p = finite_diff_partial(solution, x, y, 1, 0, h)
    q = finite_diff_partial(solution, x, y, 0, 1, h)
    r = finite_diff_partial(solution, x, y, 2, 0, h)
    s = finite_diff_partial(solution, x, y, 1, 1, h)
    t = finite_diff_partial(solution, x, y, 0, 2, h)
    r1 = x * (1 - x) * r - x * y * s + (c1 - (a0 + b1 + 1) * x) * p - b1 * y * q - a0 * b1 * F
    r2 = y * (1 - y) * t - x * y * s + (c2 - (a0 + b2 + 1) * y) * q - b2 * x * p - a0 * b2 * F
    return r1, r2
