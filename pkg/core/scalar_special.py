import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from .config import DEFAULT_TOL, MAX_SERIES_TERMS, NEAR_INTEGER
from .errors import DivergenceError, PoleError

logger = logging.getLogger(__name__)

# Consecutive small terms required before a series counts as converged
PATIENCE = 3

LOG_FLOAT_MAX = math.log(np.finfo(float).max)


def is_nonpositive_int(x: float, eps: float = 1e-12) -> bool:
    """Whether x is a pole of the gamma function"""
    r = round(x)
    return r <= 0 and abs(x - r) < eps


def termination_order(*params: float) -> Optional[int]:
    """Smallest N with some parameter equal to -N, or None when no parameter terminates"""
    orders = [-int(round(p)) for p in params if is_nonpositive_int(p)]
    return min(orders) if orders else None


def _pole_mask(z: np.ndarray) -> np.ndarray:
    r = np.round(z)
    return (r <= 0) & (np.abs(z - r) < 1e-12)


@dataclass(frozen=True)
class SeriesValue:
    """Value of a summed series with its truncation diagnostics"""
    value: float
    terms_used: int
    err_estimate: float
    converged: bool

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise DivergenceError(f"series value is not finite: {self.value}")

    @staticmethod
    def exact(value: float, terms: int = 1) -> "SeriesValue":
        return SeriesValue(float(value), terms, 0.0, True)

    def scaled(self, factor: float) -> "SeriesValue":
        return SeriesValue(self.value * factor, self.terms_used, self.err_estimate, self.converged)

    @staticmethod
    def combine(parts: Sequence[Tuple[float, "SeriesValue"]]) -> "SeriesValue":
        """Linear combination of series values; relative errors are weighted by contribution.

        The result is converged when every part is.
        """
        value = 0.0
        abs_err = 0.0
        terms = 0
        converged = True
        for factor, part in parts:
            contribution = factor * part.value
            if not math.isfinite(contribution):
                raise DivergenceError(f"series combination overflows: {factor} * {part.value}")
            value += contribution
            abs_err += abs(contribution) * part.err_estimate
            terms += part.terms_used
            converged = converged and part.converged
        err = abs_err / abs(value) if value != 0.0 else abs_err
        return SeriesValue(value, terms, err, converged)


@dataclass(frozen=True)
class PochhammerArg:
    """Rising factorial (base)_shift"""
    base: float
    shift: float

    def value(self) -> float:
        return pochhammer(self.base, self.shift)

    def gamma_path(self) -> float:
        """Same quantity through Gamma(base + shift) / Gamma(base)"""
        return gamma_ratio([self.base + self.shift], [self.base])


def log_gamma(x: float) -> Tuple[float, float]:
    """ln|Gamma(x)| and the sign of Gamma(x)"""
    if is_nonpositive_int(x):
        raise PoleError(f"Gamma pole at x={x}")
    return float(special.gammaln(x)), float(special.gammasgn(x))


def log_gamma_ratio(num: Iterable[float], den: Iterable[float]) -> Tuple[float, float]:
    """ln|prod Gamma(num) / prod Gamma(den)| and its sign.

    A pole in the denominator gives sign 0; a pole in the numerator is an error.
    """
    num = [float(x) for x in num]
    den = [float(x) for x in den]
    for x in num:
        if is_nonpositive_int(x):
            raise PoleError(f"Gamma pole in numerator at {x}")
    if any(is_nonpositive_int(x) for x in den):
        return -math.inf, 0.0
    log = sum(special.gammaln(x) for x in num) - sum(special.gammaln(x) for x in den)
    sign = math.prod(special.gammasgn(x) for x in num + den)
    return float(log), float(sign)


def gamma_ratio(num: Iterable[float], den: Iterable[float]) -> float:
    """prod Gamma(num) / prod Gamma(den) in log space.

    A pole in the denominator gives the limiting value 0; a pole in the
    numerator is an error.
    """
    log, sign = log_gamma_ratio(num, den)
    if sign == 0.0:
        return 0.0
    with np.errstate(over="ignore"):
        return float(sign * np.exp(log))


def beta2(x: float, y: float) -> float:
    return gamma_ratio([x, y], [x + y])


def beta3(x: float, y: float, z: float) -> float:
    """B(x,y,z) = Gamma(x)Gamma(y)Gamma(z)/Gamma(x+y+z)"""
    return gamma_ratio([x, y, z], [x + y + z])


def pochhammer(a: float, shift) -> float:
    """(a)_shift; negative integer shifts use (a)_{-i} = (-1)^i / (1-a)_i"""
    if float(shift).is_integer():
        n = int(shift)
        if n >= 0:
            return float(math.prod(a + i for i in range(n)))
        denominator = pochhammer(1.0 - a, -n)
        if denominator == 0.0:
            raise PoleError(f"({a})_{n} has a pole: (1-a)_{-n} vanishes")
        return (-1.0) ** n / denominator
    return gamma_ratio([a + shift], [a])


def log_pochhammer(a: float, k) -> Tuple[np.ndarray, np.ndarray]:
    """log|(a)_k| and sign of (a)_k for an integer array k of either sign.

    Zeros come back as -inf, poles as +inf.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    order = termination_order(a)
    if order is not None:
        # a = -N: finite product for 0 <= k <= N, zero beyond, (-1)^k/(N+1)_{|k|} below zero
        log = np.empty(k.shape)
        up = (k >= 0) & (k <= order)
        gone = k > order
        down = k < 0
        log[up] = special.gammaln(order + 1) - special.gammaln(order - k[up] + 1)
        log[gone] = -np.inf
        log[down] = special.gammaln(order + 1) - special.gammaln(order + 1 - k[down])
        sign = np.where(np.abs(k) % 2 == 1, -1.0, 1.0)
        sign[gone] = 0.0
        return log, sign
    z = a + k
    pole = _pole_mask(z)
    safe = np.where(pole, 1.0, z)
    log = special.gammaln(safe) - special.gammaln(a)
    sign = special.gammasgn(safe) * special.gammasgn(a)
    log[pole] = np.inf
    sign[pole] = 1.0
    return log, sign


class LogTerms:
    """Series terms built as products of Pochhammer symbols, powers and factorials in log space"""

    def __init__(self, shape):
        self.log = np.zeros(shape)
        self.sign = np.ones(shape)
        self.zero = np.zeros(shape, dtype=bool)
        self.pole = np.zeros(shape, dtype=bool)

    def _absorb(self, log, sign, numerator: bool):
        log = np.broadcast_to(log, self.log.shape)
        sign = np.broadcast_to(sign, self.log.shape)
        vanish = log == -np.inf
        blow = log == np.inf
        finite = np.where(vanish | blow, 0.0, log)
        if numerator:
            self.zero |= vanish
            self.pole |= blow
            self.log += finite
        else:
            self.zero |= blow
            self.pole |= vanish
            self.log -= finite
        self.sign *= np.where(vanish | blow, 1.0, sign)

    def rising(self, a: float, k):
        self._absorb(*log_pochhammer(a, k), numerator=True)
        return self

    def falling(self, a: float, k):
        """Divide by (a)_k"""
        self._absorb(*log_pochhammer(a, k), numerator=False)
        return self

    def factorial(self, k):
        self.log -= special.gammaln(np.asarray(k, dtype=float) + 1.0)
        return self

    def power(self, z: float, k):
        k = np.broadcast_to(np.asarray(k, dtype=float), self.log.shape)
        if z == 0.0:
            self.zero |= k > 0
            return self
        self.log += np.where(k == 0, 0.0, k * math.log(abs(z)))
        if z < 0:
            self.sign *= np.where(k % 2 == 1, -1.0, 1.0)
        return self

    def values(self) -> np.ndarray:
        if np.any(self.pole & ~self.zero):
            raise PoleError("Pochhammer pole in a series term")
        if np.any((self.log > LOG_FLOAT_MAX) & ~self.zero):
            raise DivergenceError("series term overflows a float")
        magnitude = np.exp(np.where(self.zero, 0.0, self.log))
        return np.where(self.zero, 0.0, self.sign * magnitude)


def hyper_terms(num: Sequence[float], den: Sequence[float], z: float, k) -> np.ndarray:
    """Terms prod (num)_k / prod (den)_k * z^k / k! of a one-variable hypergeometric series"""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    terms = LogTerms(k.shape)
    for a in num:
        terms.rising(a, k)
    for b in den:
        terms.falling(b, k)
    return terms.factorial(k).power(z, k).values()


class SeriesAccumulator:
    """Running sum that stops after PATIENCE consecutive terms below tol * |sum|"""

    def __init__(self, tol: float, patience: int = PATIENCE):
        self.tol = tol
        self.patience = patience
        self.total = 0.0
        self.count = 0
        self.small_run = 0
        self.tail = 0.0

    def add(self, term: float) -> bool:
        if not math.isfinite(term):
            raise DivergenceError(f"series term is not finite after {self.count} terms")
        self.total += term
        self.count += 1
        if abs(term) <= self.tol * abs(self.total):
            self.tail = max(self.tail, abs(term)) if self.small_run else abs(term)
            self.small_run += 1
        else:
            self.small_run = 0
        return self.small_run >= self.patience

    def add_block(self, terms: np.ndarray) -> bool:
        partial = self.total + np.cumsum(terms)
        if not np.all(np.isfinite(partial)):
            raise DivergenceError(f"partial sums overflow after {self.count} terms")
        small = np.abs(terms) <= self.tol * np.abs(partial)
        carry = min(self.small_run, self.patience - 1)
        flags = np.concatenate((np.ones(carry, dtype=bool), small))
        if flags.size >= self.patience:
            window = np.convolve(flags.astype(int), np.ones(self.patience, dtype=int), mode="valid")
            hits = np.flatnonzero(window == self.patience)
            if hits.size:
                stop = hits[0] + self.patience - 1 - carry
                self.total = float(partial[stop])
                self.count += stop + 1
                self.small_run = self.patience
                self.tail = float(np.max(np.abs(terms[max(0, stop - self.patience + 1):stop + 1])))
                return True
        self.total = float(partial[-1])
        self.count += terms.size
        misses = np.flatnonzero(~small)
        self.small_run = self.small_run + terms.size if misses.size == 0 else terms.size - 1 - int(misses[-1])
        return False

    def result(self, converged: bool) -> SeriesValue:
        if not math.isfinite(self.total):
            raise DivergenceError(f"series sum is not finite after {self.count} terms")
        scale = abs(self.total) if self.total != 0.0 else 1.0
        return SeriesValue(self.total, self.count, self.tail / scale, converged)


def _hyper_polynomial(num, den, z: float, order: int) -> SeriesValue:
    terms = hyper_terms(num, den, z, np.arange(order + 1))
    return SeriesValue.exact(float(np.sum(terms)), order + 1)


def _hyper_series(num, den, z: float, tol: float, max_terms: int = MAX_SERIES_TERMS) -> SeriesValue:
    acc = SeriesAccumulator(tol)
    start = 0
    block = 64
    while start < max_terms:
        k = np.arange(start, min(start + block, max_terms))
        if acc.add_block(hyper_terms(num, den, z, k)):
            return acc.result(True)
        start = int(k[-1]) + 1
        block = min(block * 2, 8192)
    logger.warning(f"pFq series {num}/{den} at z={z} hit the {max_terms}-term cap")
    return acc.result(False)


def hyp2f1(a: float, b: float, c: float, z: float, tol: float = DEFAULT_TOL) -> SeriesValue:
    """Gauss hypergeometric function 2F1(a, b; c; z) for real z <= 1"""
    if z == 0.0:
        return SeriesValue.exact(1.0)
    order = termination_order(a, b)
    if order is not None:
        return _hyper_polynomial((a, b), (c,), z, order)
    if is_nonpositive_int(c):
        raise PoleError(f"2F1 lower parameter c={c} is a pole of the series")
    if z > 1.0:
        raise DivergenceError(f"2F1 diverges at z={z} > 1")
    excess = c - a - b
    if z == 1.0:
        if excess <= 0.0:
            raise DivergenceError(f"2F1 at z=1 needs c-a-b > 0, got {excess}")
        return SeriesValue.exact(gamma_ratio([c, excess], [c - a, c - b]))
    if z < 0.0:
        # Pfaff: maps (-inf, 0) onto (0, 1)
        inner = hyp2f1(a, c - b, c, z / (z - 1.0), tol)
        return inner.scaled((1.0 - z) ** (-a))
    if z <= 0.5:
        return _hyper_series((a, b), (c,), z, tol)
    return hyp2f1_connection(a, b, c, z, tol)


def hyp2f1_connection(a: float, b: float, c: float, z: float, tol: float = DEFAULT_TOL) -> SeriesValue:
    """2F1 for 1/2 < z < 1 through the series in 1 - z, also when a or b terminates"""
    excess = c - a - b
    if abs(excess - round(excess)) < NEAR_INTEGER:
        # degenerate connection: both terms have poles that cancel, scipy carries the limit
        logger.debug(f"2F1({a}, {b}; {c}; {z}): c-a-b near an integer, using the degenerate formula")
        return SeriesValue.exact(float(special.hyp2f1(a, b, c, z)))
    w = 1.0 - z
    parts = []
    first = gamma_ratio([c, excess], [c - a, c - b])
    if first != 0.0:
        parts.append((first, hyp2f1(a, b, 1.0 - excess, w, tol)))
    log_second, sign = log_gamma_ratio([c, -excess], [a, b])
    if sign != 0.0:
        log_factor = log_second + excess * math.log(w)
        if log_factor > LOG_FLOAT_MAX:
            raise DivergenceError(f"2F1({a}, {b}; {c}; {z}): connection term overflows")
        parts.append((sign * math.exp(log_factor), hyp2f1(c - a, c - b, 1.0 + excess, w, tol)))
    return SeriesValue.combine(parts)


def _hyper_series_array(num, den, z: np.ndarray, tol: float,
                        max_terms: int = MAX_SERIES_TERMS) -> np.ndarray:
    """Series of _hyper_series at every entry of z, for 0 < |z| <= 1/2"""
    log_z = np.log(np.abs(z))[None, :]
    odd = np.where(z < 0.0, -1.0, 1.0)[None, :]
    total = np.zeros(z.shape)
    start = 0
    block = 64
    while start < max_terms:
        k = np.arange(start, min(start + block, max_terms), dtype=float)
        coef = LogTerms(k.shape)
        for a in num:
            coef.rising(a, k)
        for b in den:
            coef.falling(b, k)
        coef.factorial(k)
        if np.any(coef.pole & ~coef.zero):
            raise PoleError("Pochhammer pole in a series term")
        log = np.where(coef.zero, -np.inf, coef.log)[:, None] + k[:, None] * log_z
        if np.any(log > LOG_FLOAT_MAX):
            raise DivergenceError("series term overflows a float")
        terms = np.where(coef.zero, 0.0, coef.sign)[:, None] * odd ** k[:, None] * np.exp(log)
        total += terms.sum(axis=0)
        tail = np.abs(terms[-PATIENCE:]).max(axis=0)
        if np.all((tail <= tol * np.abs(total)) | (tail == 0.0)):
            return total
        start = int(k[-1]) + 1
        # keeps the term table near a few million entries
        block = min(block * 2, 8192, max(64, 4_000_000 // max(z.size, 1)))
    logger.warning(f"pFq series {num}/{den} on {z.size} arguments hit the {max_terms}-term cap")
    return total


def hyp2f1_connection_array(a: float, b: float, c: float, z: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """hyp2f1_connection at every entry of an array of arguments in (1/2, 1)"""
    excess = c - a - b
    if abs(excess - round(excess)) < NEAR_INTEGER:
        logger.debug(f"2F1({a}, {b}; {c}) on {z.size} arguments: c-a-b near an integer, "
                     f"using the degenerate formula")
        return special.hyp2f1(a, b, c, z)
    w = 1.0 - z
    total = np.zeros(z.shape)
    first = gamma_ratio([c, excess], [c - a, c - b])
    if first != 0.0:
        total += first * _hyper_series_array((a, b), (1.0 - excess,), w, tol)
    log_second, sign = log_gamma_ratio([c, -excess], [a, b])
    if sign != 0.0:
        log_factor = log_second + excess * np.log(w)
        if np.any(log_factor > LOG_FLOAT_MAX):
            raise DivergenceError(f"2F1({a}, {b}; {c}): connection term overflows")
        total += sign * np.exp(log_factor) * _hyper_series_array((c - a, c - b), (1.0 + excess,), w, tol)
    return total


def hyp2f1_array(a: float, b: float, c: float, z, tol: float = DEFAULT_TOL) -> np.ndarray:
    """hyp2f1 at every entry of an array of arguments z < 1, values only"""
    z = np.asarray(z, dtype=float)
    order = termination_order(a, b)
    if order is not None and is_nonpositive_int(c):
        coef = hyper_terms((a, b), (c,), 1.0, np.arange(order + 1))
        return np.polynomial.polynomial.polyval(z, coef)
    if order is None and is_nonpositive_int(c):
        raise PoleError(f"2F1 lower parameter c={c} is a pole of the series")
    if z.size and np.max(z) >= 1.0:
        raise DivergenceError(f"2F1 array evaluation needs z < 1, got {np.max(z)}")
    out = np.ones(z.shape)
    negative = z < 0.0
    if np.any(negative):
        w = z[negative]
        # Pfaff
        out[negative] = (1.0 - w) ** (-a) * hyp2f1_array(a, c - b, c, w / (w - 1.0), tol)
    near = (z > 0.0) & (z <= 0.5)
    if np.any(near):
        out[near] = _hyper_series_array((a, b), (c,), z[near], tol)
    far = z > 0.5
    if np.any(far):
        out[far] = hyp2f1_connection_array(a, b, c, z[far], tol)
    if not np.all(np.isfinite(out)):
        raise DivergenceError(f"2F1({a}, {b}; {c}) is not finite on some arguments")
    return out


def _asymptotic_tail(num, den, excess: float, n: int) -> float:
    """Sum of the terms from index n on, from their expansion K n^{-1-s} (1 + c1/n + c2/n^2)"""
    t_n = hyper_terms(num, den, 1.0, [n])[0]
    if t_n == 0.0:
        return 0.0
    lower = list(den) + [1.0]
    c1 = 0.5 * (sum(a * a - a for a in num) - sum(b * b - b for b in lower))
    d2 = -(sum(a * (a - 1) * (2 * a - 1) for a in num) - sum(b * (b - 1) * (2 * b - 1) for b in lower)) / 12.0
    scale = t_n * n ** (1.0 + excess) * math.exp(-c1 / n - d2 / n ** 2)
    return scale * (special.zeta(1.0 + excess, n)
                    + c1 * special.zeta(2.0 + excess, n)
                    + (0.5 * c1 * c1 + d2) * special.zeta(3.0 + excess, n))


def _unit_sum(num, den, excess: float, tol: float) -> SeriesValue:
    reach = max(abs(p) for p in list(num) + list(den))
    n = max(256, int(4 * reach) + 16)
    partial = float(np.sum(hyper_terms(num, den, 1.0, np.arange(n))))
    previous = partial + _asymptotic_tail(num, den, excess, n)
    err = math.inf
    while 2 * n <= MAX_SERIES_TERMS:
        partial += float(np.sum(hyper_terms(num, den, 1.0, np.arange(n, 2 * n))))
        n *= 2
        estimate = partial + _asymptotic_tail(num, den, excess, n)
        scale = abs(estimate) if estimate != 0.0 else 1.0
        err = abs(estimate - previous) / scale
        if err <= tol:
            return SeriesValue(estimate, n, err, True)
        previous = estimate
    logger.warning(f"3F2{tuple(num)}/{tuple(den)} at 1 did not settle within {n} terms")
    return SeriesValue(previous, n, err, False)


def _thomae(num, den, excess: float):
    """Thomae relation with the largest numerator parameter as pivot, when it raises the excess"""
    pivot = int(np.argmax(num))
    a = num[pivot]
    if a <= excess + 0.1:
        return None
    q, r = [p for i, p in enumerate(num) if i != pivot]
    lower = (excess + q, excess + r)
    if any(is_nonpositive_int(x) for x in lower):
        return None
    factor = gamma_ratio([den[0], den[1], excess], [a, lower[0], lower[1]])
    return factor, (den[0] - a, den[1] - a, excess), lower, a


def hyp3f2_unit(a1: float, a2: float, a3: float, b1: float, b2: float,
                tol: float = DEFAULT_TOL) -> SeriesValue:
    """3F2(a1, a2, a3; b1, b2; 1) with an asymptotic tail correction"""
    num = (a1, a2, a3)
    den = (b1, b2)
    order = termination_order(*num)
    if order is not None:
        return _hyper_polynomial(num, den, 1.0, order)
    for b in den:
        if is_nonpositive_int(b):
            raise PoleError(f"3F2 lower parameter {b} is a pole of the series")
    excess = b1 + b2 - a1 - a2 - a3
    if excess <= 0.0:
        raise DivergenceError(f"3F2 at 1 needs positive parameter excess, got {excess}")
    transformed = _thomae(num, den, excess)
    if transformed is None:
        return _unit_sum(num, den, excess, tol)
    factor, num, den, excess = transformed
    order = termination_order(*num)
    if order is not None:
        return _hyper_polynomial(num, den, 1.0, order).scaled(factor)
    return _unit_sum(num, den, excess, tol).scaled(factor)
