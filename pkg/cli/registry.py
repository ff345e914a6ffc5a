import logging
from dataclasses import dataclass
from math import factorial
from typing import Callable, Dict, Optional

import numpy as np

from core.quad_oracle import ScalarField2D
from utils.expression import parse_expression

logger = logging.getLogger(__name__)

# x^3 y^2 - 2 x^2 y + 3 x y - y + 1 as {(power_x, power_y): coefficient}
POLYNOMIAL = {(3, 2): 1.0, (2, 1): -2.0, (1, 1): 3.0, (0, 1): -1.0, (0, 0): 1.0}


@dataclass(frozen=True)
class RegistryFunction:
    """Test function with its analytic partials and, when it decays, its fractional reference"""
    name: str
    func: ScalarField2D
    partial: Optional[Callable[[int, int], ScalarField2D]] = None
    fractional: Optional[ScalarField2D] = None


def _falling(power: int, order: int) -> float:
    return factorial(power) / factorial(power - order) if order <= power else 0.0


def _polynomial_partial(m: int, l: int) -> ScalarField2D:
    terms = [(px - m, py - l, coef * _falling(px, m) * _falling(py, l))
             for (px, py), coef in POLYNOMIAL.items() if px >= m and py >= l]

    def field(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        total = np.zeros(np.broadcast(x, y).shape)
        for px, py, coef in terms:
            total = total + coef * x ** px * y ** py
        return total

    return field


def _trig_partial(m: int, l: int) -> ScalarField2D:
    # d/dx shifts the phase by pi/2, d/dy also scales by 2
    return lambda x, y: 2.0 ** l * np.sin(np.asarray(x) + 2 * np.asarray(y) + (m + l) * np.pi / 2)


def _exp_decay(x, y):
    return np.exp(-np.asarray(x, dtype=float) - np.asarray(y, dtype=float))


BUILTINS: Dict[str, RegistryFunction] = {
    "polynomial": RegistryFunction("polynomial", _polynomial_partial(0, 0), _polynomial_partial),
    "exp-decay": RegistryFunction(
        "exp-decay", _exp_decay,
        lambda m, l: (lambda x, y: (-1.0) ** (m + l) * _exp_decay(x, y)),
        fractional=_exp_decay),
    "exp": RegistryFunction(
        "exp", lambda x, y: np.exp(np.asarray(x, dtype=float) + np.asarray(y, dtype=float)),
        lambda m, l: (lambda x, y: np.exp(np.asarray(x, dtype=float) + np.asarray(y, dtype=float)))),
    "trig": RegistryFunction("trig", _trig_partial(0, 0), _trig_partial),
}


def lookup(name: str) -> RegistryFunction:
    """Built-in function by name, otherwise the text parsed as an expression in x and y"""
    if name in BUILTINS:
        return BUILTINS[name]
    logger.debug(f"'{name}' is not a built-in test function; parsing it as an expression")
    return RegistryFunction(name, parse_expression(name))
