import ast
import logging
from typing import Callable, Dict

import numpy as np

from core.errors import ParameterError

logger = logging.getLogger(__name__)

VARIABLES = ("x", "y")
CONSTANTS: Dict[str, float] = {"pi": float(np.pi), "e": float(np.e)}
FUNCTIONS: Dict[str, Callable] = {"exp": np.exp, "sin": np.sin, "cos": np.cos}

_BINARY = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}


class Expression:
    """
    Arithmetic expression in x and y.
    Grammar: numbers, x, y, pi, e, + - * / ^, unary minus, parentheses, exp(), sin(), cos().
    Calling the instance evaluates it elementwise on numpy arrays.
    """

    def __init__(self, text: str):
        self.text = text
        source = text.replace('^', '**')
        try:
            tree = ast.parse(source.strip(), mode="eval")
        except SyntaxError as exc:
            raise ParameterError(f"cannot parse expression {text!r}: {exc.msg}") from None
        self._root = self._compile(tree.body)
        logger.debug(f"compiled expression {text!r}")

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        with np.errstate(all="ignore"):
            value = self._root(x, y)
        return np.broadcast_to(np.asarray(value, dtype=float), np.broadcast(x, y).shape)

    def __repr__(self):
        return f"Expression({self.text!r})"

    def _compile(self, node: ast.AST) -> Callable:
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                raise ParameterError(f"unsupported literal {node.value!r} in {self.text!r}")
            value = float(node.value)
            return lambda x, y: value

        if isinstance(node, ast.Name):
            if node.id == "x":
                return lambda x, y: x
            if node.id == "y":
                return lambda x, y: y
            if node.id in CONSTANTS:
                value = CONSTANTS[node.id]
                return lambda x, y: value
            raise ParameterError(f"unknown name {node.id!r} in {self.text!r}")

        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            operand = self._compile(node.operand)
            if isinstance(node.op, ast.USub):
                return lambda x, y: np.negative(operand(x, y))
            return operand

        if isinstance(node, ast.BinOp) and type(node.op) in _BINARY:
            op = _BINARY[type(node.op)]
            left = self._compile(node.left)
            right = self._compile(node.right)
            return lambda x, y: op(left(x, y), right(x, y))

        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
                name = node.func.id if isinstance(node.func, ast.Name) else ast.unparse(node.func)
                raise ParameterError(f"unknown function {name!r} in {self.text!r}")
            if len(node.args) != 1 or node.keywords:
                raise ParameterError(f"{node.func.id}() takes exactly one argument")
            func = FUNCTIONS[node.func.id]
            arg = self._compile(node.args[0])
            return lambda x, y: func(arg(x, y))

        raise ParameterError(f"unsupported syntax {ast.unparse(node)!r} in {self.text!r}")


def parse_expression(text: str) -> Expression:
    if not text or not text.strip():
        raise ParameterError("empty expression")
    return Expression(text)
