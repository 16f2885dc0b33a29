"""Tiny arithmetic-expression compiler for user-supplied warping functions.

Only the variable ``t``, numeric literals, ``+ - * / **`` and the functions
in ``FUNCTIONS`` are accepted.  Anything else is rejected before evaluation.
"""

import ast

import numpy as np

FUNCTIONS = {
    "pow": np.power,
    "exp": np.exp,
    "log": np.log,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "sin": np.sin,
    "cos": np.cos,
}
CONSTANTS = {"pi": np.pi, "e": np.e}

_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}


class ExpressionError(ValueError):
    pass


def _build(node):
    if isinstance(node, ast.Expression):
        return _build(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        val = float(node.value)
        return lambda t: val
    if isinstance(node, ast.Name):
        if node.id == "t":
            return lambda t: t
        if node.id in CONSTANTS:
            val = CONSTANTS[node.id]
            return lambda t: val
        raise ExpressionError(f"unknown name {node.id!r}")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _build(node.operand)
        if isinstance(node.op, ast.USub):
            return lambda t: -inner(t)
        return inner
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        left, right = _build(node.left), _build(node.right)
        return lambda t: op(left(t), right(t))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        fn = FUNCTIONS.get(node.func.id)
        if fn is None:
            raise ExpressionError(f"unknown function {node.func.id!r}")
        if node.keywords:
            raise ExpressionError("keyword arguments are not allowed")
        args = [_build(a) for a in node.args]
        expected = 2 if node.func.id == "pow" else 1
        if len(args) != expected:
            raise ExpressionError(f"{node.func.id} takes {expected} argument(s)")
        return lambda t: fn(*(a(t) for a in args))
    raise ExpressionError(f"unsupported syntax: {ast.dump(node)[:60]}")


def compile_expression(text: str):
    """Return a numpy-vectorised callable ``f(t)`` for ``text``."""
    if not isinstance(text, str) or not text.strip():
        raise ExpressionError("expression must be a non-empty string")
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg}") from None
    fn = _build(tree)

    def f(t):
        out = fn(t)
        if np.ndim(t) and np.ndim(out) == 0:
            out = np.full(np.shape(t), out)
        return out

    return f
