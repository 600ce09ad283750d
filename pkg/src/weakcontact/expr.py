"""Closed-form expressions over chart coordinates.

Grammar: numeric literals, coordinate names, ``pi``, unary and binary
``+ - * / **``, and calls to ``sin``, ``cos``, ``sqrt``, ``pow``.  The text
is parsed with :mod:`ast` and evaluated by a whitelist walker, so no Python
code ever runs.
"""

from __future__ import annotations

import ast
import math
import operator
from typing import Sequence

from . import jets
from .errors import InvalidConfig
from .manifold import Field

__all__ = ["parse_expression", "scalar_field"]

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: lambda a, b: jets.power(a, b),
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_FUNCS = {"sin": (jets.sin, 1), "cos": (jets.cos, 1), "sqrt": (jets.sqrt, 1), "pow": (jets.power, 2)}
_CONSTS = {"pi": math.pi}


def _check(node, names):
    if isinstance(node, ast.Expression):
        return _check(node.body, names)
    if isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
            raise InvalidConfig(f"unsupported literal {node.value!r}")
        return
    if isinstance(node, ast.Name):
        if node.id not in names and node.id not in _CONSTS:
            raise InvalidConfig(f"unknown name {node.id!r}; coordinates are {', '.join(names)}")
        return
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        _check(node.left, names)
        _check(node.right, names)
        return
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        _check(node.operand, names)
        return
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
        if node.keywords or len(node.args) != _FUNCS[node.func.id][1]:
            raise InvalidConfig(f"{node.func.id} takes {_FUNCS[node.func.id][1]} positional argument(s)")
        for a in node.args:
            _check(a, names)
        return
    raise InvalidConfig(f"unsupported syntax: {ast.dump(node)[:60]}")


def _eval(node, env):
    if isinstance(node, ast.Expression):
        return _eval(node.body, env)
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.Name):
        return env[node.id] if node.id in env else _CONSTS[node.id]
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval(node.left, env), _eval(node.right, env))
    if isinstance(node, ast.UnaryOp):
        return _UNARY[type(node.op)](_eval(node.operand, env))
    fn = _FUNCS[node.func.id][0]
    return fn(*(_eval(a, env) for a in node.args))


def parse_expression(text: str, names: Sequence[str]):
    """Compile ``text`` into ``expr(x)`` over a coordinate vector ``x``."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise InvalidConfig(f"cannot parse expression {text!r}: {exc.msg}") from None
    names = tuple(names)
    _check(tree, names)

    def expr(x):
        return _eval(tree, {n: x[i] for i, n in enumerate(names)})

    expr.source = text
    return expr


def scalar_field(text: str, names: Sequence[str]) -> Field:
    f = Field.closed_form(parse_expression(text, names), "scalar", text)
    return f
