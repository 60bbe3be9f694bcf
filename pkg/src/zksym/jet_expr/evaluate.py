"""Scalar evaluation and jets of closed-form functions."""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Mapping

from .calculus import partial_diff
from .expr import Add, Const, Coord, Expr, Func, Mul, Param, Pow
from .space import ZK_SPACE, JetSpace

JetPoint = dict  # coordinate name -> float


class UnboundSymbolError(KeyError):
    pass


class DomainError(ValueError):
    pass


def _pow(b: float, exp) -> float:
    if exp.denominator == 1:
        n = int(exp)
        if b == 0.0 and n < 0:
            raise DomainError("division by zero")
        return b**n
    if b < 0.0:
        if exp.denominator % 2 == 0:
            raise DomainError(f"even root of negative number {b!r}")
        r = (-b) ** (exp.numerator / exp.denominator)
        return -r if exp.numerator % 2 else r
    if b == 0.0 and exp < 0:
        raise DomainError("division by zero")
    return b ** (exp.numerator / exp.denominator)


def _func(name: str, v: float) -> float:
    if name == "exp":
        return math.exp(v)
    if name == "ln":
        if v <= 0.0:
            raise DomainError(f"ln of non-positive value {v!r}")
        return math.log(v)
    if name == "sin":
        return math.sin(v)
    if name == "cos":
        return math.cos(v)
    if name == "tan":
        return math.tan(v)
    if name == "tanh":
        return math.tanh(v)
    if name == "sech":
        return 1.0 / math.cosh(v)
    if name == "arctan":
        return math.atan(v)
    raise ValueError(name)


def evaluate(e: Expr, point: Mapping[str, float], params: Mapping[str, float] | None = None) -> float:
    """Evaluate ``e`` in double precision.

    Coordinates are looked up in ``point`` and parameters in ``params``.
    Raises :class:`UnboundSymbolError` for a missing symbol and
    :class:`DomainError` for logarithms of non-positive numbers, even roots of
    negative numbers and division by zero.
    """
    params = params or {}

    def ev(n: Expr) -> float:
        if isinstance(n, Const):
            return float(n.value)
        if isinstance(n, Coord):
            try:
                return float(point[n.name])
            except KeyError:
                raise UnboundSymbolError(n.name) from None
        if isinstance(n, Param):
            try:
                return float(params[n.name])
            except KeyError:
                raise UnboundSymbolError(n.name) from None
        if isinstance(n, Add):
            s = 0.0
            for t in n.terms:
                s += ev(t)
            return s
        if isinstance(n, Mul):
            p = 1.0
            for f in n.factors:
                p *= ev(f)
            return p
        if isinstance(n, Pow):
            return _pow(ev(n.base), n.exp)
        if isinstance(n, Func):
            return _func(n.name, ev(n.arg))
        raise TypeError(type(n))

    return ev(e)


@lru_cache(maxsize=256)
def derivative_table(expr: Expr, order: int = 3, space: JetSpace = ZK_SPACE) -> dict[str, Expr]:
    """Symbolic partial derivatives of a closed form ``u = expr(x, y, z, t)``.

    Returns a map from every dependent coordinate up to ``order`` (``u``,
    ``u_x``, ..., ``u_ttt``) to its expression in the base variables.
    """
    table: dict[str, Expr] = {space.dep: expr}
    for k in range(1, order + 1):
        for name in space.derivatives(k):
            c = space.classify(name)
            # differentiate a lower coordinate in its last base letter
            last = max(i for i, m in enumerate(c.multi) if m)
            lower = list(c.multi)
            lower[last] -= 1
            table[name] = partial_diff(table[space.deriv_name(tuple(lower))], space.base[last])
    return table


def solution_jet(
    expr: Expr,
    base: Mapping[str, float],
    params: Mapping[str, float] | None = None,
    order: int = 3,
    space: JetSpace = ZK_SPACE,
) -> JetPoint:
    """Evaluate ``u`` and its derivatives up to ``order`` at the base point."""
    point = {v: float(base[v]) for v in space.base}
    jet = dict(point)
    for name, d in derivative_table(expr, order, space).items():
        v = evaluate(d, point, params)
        if not math.isfinite(v):
            raise DomainError(f"{name} is not finite at {point}")
        jet[name] = v
    return jet
