"""Partial and total derivatives on jet space."""
from __future__ import annotations

from functools import lru_cache

from .expr import (
    ONE,
    ZERO,
    Add,
    Const,
    Coord,
    Expr,
    Func,
    Mul,
    Param,
    Pow,
    add,
    func,
    mul,
    neg,
    power,
)
from .space import ZK_SPACE, JetSpace


@lru_cache(maxsize=None)
def free_names(e: Expr) -> frozenset[str]:
    if isinstance(e, (Coord, Param)):
        return frozenset((e.name,))
    if isinstance(e, Const):
        return frozenset()
    out: frozenset[str] = frozenset()
    for c in e.children:
        out = out | free_names(c)
    return out


def _func_derivative(name: str, g: Expr) -> Expr:
    if name == "exp":
        return func("exp", g)
    if name == "ln":
        return power(g, -1)
    if name == "sin":
        return func("cos", g)
    if name == "cos":
        return neg(func("sin", g))
    if name == "tan":
        return add(ONE, power(func("tan", g), 2))
    if name == "tanh":
        return power(func("sech", g), 2)
    if name == "sech":
        return neg(mul(func("sech", g), func("tanh", g)))
    if name == "arctan":
        return power(add(ONE, power(g, 2)), -1)
    raise ValueError(name)


@lru_cache(maxsize=200_000)
def partial_diff(e: Expr, name: str) -> Expr:
    """Derivative of ``e`` in the symbol ``name``; all other symbols are held fixed.

    Jet coordinates are treated as independent variables, so
    ``partial_diff(u*u_x, "u_x") == u``.
    """
    if name not in free_names(e):
        return ZERO
    if isinstance(e, (Coord, Param)):
        return ONE
    if isinstance(e, Add):
        return add(*(partial_diff(t, name) for t in e.terms))
    if isinstance(e, Mul):
        fs = e.factors
        terms = []
        for i, f in enumerate(fs):
            df = partial_diff(f, name)
            if isinstance(df, Const) and df.value == 0:
                continue
            terms.append(mul(*fs[:i], df, *fs[i + 1:]))
        return add(*terms)
    if isinstance(e, Pow):
        return mul(Const(e.exp), power(e.base, e.exp - 1), partial_diff(e.base, name))
    if isinstance(e, Func):
        return mul(_func_derivative(e.name, e.arg), partial_diff(e.arg, name))
    raise TypeError(type(e))


def total_derivative(e: Expr, var: str, space: JetSpace = ZK_SPACE) -> Expr:
    """``D_var e``: explicit dependence plus the chain rule through every jet coordinate.

    Raises :class:`~zksym.jet_expr.space.JetOrderError` when a coordinate of
    maximal order would need to be extended.
    """
    if var not in space.base:
        raise ValueError(f"{var!r} is not a base variable of {space}")
    terms = [partial_diff(e, var)]
    for name in sorted(free_names(e)):
        c = space.classify(name)
        if c is None or c.kind == "base":
            continue
        d = partial_diff(e, name)
        if isinstance(d, Const) and d.value == 0:
            continue
        terms.append(mul(d, Coord(space.extend(name, var))))
    return add(*terms)


def total_derivative_multi(e: Expr, vars_: str | tuple[str, ...], space: JetSpace = ZK_SPACE) -> Expr:
    for v in vars_:
        e = total_derivative(e, v, space)
    return e


def jet_order(e: Expr, space: JetSpace = ZK_SPACE) -> int:
    """Highest derivative order of the dependent variable appearing in ``e``."""
    best = 0
    for name in free_names(e):
        try:
            best = max(best, space.order(name) if space.is_coord(name) else 0)
        except ValueError:
            continue
    return best


def gradient(e: Expr, names) -> list[Expr]:
    return [partial_diff(e, n) for n in names]


__all__ = [
    "free_names",
    "partial_diff",
    "total_derivative",
    "total_derivative_multi",
    "jet_order",
    "gradient",
]
