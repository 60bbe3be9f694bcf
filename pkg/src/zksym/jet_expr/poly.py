"""Exact coefficient extraction for Laurent polynomials."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .expr import Add, Const, Coord, Expr, Mul, Param, Pow, expand

Monomial = tuple[int, ...]


class NotPolynomialError(ValueError):
    pass


def _mono_mul(p: dict, q: dict) -> dict:
    out: dict[Monomial, Fraction] = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            out[m] = out.get(m, Fraction(0)) + c1 * c2
    return {m: c for m, c in out.items() if c != 0}


def laurent_coeffs(e: Expr, names: Sequence[str]) -> dict[Monomial, Fraction]:
    """Return ``{exponents: coefficient}`` for ``e`` as a Laurent polynomial in ``names``.

    Every symbol of ``e`` must be listed in ``names`` and every constant must
    be rational; otherwise :class:`NotPolynomialError` is raised.
    """
    index = {n: i for i, n in enumerate(names)}
    zero = (0,) * len(names)

    def walk(n: Expr) -> dict[Monomial, Fraction]:
        if isinstance(n, Const):
            if not isinstance(n.value, Fraction):
                raise NotPolynomialError("floating-point coefficient")
            return {zero: n.value} if n.value != 0 else {}
        if isinstance(n, (Coord, Param)):
            if n.name not in index:
                raise NotPolynomialError(f"unexpected symbol {n.name!r}")
            m = [0] * len(names)
            m[index[n.name]] = 1
            return {tuple(m): Fraction(1)}
        if isinstance(n, Add):
            out: dict[Monomial, Fraction] = {}
            for t in n.terms:
                for m, c in walk(t).items():
                    out[m] = out.get(m, Fraction(0)) + c
            return {m: c for m, c in out.items() if c != 0}
        if isinstance(n, Mul):
            out = {zero: Fraction(1)}
            for f in n.factors:
                out = _mono_mul(out, walk(f))
            return out
        if isinstance(n, Pow) and n.exp.denominator == 1:
            inner = walk(n.base)
            k = int(n.exp)
            if k < 0:
                if len(inner) != 1:
                    raise NotPolynomialError("negative power of a sum")
                (m, c), = inner.items()
                return {tuple(k * v for v in m): c**k}
            out = {zero: Fraction(1)}
            for _ in range(k):
                out = _mono_mul(out, inner)
            return out
        raise NotPolynomialError(f"not a Laurent polynomial: {n}")

    return walk(expand(e))
