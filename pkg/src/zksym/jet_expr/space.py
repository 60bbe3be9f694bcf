"""Jet-space coordinates.

A jet space is fixed by a tuple of single-letter independent variables, the
name of one dependent variable and a maximal derivative order.  Derivative
coordinates are written ``u_xy``; the letters after the underscore are kept in
the order of the base tuple, so ``u_yx`` and ``u_xy`` name the same
coordinate.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property


class JetOrderError(ValueError):
    """A derivative coordinate would exceed the maximal jet order."""


@dataclass(frozen=True)
class JetCoord:
    """One coordinate of a jet space.

    ``kind`` is ``"base"``, ``"dep"`` or ``"deriv"``.  For derivatives
    ``multi`` holds the number of differentiations per base variable.
    """

    name: str
    kind: str
    multi: tuple[int, ...] = ()

    @property
    def order(self) -> int:
        return sum(self.multi)


@dataclass(frozen=True)
class JetSpace:
    base: tuple[str, ...]
    dep: str
    max_order: int = 3

    def __post_init__(self):
        if any(len(b) != 1 for b in self.base):
            raise ValueError("base variable names must be single letters")
        if len(set(self.base)) != len(self.base):
            raise ValueError("duplicate base variable")
        if self.dep in self.base:
            raise ValueError("dependent variable clashes with a base variable")

    def deriv_name(self, multi: tuple[int, ...]) -> str:
        if sum(multi) == 0:
            return self.dep
        letters = "".join(b * k for b, k in zip(self.base, multi))
        return f"{self.dep}_{letters}"

    def classify(self, name: str) -> JetCoord | None:
        """Return the coordinate called ``name`` or ``None`` for a non-jet symbol.

        Raises :class:`JetOrderError` for a well-formed derivative name above
        ``max_order`` and :class:`ValueError` for a derivative suffix that uses
        letters outside the base.
        """
        if name in self.base:
            return JetCoord(name, "base")
        if name == self.dep:
            return JetCoord(name, "dep", (0,) * len(self.base))
        prefix = self.dep + "_"
        if not name.startswith(prefix):
            return None
        letters = name[len(prefix):]
        if not letters or any(ch not in self.base for ch in letters):
            raise ValueError(f"bad derivative coordinate {name!r}")
        multi = tuple(letters.count(b) for b in self.base)
        if sum(multi) > self.max_order:
            raise JetOrderError(
                f"{name!r} has order {sum(multi)} > {self.max_order}"
            )
        return JetCoord(self.deriv_name(multi), "deriv", multi)

    def canonical(self, name: str) -> str:
        c = self.classify(name)
        return name if c is None else c.name

    def is_coord(self, name: str) -> bool:
        try:
            return self.classify(name) is not None
        except ValueError:
            return False

    def order(self, name: str) -> int:
        c = self.classify(name)
        if c is None or c.kind == "base":
            return 0
        return c.order

    def extend(self, name: str, var: str) -> str:
        """Name of the coordinate obtained by differentiating ``name`` in ``var``."""
        c = self.classify(name)
        if c is None or c.kind == "base":
            raise ValueError(f"{name!r} is not a dependent-variable coordinate")
        i = self.base.index(var)
        multi = list(c.multi)
        multi[i] += 1
        if sum(multi) > self.max_order:
            raise JetOrderError(f"D_{var} {name} exceeds order {self.max_order}")
        return self.deriv_name(tuple(multi))

    def derivatives(self, order: int) -> list[str]:
        """All derivative names of exactly ``order``, in canonical order."""
        out = []
        for combo in itertools.combinations_with_replacement(range(len(self.base)), order):
            multi = [0] * len(self.base)
            for i in combo:
                multi[i] += 1
            out.append(self.deriv_name(tuple(multi)))
        return out

    @cached_property
    def all_coords(self) -> tuple[str, ...]:
        names = list(self.base) + [self.dep]
        for k in range(1, self.max_order + 1):
            names.extend(self.derivatives(k))
        return tuple(names)

    def dependent_coords(self, max_order: int | None = None) -> list[str]:
        top = self.max_order if max_order is None else max_order
        names = [self.dep]
        for k in range(1, top + 1):
            names.extend(self.derivatives(k))
        return names


ZK_SPACE = JetSpace(("x", "y", "z", "t"), "u", 3)
