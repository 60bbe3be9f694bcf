"""Immutable expression trees with syntactic normalization.

Nodes are built through the smart constructors :func:`add`, :func:`mul`,
:func:`power` and :func:`func`, which return normalized trees when given
normalized arguments: n-ary sums and products are flattened and sorted, like
terms and like factors are collected, constants are folded exactly (numeric
literals are :class:`fractions.Fraction`), ``x^0 -> 1``, ``x^1 -> x`` and zero
annihilates products.  Quotients are products with negative exponents and
``sqrt`` is the power ``1/2``.  Nothing beyond that is attempted; there are no
trigonometric or logarithmic identities.

Structural equality compares a canonical prefix serialization (``key``).
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Union

Number = Union[Fraction, float]

FUNCTIONS = ("exp", "ln", "sin", "cos", "tan", "tanh", "sech", "sqrt", "arctan")


class Expr:
    __slots__ = ("_key", "_hash")

    def _make_key(self) -> str:  # pragma: no cover - abstract
        raise NotImplementedError

    @property
    def key(self) -> str:
        try:
            return self._key
        except AttributeError:
            k = self._make_key()
            object.__setattr__(self, "_key", k)
            return k

    def __eq__(self, other):
        if not isinstance(other, Expr):
            return NotImplemented
        return self is other or self.key == other.key

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = hash(self.key)
            object.__setattr__(self, "_hash", h)
            return h

    def __setattr__(self, name, value):
        raise AttributeError("Expr nodes are immutable")

    def __repr__(self):
        from .parse import to_string

        return f"Expr({to_string(self)!r})"

    def __str__(self):
        from .parse import to_string

        return to_string(self)

    # arithmetic builds normalized trees
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, power(as_expr(other), -1))

    def __rtruediv__(self, other):
        return mul(as_expr(other), power(self, -1))

    def __pow__(self, other):
        if isinstance(other, Expr):
            if not isinstance(other, Const):
                raise ValueError("exponent must be a rational constant")
            other = other.value
        return power(self, other)

    def __neg__(self):
        return neg(self)

    def __pos__(self):
        return self

    @property
    def children(self) -> tuple["Expr", ...]:
        return ()


def _init(node, **fields):
    for k, v in fields.items():
        object.__setattr__(node, k, v)


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value: Number | int):
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            value = Fraction(value)
        elif isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError("non-finite constant")
            if value.is_integer():
                value = Fraction(int(value))
        elif not isinstance(value, Fraction):
            raise TypeError(f"bad constant {value!r}")
        _init(self, value=value)

    def _make_key(self):
        v = self.value
        return "#" + (str(v) if isinstance(v, Fraction) else "f" + repr(v))

    @property
    def is_exact(self) -> bool:
        return isinstance(self.value, Fraction)


class Coord(Expr):
    """A jet-space coordinate (base variable, dependent variable or derivative)."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        _init(self, name=name)

    def _make_key(self):
        return "@" + self.name


class Param(Expr):
    """A named parameter such as ``a``, ``C`` or ``b2``."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        _init(self, name=name)

    def _make_key(self):
        return "$" + self.name


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Expr]):
        _init(self, terms=tuple(terms))

    def _make_key(self):
        return "+(" + ",".join(t.key for t in self.terms) + ")"

    @property
    def children(self):
        return self.terms


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors: Iterable[Expr]):
        _init(self, factors=tuple(factors))

    def _make_key(self):
        return "*(" + ",".join(f.key for f in self.factors) + ")"

    @property
    def children(self):
        return self.factors


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base: Expr, exp: Fraction | int):
        _init(self, base=base, exp=Fraction(exp))

    def _make_key(self):
        return "^(" + self.base.key + "," + str(self.exp) + ")"

    @property
    def children(self):
        return (self.base,)


class Func(Expr):
    __slots__ = ("name", "arg")

    def __init__(self, name: str, arg: Expr):
        if name not in FUNCTIONS:
            raise ValueError(f"unknown function {name!r}")
        _init(self, name=name, arg=arg)

    def _make_key(self):
        return "~" + self.name + "(" + self.arg.key + ")"

    @property
    def children(self):
        return (self.arg,)


ZERO = Const(0)
ONE = Const(1)
MINUS_ONE = Const(-1)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float, Fraction)):
        return Const(value)
    raise TypeError(f"cannot convert {value!r} to Expr")


def is_zero(e: Expr) -> bool:
    return isinstance(e, Const) and e.value == 0


def is_one(e: Expr) -> bool:
    return isinstance(e, Const) and e.value == 1


def _fold(a: Number, b: Number, op) -> Number:
    r = op(a, b)
    if isinstance(r, float) and r.is_integer():
        return Fraction(int(r))
    return r


def split_coeff(e: Expr) -> tuple[Number, Expr]:
    """Split ``e`` into a numeric coefficient and the remaining factor."""
    if isinstance(e, Const):
        return e.value, ONE
    if isinstance(e, Mul) and isinstance(e.factors[0], Const):
        rest = e.factors[1:]
        return e.factors[0].value, rest[0] if len(rest) == 1 else Mul(rest)
    return Fraction(1), e


def _with_coeff(c: Number, rest: Expr) -> Expr:
    if c == 0:
        return ZERO
    if is_one(rest):
        return Const(c)
    if c == 1:
        return rest
    if isinstance(rest, Mul):
        return Mul((Const(c),) + rest.factors)
    return Mul((Const(c), rest))


def add(*terms: Expr) -> Expr:
    flat: list[Expr] = []
    for t in terms:
        if isinstance(t, Add):
            flat.extend(t.terms)
        else:
            flat.append(as_expr(t))
    const: Number = Fraction(0)
    groups: dict[str, list] = {}
    for t in flat:
        if isinstance(t, Const):
            const = _fold(const, t.value, lambda p, q: p + q)
            continue
        c, rest = split_coeff(t)
        g = groups.get(rest.key)
        if g is None:
            groups[rest.key] = [c, rest]
        else:
            g[0] = _fold(g[0], c, lambda p, q: p + q)
    out = [_with_coeff(c, rest) for c, rest in groups.values() if c != 0]
    out.sort(key=lambda e: e.key)
    if const != 0:
        out.insert(0, Const(const))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return Add(out)


def _base_exp(f: Expr) -> tuple[Expr, Fraction]:
    if isinstance(f, Pow):
        return f.base, f.exp
    return f, Fraction(1)


def mul(*factors: Expr) -> Expr:
    flat: list[Expr] = []
    for f in factors:
        if isinstance(f, Mul):
            flat.extend(f.factors)
        else:
            flat.append(as_expr(f))
    coeff: Number = Fraction(1)
    groups: dict[str, list] = {}
    for f in flat:
        if isinstance(f, Const):
            if f.value == 0:
                return ZERO
            coeff = _fold(coeff, f.value, lambda p, q: p * q)
            continue
        b, e = _base_exp(f)
        g = groups.get(b.key)
        if g is None:
            groups[b.key] = [b, e]
        else:
            g[1] += e
    out: list[Expr] = []
    for b, e in groups.values():
        p = power(b, e)
        if isinstance(p, Const):
            coeff = _fold(coeff, p.value, lambda p_, q: p_ * q)
            if coeff == 0:
                return ZERO
        elif isinstance(p, Mul):
            for f in p.factors:
                if isinstance(f, Const):
                    coeff = _fold(coeff, f.value, lambda p_, q: p_ * q)
                else:
                    out.append(f)
        else:
            out.append(p)
    out.sort(key=lambda e: e.key)
    # powers produced by distribution may share a base with an existing factor
    if len({(_base_exp(f)[0]).key for f in out}) != len(out):
        return mul(Const(coeff), *out)
    if not out:
        return Const(coeff)
    if coeff != 1:
        out.insert(0, Const(coeff))
    if len(out) == 1:
        return out[0]
    return Mul(out)


def _const_power(v: Number, e: Fraction) -> Expr | None:
    if e.denominator == 1:
        n = int(e)
        if v == 0 and n < 0:
            return None
        if isinstance(v, Fraction):
            return Const(v**n)
        return Const(float(v) ** n)
    if isinstance(v, Fraction) and v > 0:
        # exact roots of perfect powers
        num = _exact_root(v.numerator, e.denominator)
        den = _exact_root(v.denominator, e.denominator)
        if num is not None and den is not None:
            return Const(Fraction(num, den) ** e.numerator)
    return None


def _exact_root(n: int, k: int) -> int | None:
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    return None


def power(base: Expr, exp) -> Expr:
    base = as_expr(base)
    if isinstance(exp, float):
        exp = Fraction(exp).limit_denominator(10**6)
    exp = Fraction(exp)
    if exp == 0:
        return ONE
    if exp == 1:
        return base
    if isinstance(base, Const):
        folded = _const_power(base.value, exp)
        if folded is not None:
            return folded
        return Pow(base, exp)
    if isinstance(base, Pow) and exp.denominator == 1:
        return power(base.base, base.exp * exp)
    if isinstance(base, Mul) and exp.denominator == 1:
        return mul(*(power(f, exp) for f in base.factors))
    return Pow(base, exp)


def neg(e: Expr) -> Expr:
    return mul(MINUS_ONE, e)


_EXACT_AT_ZERO = {"exp": 1, "sin": 0, "cos": 1, "tan": 0, "tanh": 0, "sech": 1, "arctan": 0}


def func(name: str, arg: Expr) -> Expr:
    arg = as_expr(arg)
    if name == "sqrt":
        return power(arg, Fraction(1, 2))
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    if isinstance(arg, Const) and arg.value == 0 and name in _EXACT_AT_ZERO:
        return Const(_EXACT_AT_ZERO[name])
    if name == "ln":
        if isinstance(arg, Const) and arg.value == 1:
            return ZERO
        if isinstance(arg, Func) and arg.name == "exp":
            return arg.arg
    return Func(name, arg)


def normalize(e: Expr) -> Expr:
    """Rebuild ``e`` bottom-up through the smart constructors."""
    if isinstance(e, (Const, Coord, Param)):
        return e
    if isinstance(e, Add):
        return add(*(normalize(t) for t in e.terms))
    if isinstance(e, Mul):
        return mul(*(normalize(f) for f in e.factors))
    if isinstance(e, Pow):
        return power(normalize(e.base), e.exp)
    if isinstance(e, Func):
        return func(e.name, normalize(e.arg))
    raise TypeError(type(e))


def expand(e: Expr) -> Expr:
    """Distribute products over sums and expand positive integer powers of sums."""
    if isinstance(e, (Const, Coord, Param)):
        return e
    if isinstance(e, Add):
        return add(*(expand(t) for t in e.terms))
    if isinstance(e, Func):
        return func(e.name, expand(e.arg))
    if isinstance(e, Pow):
        b = expand(e.base)
        if isinstance(b, Add) and e.exp.denominator == 1 and 1 < e.exp <= 8:
            out = b
            for _ in range(int(e.exp) - 1):
                out = _distribute(out, b)
            return out
        return power(b, e.exp)
    if isinstance(e, Mul):
        out: Expr = ONE
        for f in e.factors:
            out = _distribute(out, expand(f))
        return out
    raise TypeError(type(e))


def _distribute(a: Expr, b: Expr) -> Expr:
    ta = a.terms if isinstance(a, Add) else (a,)
    tb = b.terms if isinstance(b, Add) else (b,)
    return add(*(mul(p, q) for p in ta for q in tb))


def simplify(e: Expr) -> Expr:
    """Expansion followed by normalization; the strongest rewrite offered."""
    return normalize(expand(e))


def symbols(e: Expr) -> tuple[set[str], set[str]]:
    """Return the (coordinate names, parameter names) referenced by ``e``."""
    coords: set[str] = set()
    params: set[str] = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, Coord):
            coords.add(n.name)
        elif isinstance(n, Param):
            params.add(n.name)
        else:
            stack.extend(n.children)
    return coords, params


def substitute(e: Expr, mapping: dict[str, Expr]) -> Expr:
    """Replace coordinates or parameters by name; the result is normalized."""
    if not mapping:
        return e
    if isinstance(e, (Coord, Param)):
        return mapping.get(e.name, e)
    if isinstance(e, Const):
        return e
    if isinstance(e, Add):
        return add(*(substitute(t, mapping) for t in e.terms))
    if isinstance(e, Mul):
        return mul(*(substitute(f, mapping) for f in e.factors))
    if isinstance(e, Pow):
        return power(substitute(e.base, mapping), e.exp)
    if isinstance(e, Func):
        return func(e.name, substitute(e.arg, mapping))
    raise TypeError(type(e))


def count_nodes(e: Expr) -> int:
    return 1 + sum(count_nodes(c) for c in e.children)
