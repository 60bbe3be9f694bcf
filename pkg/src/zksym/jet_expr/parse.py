"""Infix parser and canonical printer for :mod:`zksym.jet_expr` expressions.

Grammar (see ``docs/grammar.md``)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("+" | "-") unary | power
    power   := atom ("^" unary)?
    atom    := NUMBER | NAME | NAME "(" expr ")" | "(" expr ")"

Names are classified against a :class:`~zksym.jet_expr.space.JetSpace`:
base variables, the dependent variable and ``u_xy``-style derivatives become
coordinates, everything else is a parameter.  ``pi`` is the float constant.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction

from .expr import (
    FUNCTIONS,
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
from .space import ZK_SPACE, JetOrderError, JetSpace


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[0]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, space: JetSpace):
        self.tokens = _tokenize(text)
        self.i = 0
        self.space = space

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> Expr:
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            e = add(e, rhs) if op == "+" else add(e, neg(rhs))
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            e = mul(e, rhs) if op == "*" else mul(e, power(rhs, -1))
        return e

    def unary(self) -> Expr:
        if self.peek()[1] == "-":
            self.take()
            return neg(self.unary())
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[1] == "^":
            pos = self.take()[2]
            ex = self.unary()
            if not isinstance(ex, Const) or not isinstance(ex.value, Fraction):
                raise ParseError("exponent must be a rational constant", pos)
            return power(base, ex.value)
        return base

    def atom(self) -> Expr:
        kind, val, pos = self.take()
        if kind == "num":
            return Const(Fraction(val))
        if kind == "name":
            if self.peek()[1] == "(":
                if val not in FUNCTIONS:
                    raise ParseError(f"unknown function {val!r}", pos)
                self.take()
                arg = self.expr()
                self.expect(")")
                return func(val, arg)
            if val == "pi":
                return Const(math.pi)
            try:
                c = self.space.classify(val)
            except JetOrderError as exc:
                raise ParseError(f"derivative order too high: {exc}", pos) from None
            except ValueError as exc:
                raise ParseError(str(exc), pos) from None
            return Coord(c.name) if c is not None else Param(val)
        if val == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos)


def parse(text: str, space: JetSpace = ZK_SPACE) -> Expr:
    """Parse ``text`` into a normalized expression over ``space``."""
    return _Parser(text, space).parse()


# -- printing -----------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4


def _num(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return repr(float(v))


def _prec(e: Expr) -> int:
    if isinstance(e, Add):
        return _PREC_ADD
    if isinstance(e, Mul):
        return _PREC_MUL
    if isinstance(e, Pow):
        if e.exp == Fraction(1, 2):
            return _PREC_ATOM
        return _PREC_MUL if e.exp < 0 else _PREC_POW
    if isinstance(e, Const):
        v = e.value
        if v < 0 or (isinstance(v, Fraction) and v.denominator != 1):
            return _PREC_MUL if v > 0 else _PREC_ADD
        if isinstance(v, float) and ("e" in repr(v) or v < 0):
            return _PREC_ADD
    return _PREC_ATOM


def _wrap(e: Expr, min_prec: int) -> str:
    s = to_string(e)
    return f"({s})" if _prec(e) < min_prec else s


def _product(num: list[str], den: list[str]) -> str:
    top = "*".join(num) if num else "1"
    if not den:
        return top
    bottom = den[0] if len(den) == 1 else "(" + "*".join(den) + ")"
    return f"{top}/{bottom}"


def _factor_str(f: Expr) -> str:
    return _wrap(f, _PREC_POW if not isinstance(f, Pow) else _PREC_MUL)


def _mul_string(coeff, factors: list[Expr]) -> str:
    sign = ""
    num: list[str] = []
    den: list[str] = []
    if coeff < 0:
        sign = "-"
        coeff = -coeff
    if isinstance(coeff, Fraction):
        if coeff.numerator != 1:
            num.append(str(coeff.numerator))
        if coeff.denominator != 1:
            den.append(str(coeff.denominator))
    elif coeff != 1:
        num.append(repr(float(coeff)))
    for f in factors:
        if isinstance(f, Pow) and f.exp < 0:
            den.append(_factor_str(power(f.base, -f.exp)))
        else:
            num.append(_factor_str(f))
    return sign + _product(num, den)


def to_string(e: Expr) -> str:
    """Canonical infix form; ``parse(to_string(e)) == e`` for exact trees."""
    if isinstance(e, Const):
        return _num(e.value)
    if isinstance(e, (Coord, Param)):
        return e.name
    if isinstance(e, Func):
        return f"{e.name}({to_string(e.arg)})"
    if isinstance(e, Pow):
        if e.exp == Fraction(1, 2):
            return f"sqrt({to_string(e.base)})"
        if e.exp < 0:
            return _mul_string(Fraction(1), [e])
        ex = str(e.exp) if e.exp.denominator == 1 else f"({e.exp})"
        return f"{_wrap(e.base, _PREC_ATOM)}^{ex}"
    if isinstance(e, Mul):
        fs = list(e.factors)
        coeff = Fraction(1)
        if isinstance(fs[0], Const):
            coeff = fs.pop(0).value
        return _mul_string(coeff, fs)
    if isinstance(e, Add):
        parts: list[str] = []
        for i, t in enumerate(e.terms):
            s = to_string(t)
            if i == 0:
                parts.append(s)
            elif s.startswith("-"):
                parts.append(" - " + s[1:])
            else:
                parts.append(" + " + s)
        return "".join(parts)
    raise TypeError(type(e))
