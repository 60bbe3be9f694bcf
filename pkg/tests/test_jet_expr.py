import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import expressions
from _sympy_oracle import to_sympy
from zksym.jet_expr import (
    ONE,
    ZERO,
    Const,
    Coord,
    DomainError,
    JetOrderError,
    NotPolynomialError,
    Param,
    ParseError,
    UnboundSymbolError,
    ZK_SPACE,
    add,
    derivative_table,
    evaluate,
    expand,
    free_names,
    jet_order,
    laurent_coeffs,
    mul,
    normalize,
    parse,
    partial_diff,
    power,
    simplify,
    solution_jet,
    substitute,
    to_string,
    total_derivative,
)

POINT = {"x": 0.3, "y": -0.7, "z": 0.2, "t": 0.9, "u": 0.4, "u_x": -0.6, "u_y": 0.5, "u_z": 0.1, "u_t": 0.8,
         "u_xx": 0.25, "u_xy": -0.35, "u_yy": 0.15, "u_xt": 0.05, "u_yt": -0.45, "u_tt": 0.6, "u_xz": 0.3,
         "u_yz": -0.2, "u_zz": 0.7, "u_zt": 0.12}
PARAMS = {"a": 1.3}


@pytest.mark.parametrize(
    "text, expected",
    [
        ("x + x", "2*x"),
        ("x*x", "x^2"),
        ("x - x", "0"),
        ("2*x/4", "x/2"),
        ("(x^2)^(1/2)", "sqrt(x^2)"),
        ("0.5*u", "u/2"),
        ("sqrt(4)", "2"),
        ("exp(0)", "1"),
        ("-x^2", "-x^2"),
    ],
)
def test_canonical_forms(text, expected):
    assert to_string(parse(text)) == expected


@pytest.mark.parametrize(
    "text",
    ["a*u*u_x + u_t + u_xx + u_yy + u_zz", "x/(a*t)", "tanh((x - t)/2)", "(1 + y^2)^(-3/2)", "arctan(x/y)*sech(t)"],
)
def test_round_trip_examples(text):
    e = parse(text)
    assert parse(to_string(e)) == e


@given(expressions())
def test_round_trip_property(e):
    assert parse(to_string(e)) == e


@given(expressions())
def test_normalize_idempotent(e):
    n = normalize(e)
    assert normalize(n) == n
    assert simplify(simplify(e)) == simplify(e)


@pytest.mark.parametrize(
    "text, err",
    [("x +", ParseError), ("foo(x)", ParseError), ("x^y", ParseError), ("(x", ParseError), ("x $ y", ParseError),
     ("u_xxxx", ParseError), ("u_xq", ValueError)],
)
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse(text)


def test_parse_error_position():
    with pytest.raises(ParseError) as ei:
        parse("x + * y")
    assert ei.value.position == 4


def test_coordinates_and_parameters():
    e = parse("a*u*u_x + x*C1")
    assert free_names(e) >= {"a", "u", "u_x", "x", "C1"}
    assert partial_diff(e, "u_x") == parse("a*u")
    assert partial_diff(e, "C1") == Coord("x")
    assert jet_order(e) == 1
    assert jet_order(parse("u_xyz")) == 3


def test_substitute_coord_and_param():
    e = parse("a*x + y")
    assert substitute(e, {"a": Const(2), "x": parse("t")}) == parse("2*t + y")


def test_laurent_coeffs():
    c = laurent_coeffs(parse("3*x^2*y - x/y + 1/2"), ("x", "y"))
    assert c == {(2, 1): Fraction(3), (1, -1): Fraction(-1), (0, 0): Fraction(1, 2)}
    with pytest.raises(NotPolynomialError):
        laurent_coeffs(parse("sin(x)"), ("x",))


@pytest.mark.parametrize(
    "text, point, expected",
    [
        ("x^2 + y", {"x": 2, "y": 1}, 5.0),
        ("sqrt(x)", {"x": 9}, 3.0),
        ("arctan(x)", {"x": 1}, math.pi / 4),
        ("sech(x)", {"x": 0}, 1.0),
        ("x^(1/3)", {"x": -8}, -2.0),
    ],
)
def test_evaluate(text, point, expected):
    assert evaluate(parse(text), point) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("text, point", [("ln(x)", {"x": -1}), ("1/x", {"x": 0}), ("sqrt(x)", {"x": -1})])
def test_evaluate_domain_errors(text, point):
    with pytest.raises(DomainError):
        evaluate(parse(text), point)


def test_unbound_symbol():
    with pytest.raises(UnboundSymbolError):
        evaluate(parse("a*x"), {"x": 1.0})


@pytest.mark.parametrize("var", ["x", "t", "u", "u_x", "a"])
@given(e=expressions())
def test_partial_diff_matches_sympy(var, e):
    d = partial_diff(e, var)
    want = sp.diff(to_sympy(e), sp.Symbol(var))
    env = {sp.Symbol(k): v for k, v in {**POINT, **PARAMS}.items()}
    try:
        got = evaluate(d, POINT, PARAMS)
    except DomainError:
        return
    ref = complex(want.evalf(subs=env))
    assume(math.isfinite(got) and abs(ref.imag) < 1e-12)
    assert got == pytest.approx(ref.real, rel=1e-9, abs=1e-9)


@given(e=expressions(names=("x", "y", "t")))
def test_partial_diff_matches_finite_differences(e):
    h = 1e-5
    p = dict(POINT)
    try:
        d = evaluate(partial_diff(e, "x"), p, PARAMS)
        fp = evaluate(e, {**p, "x": p["x"] + h}, PARAMS)
        fm = evaluate(e, {**p, "x": p["x"] - h}, PARAMS)
    except DomainError:
        return
    assume(all(math.isfinite(v) and abs(v) < 1e6 for v in (d, fp, fm)))
    assert (fp - fm) / (2 * h) == pytest.approx(d, rel=1e-5, abs=1e-5)


FIRST_ORDER = expressions(names=("x", "y", "t", "u", "u_x", "u_y"), depth=2)


@given(f=FIRST_ORDER, g=FIRST_ORDER)
def test_leibniz_rule(f, g):
    for v in ("x", "t"):
        lhs = total_derivative(mul(f, g), v)
        rhs = add(mul(total_derivative(f, v), g), mul(f, total_derivative(g, v)))
        assert simplify(add(lhs, mul(Const(-1), rhs))) == ZERO


@given(f=FIRST_ORDER)
def test_total_derivatives_commute(f):
    dxy = total_derivative(total_derivative(f, "x"), "y")
    dyx = total_derivative(total_derivative(f, "y"), "x")
    assert simplify(dxy) == simplify(dyx)


@pytest.mark.parametrize(
    "text, var, expected",
    [
        ("u", "x", "u_x"),
        ("u_x", "y", "u_xy"),
        ("x*u", "x", "u + x*u_x"),
        ("u^2", "t", "2*u*u_t"),
        ("t", "x", "0"),
    ],
)
def test_total_derivative_examples(text, var, expected):
    assert total_derivative(parse(text), var) == parse(expected)


def test_total_derivative_order_limit():
    with pytest.raises(JetOrderError):
        total_derivative(parse("u_xxx"), "x")


def test_solution_jet_matches_finite_differences():
    e = parse("tanh(x - 2*t + y/3)*exp(z/5)")
    base = {"x": 0.2, "y": -0.4, "z": 0.3, "t": 0.1}
    jet = solution_jet(e, base)
    h = 1e-4
    for v in ("x", "y", "z", "t"):
        up = evaluate(e, {**base, v: base[v] + h})
        dn = evaluate(e, {**base, v: base[v] - h})
        assert jet[f"u_{v}"] == pytest.approx((up - dn) / (2 * h), rel=1e-7)
    # second derivative from first-derivative differences
    up = solution_jet(e, {**base, "x": base["x"] + h})["u_xy"]
    dn = solution_jet(e, {**base, "x": base["x"] - h})["u_xy"]
    assert jet["u_xxy"] == pytest.approx((up - dn) / (2 * h), rel=1e-6)


def test_derivative_table_is_complete():
    table = derivative_table(parse("x*y*z*t"), 3)
    assert len(table) == 1 + 4 + 10 + 20
    assert table["u_xyz"] == parse("t")


def test_expand_and_constants():
    assert expand(parse("(x + 1)^2")) == parse("x^2 + 2*x + 1")
    assert mul(ONE, Param("a")) == Param("a")
    assert power(Const(4), Fraction(1, 2)) == Const(2)
