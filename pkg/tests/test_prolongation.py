import numpy as np
import pytest
import sympy as sp

from zksym import lie_algebra as la
from zksym import prolongation as pro
from hypothesis import given
from hypothesis import strategies as st

from zksym.jet_expr import ZK_SPACE, add, evaluate, jet_order, mul, parse, simplify

X, Y, Z, T = sp.symbols("x y z t")
BASE_SYMS = (X, Y, Z, T)
A = sp.Symbol("a")
# a concrete function with nonvanishing mixed derivatives of every order
F = sp.sin(X + 2 * Y - Z / 3) * sp.exp(T / 4) + X * Y * Z * T + Z**2 * X
POINT = {X: 0.3, Y: -0.2, Z: 0.5, T: 0.7, A: 1.3}
C_VALUES = {f"c{k}": v for k, v in enumerate((0.4, -0.7, 1.1, 0.2, -0.5, 0.9, -1.3), start=1)}


def _sym_field(V):
    return [sp.sympify(str(c).replace("^", "**"), locals={"u": sp.Symbol("u"), "a": A}).subs(sp.Symbol("u"), F)
            for c in (V.xi_x, V.xi_y, V.xi_z, V.xi_t, V.xi_u)]


def _oracle_zeta(V, multi):
    """zeta_J = D_J(phi - xi^i f_i) + xi^i f_{J,i} for the concrete f."""
    xi = _sym_field(V)
    W = xi[4] - sum(xi[i] * sp.diff(F, BASE_SYMS[i]) for i in range(4))
    args = [s for s, k in zip(BASE_SYMS, multi) for _ in range(k)]
    dJ = lambda g: sp.diff(g, *args) if args else g
    return dJ(W) + sum(xi[i] * sp.diff(dJ(F), BASE_SYMS[i]) for i in range(4))


def _jet_point():
    pt = {str(s): v for s, v in POINT.items() if s != A}
    for k in range(0, 3):
        for name in ([ZK_SPACE.dep] if k == 0 else ZK_SPACE.derivatives(k)):
            c = ZK_SPACE.classify(name)
            args = [s for s, m in zip(BASE_SYMS, c.multi) for _ in range(m)]
            pt[name] = float((sp.diff(F, *args) if args else F).subs(POINT))
    return pt


FIELDS = [pytest.param(la.generator(i), id=f"D{i}") for i in range(1, 8)] + [
    pytest.param(la.general_field(), id="general"),
    pytest.param(pro.CONTROL_FIELD, id="control"),
]


@pytest.mark.parametrize("V", FIELDS)
@pytest.mark.parametrize("name", ["u_x", "u_t", "u_xx", "u_yy", "u_zz", "u_xy", "u_zt"])
def test_prolongation_matches_sympy(V, name):
    jet = _jet_point()
    c = ZK_SPACE.classify(name)
    want = float(_oracle_zeta(V, c.multi).subs({**POINT, **{sp.Symbol(k): v for k, v in C_VALUES.items()}}))
    got = evaluate(pro.prolong2(V).coefficient(name), jet, {"a": POINT[A], **C_VALUES})
    assert got == pytest.approx(want, rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("V", FIELDS)
def test_coefficients_are_second_order(V):
    P = pro.prolong2(V)
    assert all(jet_order(P.coefficient(n)) <= 2 for n in pro.FIRST + pro.SECOND)


@pytest.mark.parametrize("i", range(1, 8))
def test_generators_leave_equation_invariant(i):
    assert pro.invariance_residual(la.generator(i)) < 1e-10


def test_general_field_invariant():
    assert pro.invariance_residual(la.general_field(), params=C_VALUES) < 1e-10


@pytest.mark.parametrize("V, lo", [(pro.CONTROL_FIELD, 1e-3), (la.VectorField.from_strings(("0", "0", "0", "0", "u^2")), 1e-3)])
def test_non_symmetries_rejected(V, lo):
    assert pro.invariance_residual(V) > lo


def test_zero_field():
    assert pro.invariance_residual(la.ZERO_FIELD) == 0.0


def test_sample_on_shell_satisfies_equation():
    S = pro.sample_on_shell(20, seed=3)
    for row in S:
        pt = dict(zip(pro.JET2, row))
        assert evaluate(parse("u_t + a*u*u_x + u_xx + u_yy + u_zz"), pt, {"a": 1.0}) == pytest.approx(0, abs=1e-12)


def test_sample_is_deterministic():
    assert np.array_equal(pro.sample_on_shell(5, 42), pro.sample_on_shell(5, 42))
    assert not np.array_equal(pro.sample_on_shell(5, 42), pro.sample_on_shell(5, 43))


@pytest.mark.parametrize("a", [0.5, 2.0, -1.5])
def test_invariance_for_other_nonlinearity(a):
    for i in range(1, 8):
        assert pro.invariance_residual(la.generator(i), 30, params={"a": a}) < 1e-9


@given(i=st.integers(1, 7), j=st.integers(1, 7), k=st.fractions(-3, 3, max_denominator=5))
def test_prolongation_is_linear(i, j, k):
    V = la.generator(i) + la.generator(j).scale(k)
    P, Pi, Pj = pro.prolong2(V), pro.prolong2(la.generator(i)), pro.prolong2(la.generator(j))
    for n in ("u_x", "u_t", "u_xx", "u_yz"):
        assert simplify(P.coefficient(n)) == simplify(add(Pi.coefficient(n), mul(k, Pj.coefficient(n))))
