import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from zksym import conservation as cons
from zksym import lie_algebra as la
from zksym import solutions as sol
from zksym.jet_expr import ZERO, ZK_SPACE, evaluate, parse, solution_jet

X, Y, Z, T = sp.symbols("x y z t")
A = sp.Symbol("a")
BASE_SYMS = (X, Y, Z, T)
F = sp.sin(X + 2 * Y - Z / 3) * sp.exp(T / 4) + X * Y * Z * T + Z**2 * X
POINT = {X: 0.3, Y: -0.2, Z: 0.5, T: 0.7, A: 1.3}


def _jet():
    pt = {str(s): v for s, v in POINT.items() if s != A}
    for k in range(3):
        for name in ([ZK_SPACE.dep] if k == 0 else ZK_SPACE.derivatives(k)):
            c = ZK_SPACE.classify(name)
            args = [s for s, m in zip(BASE_SYMS, c.multi) for _ in range(m)]
            pt[name] = float((sp.diff(F, *args) if args else F).subs(POINT))
    return pt


def _oracle_adjoint(psi_text):
    """Euler-Lagrange operator of psi(x, y, z, t, u) * Delta in sympy, on the concrete function F."""
    u = sp.Function("u")(X, Y, Z, T)
    jet = {(): u}
    for s in BASE_SYMS:
        jet[(s,)] = sp.diff(u, s)
    for s in (X, Y, Z):
        jet[(s, s)] = sp.diff(u, s, 2)
    slots = {k: sp.Symbol("j" + "".join(map(str, k))) for k in jet}
    delta = slots[(T,)] + A * slots[()] * slots[(X,)] + slots[(X, X)] + slots[(Y, Y)] + slots[(Z, Z)]
    psi = sp.sympify(psi_text.replace("^", "**"), locals={"u": sp.Symbol("u")}).subs(sp.Symbol("u"), slots[()])
    L = psi * delta
    back = {slots[k]: jet[k] for k in jet}
    S = 0
    for k, sym in slots.items():
        term = sp.diff(L, sym).subs(back)
        S += (-1) ** len(k) * (sp.diff(term, *k) if k else term)
    return float(S.subs(u, F).doit().subs(POINT))


@pytest.mark.parametrize("psi", ["x", "t", "u", "y*z + 2*y - z/2 + 1", "x*u + t^2"])
def test_adjoint_matches_sympy(psi):
    got = evaluate(cons.adjoint_equation(parse(psi)), _jet(), {"a": POINT[A]})
    assert got == pytest.approx(_oracle_adjoint(psi), rel=1e-10, abs=1e-10)


def test_family_is_self_adjoint():
    r = cons.self_adjointness_check(cons.PSI_FAMILY)
    assert r.symbolic_zero and r.numeric_max < 1e-10
    assert cons.adjoint_equation(cons.PSI_FAMILY) == ZERO


@pytest.mark.parametrize("psi, residual", [("x", "-a*u"), ("t", "-1")])
def test_non_self_adjoint_multipliers(psi, residual):
    r = cons.self_adjointness_check(psi)
    assert not r.passed
    assert r.residual == parse(residual)


def test_psi_u_rejected():
    assert not cons.self_adjointness_check("u").passed


def test_printed_adjoint_expression():
    assert cons.printed_adjoint_equation(cons.PSI_FAMILY) == parse("-c1*y - c3")


@pytest.mark.parametrize("i", [2, 4, 6, 7])
def test_translation_divergence_on_u1(i):
    cv = cons.build_conserved_vector(la.generator(i), cons.PSI_FAMILY)
    assert cons.divergence_residual(cv, sol.lookup("u1")).max_abs < 1e-8


@pytest.mark.parametrize("i", [1, 3, 5])
def test_other_divergences_on_u1(i):
    cv = cons.build_conserved_vector(la.generator(i), cons.PSI_FAMILY)
    assert cons.divergence_residual(cv, sol.lookup("u1")).max_abs < 1e-8


def test_divergence_control():
    cv = cons.build_conserved_vector(la.generator(6), "x")
    assert cons.divergence_residual(cv, sol.lookup("u1")).max_abs > 1e-3


@pytest.mark.parametrize("i", [1, 3, 5, 6])
def test_divergence_matches_finite_differences(i):
    # off-shell function: the symbolic divergence must still equal the numerical one
    rec = sol._record("probe", "sin(x + 2*y - z/3)*exp(t/4) + x*y*z*t", {}, provenance="candidate")
    cv = cons.build_conserved_vector(la.generator(i), cons.PSI_FAMILY)
    env = {**cons.PSI_DEFAULTS, "a": 1.0}
    base = {"x": 0.3, "y": -0.2, "z": 0.5, "t": 0.7}

    def eta(k, pt):
        return evaluate(cv.eta[k], solution_jet(rec.expr, pt, order=2), env)

    h = 1e-4
    fd = 0.0
    for k, v in enumerate(("x", "y", "z", "t")):
        fd += (eta(k, {**base, v: base[v] + h}) - eta(k, {**base, v: base[v] - h})) / (2 * h)
    got = evaluate(cv.divergence(), solution_jet(rec.expr, base, order=3), env)
    assert got == pytest.approx(fd, rel=1e-6, abs=1e-6)


@settings(max_examples=15)
@given(i=st.integers(1, 7), k=st.fractions(-2, 2, max_denominator=3))
def test_conserved_vector_linear_in_psi(i, k):
    p1, p2 = parse("y*z + 1"), parse("y - z")
    V = la.generator(i)
    a = cons.build_conserved_vector(V, p1)
    b = cons.build_conserved_vector(V, p2)
    c = cons.build_conserved_vector(V, parse(f"y*z + 1 + ({k})*(y - z)"))
    X = cons.sample_jets(5, 7)
    for row in X:
        pt = dict(zip(cons.JET2, row))
        for ea, eb, ec in zip(a.eta, b.eta, c.eta):
            va, vb, vc = (evaluate(e, pt, {"a": 1.0}) for e in (ea, eb, ec))
            assert vc == pytest.approx(va + float(k) * vb, rel=1e-10, abs=1e-10)


def test_unknown_convention():
    with pytest.raises(ValueError):
        cons.build_conserved_vector(la.generator(1), cons.PSI_FAMILY, "mirror")


def test_table6_crosscheck():
    rows = {r.generator: r for r in cons.table6_crosscheck()}
    for i in (2, 3, 4, 5):
        assert rows[i].convention == "standard" and rows[i].max_deviation < 1e-10
    for i in (6, 7):
        assert rows[i].convention == "flipped" and rows[i].max_deviation < 1e-10
    assert rows[1].max_deviation > 1.0


def test_sample_jets_deterministic():
    assert np.array_equal(cons.sample_jets(4, 1), cons.sample_jets(4, 1))
