import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from zksym import _kernels
from zksym import reduced_ode as ode
from zksym.jet_expr import evaluate
from zksym.solutions import SPACE_L, ReducedEquation

FIGS = ["fig11", "fig12", "fig13", "fig14", "fig15"]
HARMONIC = ReducedEquation("harmonic", "H_ll + H", SPACE_L, "test")


def _harmonic(span=(0.0, 6.0)):
    return ode.problem_from_equation("harmonic", HARMONIC, {}, span, analytic="sin(l)")


@pytest.mark.parametrize("method", ["rk4", "rkf45"])
def test_harmonic_oscillator(method):
    p = _harmonic()
    t = ode.integrate(p, ode.IntegratorConfig(method=method, rtol=1e-10, atol=1e-10))
    assert t.ok
    assert ode.analytic_error(t, p) < 1e-7
    assert t.l[0] == 0.0 and t.l[-1] == pytest.approx(6.0, abs=1e-12)


@pytest.mark.parametrize("name", FIGS)
def test_against_scipy_oracle(name):
    p = ode.figure_problem(name)
    prog = p.program()
    P = p.param_vector(prog)

    def f(l, y):
        out = _kernels.eval_program(prog, np.array([[l, y[0], y[1]]]), P)[0]
        return [y[1], out[0]]

    ref = solve_ivp(f, (p.l0, p.l1), [p.H0, p.Hp0], rtol=1e-12, atol=1e-12, dense_output=True)
    t = ode.rk4_integrate(p)
    want = ref.sol(t.l)
    assert np.max(np.abs(t.H - want[0])) < 1e-6
    assert np.max(np.abs(t.Hp - want[1])) < 1e-6


def test_fig11_analytic():
    p = ode.figure_problem("fig11")
    assert (p.l0, p.l1) == (-5.0, 5.0)
    assert ode.analytic_error(ode.rk4_integrate(p), p) < 1e-6


def test_convergence_order_fig11():
    errs, orders = ode.convergence_order(ode.figure_problem("fig11"))
    assert all(3.7 <= o <= 4.3 for o in orders)
    assert errs[0] > errs[1] > errs[2]


@pytest.mark.parametrize("name", FIGS)
def test_rk4_vs_rkf45(name):
    p = ode.figure_problem(name)
    c = ode.compare(ode.rk4_integrate(p), ode.rkf45_integrate(p))
    assert c.passed, c.sup


@pytest.mark.parametrize("name", ["fig12", "fig13", "fig14", "fig15"])
def test_symmetric_span_breaks_down(name):
    p = ode.figure_problem(name).with_state(-5.0, 1.0, 0.0, 5.0)
    assert not ode.rk4_integrate(p).ok or not ode.rkf45_integrate(p).ok


def test_coarse_step_detected():
    p = ode.figure_problem("fig11")
    assert ode.analytic_error(ode.rk4_integrate(p, ode.IntegratorConfig(h=0.5)), p) > 1e-6


def test_rkf45_tolerance_monotone():
    p = ode.figure_problem("fig11")
    errs = [ode.analytic_error(ode.rkf45_integrate(p, ode.IntegratorConfig(method="rkf45", rtol=r, atol=r)), p)
            for r in (1e-4, 1e-6, 1e-8, 1e-10)]
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_rkf45_statistics():
    t = ode.rkf45_integrate(ode.figure_problem("fig11"))
    assert t.n_accept == len(t) - 1
    assert t.n_reject >= 0


@pytest.mark.parametrize("h", [0.3, 0.07])
def test_rk4_requires_dividing_step(h):
    with pytest.raises(ode.ODEError):
        ode.rk4_integrate(ode.figure_problem("fig11"), ode.IntegratorConfig(h=h))


@pytest.mark.parametrize(
    "kw", [dict(method="euler"), dict(h=-1.0), dict(rtol=0.0), dict(hmin=1.0, hmax=0.5)]
)
def test_config_validation(kw):
    with pytest.raises(ValueError):
        ode.IntegratorConfig(**kw)


def test_problem_validation():
    with pytest.raises(ode.ODEError):
        ode.problem_from_equation("x", HARMONIC, {}, (1.0, 0.0), ic=(0, 1))
    with pytest.raises(ode.ODEError):
        ode.problem_from_equation("x", HARMONIC, {}, (0.0, 1.0))
    with pytest.raises(ode.ODEError):
        ode.problem_from_equation("x", ReducedEquation("f", "H_l + H", SPACE_L, "t"), {}, (0, 1), ic=(1, 0))


def test_figure_problem_aliases():
    assert ode.figure_problem("x1_r3") == ode.figure_problem("fig11")
    with pytest.raises(KeyError):
        ode.figure_problem("fig99")


@given(st.floats(0, 6))
def test_dense_output_accuracy(lq):
    p = _harmonic()
    t = ode.rkf45_integrate(p, ode.IntegratorConfig(method="rkf45", rtol=1e-10, atol=1e-10))
    H, Hp = t.dense([lq])
    assert H[0] == pytest.approx(math.sin(lq), abs=1e-7)
    assert Hp[0] == pytest.approx(math.cos(lq), abs=1e-6)


def test_dense_outside_span():
    t = ode.rk4_integrate(_harmonic())
    with pytest.raises(ode.ODEError):
        t.dense([7.0])


@given(H0=st.floats(-1, 1), Hp0=st.floats(-1, 1))
def test_linear_superposition(H0, Hp0):
    # the harmonic flow is linear in the initial data
    base = _harmonic((0.0, 1.0))
    cfg = ode.IntegratorConfig(h=0.01)
    a = ode.rk4_integrate(base.with_state(0.0, H0, 0.0, 1.0), cfg)
    b = ode.rk4_integrate(base.with_state(0.0, 0.0, Hp0, 1.0), cfg)
    c = ode.rk4_integrate(base.with_state(0.0, H0, Hp0, 1.0), cfg)
    assert np.allclose(a.H + b.H, c.H, atol=1e-13)


def test_rows_layout():
    t = ode.rk4_integrate(_harmonic((0.0, 0.1)))
    r = t.rows()
    assert r[0] == (0.0, 0.0, 1.0, "rk4")
    assert len(r) == 11
