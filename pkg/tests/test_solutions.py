import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from _sympy_oracle import to_sympy
from zksym import solutions as sol
from zksym.jet_expr import DomainError, evaluate, parse

X, Y, Z, T = sp.symbols("x y z t")


def _sympy_residual(rec, point):
    u = to_sympy(rec.expr).subs({sp.Symbol(k): v for k, v in rec.params})
    a = rec.param_dict["a"]
    r = sp.diff(u, T) + a * u * sp.diff(u, X) + sp.diff(u, X, 2) + sp.diff(u, Y, 2) + sp.diff(u, Z, 2)
    return float(r.subs({X: point["x"], Y: point["y"], Z: point["z"], T: point["t"]}))


CATALOG = [pytest.param(r, id=r.name) for r in sol.catalog()]
PROBE = {"x": 1.0, "y": 0.5, "z": 0.5, "t": 0.5}


@pytest.mark.parametrize("rec", CATALOG)
def test_point_residual_matches_sympy(rec):
    assert sol.point_residual(rec, PROBE) == pytest.approx(_sympy_residual(rec, PROBE), rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("rec", [r for r in CATALOG if r.values[0].asserted])
def test_asserted_solutions_pass(rec):
    rep = sol.pde_residual(rec)
    assert rep.passed, rep.summary()
    assert rep.n_points >= 11


@pytest.mark.parametrize(
    "name, lo",
    [("u2-printed", 1.0), ("u3-printed", 0.5), ("u3-candidate", 0.5), ("u4-printed", 1.0),
     ("u4-candidate", 1.0), ("u5", 1.0), ("u6", 1.0)],
)
def test_printed_solutions_have_nonzero_residual(name, lo):
    assert sol.pde_residual(sol.lookup(name)).max_abs > lo


def test_u2_printed_hand_value():
    # x/sqrt(t) at (1, 0, 0, 1): u_t = -1/2, u*u_x = 1, so the residual is 1/2
    assert sol.point_residual(sol.lookup("u2-printed"), {"x": 1, "y": 0, "z": 0, "t": 1}) == pytest.approx(0.5)


def test_u5_sympy_value():
    assert sol.point_residual(sol.lookup("u5"), PROBE) == pytest.approx(-0.549, abs=5e-4)


@pytest.mark.parametrize("c0", [-2.0, 0.0, 0.7, 3.5])
@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_constant_solutions_exact(c0, a):
    assert sol.pde_residual(sol.constant_solution(c0, a)).max_abs == 0.0


def test_u7_has_two_active_axes():
    rec = sol.lookup("u7")
    assert rec.active_vars() == ("x", "t")
    assert len(sol.grid_points(rec)) == 121


def test_u7_speed_scan():
    scan = sol.u7_speed_scan()
    assert scan.best_d == 0.0
    assert scan.best_residual < 1e-12
    assert 0.0 in scan.admissible()


def test_grid_respects_constraints():
    rec = sol.lookup("u5")
    pts = sol.grid_points(rec)
    assert len(pts) < 11**3
    assert np.all(pts[:, 0] ** 2 + pts[:, 1] ** 2 + pts[:, 2] ** 2 > 0)


def test_t_box_for_singular_time():
    pts = sol.grid_points(sol.lookup("u2-corrected"))
    assert pts[:, 3].min() == pytest.approx(0.1)


def test_empty_grid_raises():
    rec = sol._record("neg", "sqrt(-1 - x^2)", {}, [("-1 - x^2", "positive")], provenance="candidate")
    with pytest.raises(DomainError):
        sol.pde_residual(rec)


@pytest.mark.parametrize(
    "kwargs, err",
    [(dict(text="u_x", params={}), ValueError), (dict(text="k*x", params={}), ValueError)],
)
def test_record_validation(kwargs, err):
    with pytest.raises(err):
        sol._record("bad", kwargs["text"], kwargs["params"])


def test_with_params_rejects_unknown():
    with pytest.raises(KeyError):
        sol.lookup("u1").with_params(zz=1)


def test_lookup_unknown():
    with pytest.raises(KeyError):
        sol.lookup("u99")


@pytest.mark.parametrize("name", ["u1", "u2-corrected", "u7", "const", "quad-y"])
@given(i=st.integers(1, 7), eps=st.sampled_from([-1.0, -0.3, 0.3, 1.0]))
def test_closure_under_group(name, i, eps):
    img = sol.group_transform(sol.lookup(name), i, eps)
    assert sol.pde_residual(img).max_abs < 1e-8


def test_printed_v5_fails_on_galilean_witness():
    rec = sol.lookup("u2-corrected")
    assert sol.pde_residual(sol.group_transform(rec, 5, 1.0)).passed
    assert not sol.pde_residual(sol.group_transform(rec, 5, 1.0, printed=True)).passed


def test_printed_v3_is_linearized_rotation():
    rec = sol.lookup("quad-y")
    assert sol.pde_residual(sol.group_transform(rec, 3, 1.0)).passed
    assert not sol.pde_residual(sol.group_transform(rec, 3, 1.0, printed=True)).passed


@given(eps=st.floats(-3, 3, allow_nan=False))
def test_rotation_invariant_solution(eps):
    rec = sol._record("radial", "y^2 + z^2 - 4*t", {}, provenance="reference")
    img = sol.group_transform(rec, 3, eps)
    for p in ([0.3, -1.2, 0.7, 0.4], [1.0, 0.5, -0.5, 2.0]):
        pt = dict(zip(sol.BASE, p))
        assert evaluate(img.expr, pt, img.param_dict) == pytest.approx(evaluate(rec.expr, pt, rec.param_dict), abs=1e-12)


@given(e1=st.floats(-1, 1), e2=st.floats(-1, 1), i=st.sampled_from([2, 4, 6, 7]))
def test_translations_compose(e1, e2, i):
    u1 = sol.lookup("u1")
    a = sol.group_transform(sol.group_transform(u1, i, e1), i, e2)
    b = sol.group_transform(u1, i, e1 + e2)
    pt = {"x": 0.3, "y": 0.1, "z": -0.2, "t": 0.4}
    assert evaluate(a.expr, pt, a.param_dict) == pytest.approx(evaluate(b.expr, pt, b.param_dict), rel=1e-12)


def test_transform_name_and_identity():
    u1 = sol.lookup("u1")
    assert sol.group_transform(u1, 2, 0) is u1
    assert sol.group_transform(u1, 6, 0.5).name == "u1|V6(0.5)"
    with pytest.raises(ValueError):
        sol.group_transform(u1, 9, 0.5)


EXPECTED_REDUCED = {"x1_r3-kink": True, "x2_r1-linear": True, "x2_r2-linear": False, "x3_r3-linear": True,
                    "x4_r2-linear": True}


@pytest.mark.parametrize("check", sol.REDUCED_CHECKS, ids=[c.name for c in sol.REDUCED_CHECKS])
def test_reduced_checks(check):
    rep = sol.run_reduced_check(check)
    assert rep.passed == EXPECTED_REDUCED[check.name]
    if check.asserted:
        assert rep.passed


def test_reduced_rejects_foreign_variables():
    with pytest.raises(ValueError):
        sol.reduced_residual(sol.reduced_equation("x2_r1"), "x/a", {"a": 1.0})


def test_reduced_equation_lookup():
    assert len(sol.reduced_equations()) == 17
    with pytest.raises(KeyError):
        sol.reduced_equation("nope")


def test_jet_values_and_slices():
    names, vals = sol.jet_values(sol.lookup("u1"), np.array([[0.1, 0.2, 0.3, 0.4]]))
    assert names[:4] == sol.BASE and "u_xxx" in names
    s = sol.slice_values(sol.lookup("u2-corrected"), ("x", "t"), ((-1, 1), (-1, 1)), n=5)
    assert s.shape == (25, 3)
    assert np.isnan(s[s[:, 1] <= 0, 2]).all() and np.isfinite(s[s[:, 1] > 0, 2]).all()
