"""Analysis runs behind the CLI subcommands.

Each ``run_*`` function writes its CSV artifacts under ``out`` and returns the
list of :class:`~zksym.report.Check` records it produced.  Nothing here reads
the clock or global state, so equal arguments give byte-identical files.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import conservation as cons
from . import lie_algebra as la
from . import modulation as mi
from . import prolongation as pro
from . import reduced_ode as ode
from . import solutions as sol
from .jet_expr import Const, Param, add, evaluate, mul, parse, simplify, to_string
from .report import Check, asserted, audited, noted, write_csv

TOL = {
    "killing": 1e-12,
    "adjoint": 1e-12,
    "symmetry": 1e-10,
    "control": 1e-3,
    "solution": 1e-10,
    "closure": 1e-8,
    "speed": 1e-8,
    "reduced": 1e-12,
    "ode": 1e-6,
    "mi": 1e-12,
    "self_adjoint": 1e-10,
    "divergence": 1e-8,
    "table6": 1e-10,
}


@dataclass
class Settings:
    out: Path
    seed: int = 42
    tol: float | None = None
    params: dict = field(default_factory=dict)
    grid: sol.GridSpec = sol.DEFAULT_GRID
    figures: bool = False

    def tolerance(self, key: str) -> float:
        return self.tol if self.tol is not None else TOL[key]


def _combo(coeffs) -> str:
    """Linear combination of ``D1..D7`` as a canonical string."""
    terms = []
    for k, c in enumerate(coeffs, start=1):
        c = Const(c) if isinstance(c, (int, Fraction)) else c
        terms.append(mul(c, Param(f"D{k}")))
    return to_string(simplify(add(*terms)))


# -- algebra ------------------------------------------------------------------------


def run_algebra(s: Settings) -> list[Check]:
    checks: list[Check] = []
    out = s.out
    C = la.structure_constants()
    rows = []
    for i in range(1, 8):
        for j in range(1, 8):
            got = _combo(C[i - 1][j - 1])
            want = _combo(la.basis_vector(la.TABLE2[i][j - 1]))
            rows.append((i, j, got, la.TABLE2[i][j - 1], int(got == want)))
    write_csv(out / "commutator.csv", ("i", "j", "computed", "printed", "match"), rows)
    write_csv(out / "structure_constants.csv", ("i", "j", "k", "c"),
              [(i + 1, j + 1, k + 1, str(C[i][j][k])) for i in range(7) for j in range(7) for k in range(7) if C[i][j][k]])
    cmp2 = la.compare_commutator_table()
    checks.append(asserted("commutator table", cmp2.ok, len(cmp2.mismatches), 0,
                           "Table 2 (commutator table)", group="algebra",
                           detail=f"{cmp2.total - len(cmp2.mismatches)}/{cmp2.total} brackets match"))
    jac = la.jacobi_defects()
    checks.append(asserted("Jacobi identity", not jac, len(jac), 0, "structure constants", group="algebra",
                           detail="35 basis triples, exact rational arithmetic"))
    anti = la.antisymmetry_defects()
    checks.append(asserted("antisymmetry", not anti, len(anti), 0, "structure constants", group="algebra"))

    rng = np.random.default_rng([s.seed, 1])
    L = rng.uniform(-2, 2, (1000, 7))
    kd = max(abs(la.killing_form(l) - la.killing_closed_form(l)) for l in L)
    checks.append(asserted("Killing form", kd < TOL["killing"], kd, TOL["killing"],
                           "Killing form theorem, 2(l1^2 - l3^2)", group="algebra", detail="1000 random elements"))

    rng = np.random.default_rng([s.seed, 2])
    dev = dev_l1 = dev_l3 = 0.0
    dev_printed = 0.0
    dev_global = 0.0
    for _ in range(100):
        l = rng.uniform(-2, 2, 7)
        eps = rng.uniform(-1, 1, 7)
        A = la.global_adjoint(eps)
        lt = la.adjoint_transform(l, eps)
        dev = max(dev, float(np.max(np.abs(l @ A - lt))))
        dev_printed = max(dev_printed, float(np.max(np.abs(l @ A - la.printed_adjoint_transform(l, eps)))))
        dev_global = max(dev_global, float(np.max(np.abs(A - la.printed_global_adjoint(eps)))))
        dev_l1 = max(dev_l1, abs(lt[0] - l[0]))
        dev_l3 = max(dev_l3, abs(lt[2] - l[2]))
    checks.append(asserted("adjoint transform = l * A", dev < TOL["adjoint"], dev, TOL["adjoint"],
                           "general adjoint matrix and transformed coefficients", group="algebra",
                           detail="100 random (element, eps) draws; l7* uses -l4 sin(eps3)"))
    checks.append(audited("printed transformed coefficients", dev_printed < TOL["adjoint"], dev_printed, TOL["adjoint"],
                          "printed closed form of the transformed coefficients (l7* term in l4 sin(eps3))",
                          group="algebra", detail="the printed +l4 sin(eps3) in l7* disagrees with l * A; -l4 sin(eps3) is used"))
    checks.append(asserted("printed global matrix", dev_global < TOL["adjoint"], dev_global, TOL["adjoint"],
                           "printed global adjoint matrix", group="algebra", detail="all 49 cells against R7...R1"))
    checks.append(asserted("l1, l3 invariant", max(dev_l1, dev_l3) < TOL["adjoint"], max(dev_l1, dev_l3),
                           TOL["adjoint"], "invariance lemma for l1 and l3", group="algebra"))

    t3 = la.compare_adjoint_table()
    tc = la.compare_coefficient_table()
    checks.append(asserted("adjoint representation table", t3.ok, len(t3.mismatches), 0,
                           "Table 3 (adjoint representation)", group="algebra"))
    checks.append(asserted("invariant construction table", tc.ok, len(tc.mismatches), 0,
                           "table of transformed coefficients per generator", group="algebra"))
    rng = np.random.default_rng([s.seed, 3])
    dexp = dinv = dser = 0.0
    for i in range(1, 8):
        for e in rng.uniform(-2, 2, 5):
            R = la.adjoint_matrix(i, e)
            dexp = max(dexp, float(np.max(np.abs(R - la.derived_adjoint_matrix(i, e)))))
            dinv = max(dinv, float(np.max(np.abs(R @ la.adjoint_matrix(i, -e) - np.eye(7)))))
        e = 1e-6
        for j in range(1, 8):
            l = np.eye(7)[j - 1]
            first = (l @ la.adjoint_matrix(i, e) - l) / e
            bracket = np.array([float(v) for v in C[i - 1][j - 1]])
            dser = max(dser, float(np.max(np.abs(first + bracket))) * e)
    checks.append(asserted("R_i = expm(-eps M_i)", dexp < 1e-12, dexp, 1e-12,
                           "printed matrices R1..R7", group="algebra"))
    checks.append(asserted("R_i(eps) R_i(-eps) = I", dinv < 1e-12, dinv, 1e-12, "printed matrices R1..R7", group="algebra"))
    checks.append(asserted("first-order series", dser < 1e-5, dser, 1e-5, "Table 2 against R_i", group="algebra"))

    # Table 4 with every free coefficient at +1 and at -1
    inv_rows = []
    bad = 0
    for row in la.TABLE4:
        for sign in (1.0, -1.0):
            d = {f"d{k}": sign for k in (2, 4, 5, 6, 7)}
            l, want = la.table4_row(row, d)
            got = la.invariant_signature(l).as_tuple()
            ok = all(abs(g - w) == 0 for g, w in zip(got, want))
            bad += not ok
            inv_rows.append((row[0], sign, row[1], *got, int(ok)))
    write_csv(out / "invariants.csv", ("row", "d", "element", *la.SIGNATURE_FIELDS, "match"), inv_rows)
    checks.append(asserted("invariant signatures", bad == 0, bad, 0, "Table 4 (invariant values)", group="algebra",
                           detail="10 rows, free coefficients at +1 and -1"))

    rng = np.random.default_rng([s.seed, 4])
    l = rng.uniform(-2, 2, 7)
    P = la.printed_ad_matrix(l)
    ad = la.ad_matrix(l)
    checks.append(audited("printed ad matrix", bool(np.allclose(P, ad, atol=1e-12)), float(np.max(np.abs(P - ad))), 1e-12,
                          "ad matrix printed with the Killing form theorem", group="algebra",
                          detail=f"printed matrix equals -ad(A) (max |P + ad| = {np.max(np.abs(P + ad)):.1e}), "
                                 "i.e. the map X -> [X, A]; the trace of its square is unchanged",
                          evidence={"max_abs_sum": float(np.max(np.abs(P + ad)))}))

    adj_rows = []
    for i in range(1, 8):
        R = la.adjoint_matrix_expr(i)
        for j in range(1, 8):
            got = _combo(R[j - 1])
            want = _combo(la._linear_coeffs(la.TABLE3[i][j - 1], "D"))
            adj_rows.append((i, j, got, la.TABLE3[i][j - 1], int(got == want)))
    write_csv(out / "adjoint_table.csv", ("i", "j", "computed", "printed", "match"), adj_rows)
    return checks


# -- symmetries ---------------------------------------------------------------------


def run_symmetries(s: Settings, n_points: int = 100) -> list[Check]:
    tol = s.tolerance("symmetry")
    rows = []
    checks = []
    for i in range(1, 8):
        r = pro.invariance_residual(la.generator(i), n_points, s.seed)
        rows.append((f"D{i}", r, tol, int(r < tol)))
        checks.append(asserted(f"invariance D{i}", r < tol, r, tol, "Table 1 generators", group="symmetry"))
    rng = np.random.default_rng([s.seed, 5])
    c = {f"c{k}": float(v) for k, v in enumerate(rng.uniform(-1, 1, 7), start=1)}
    r = pro.invariance_residual(la.general_field(), n_points, s.seed, c)
    rows.append(("general", r, tol, int(r < tol)))
    checks.append(asserted("invariance general field", r < tol, r, tol, "general infinitesimal with c1..c7",
                           group="symmetry", evidence=c))
    r = pro.invariance_residual(pro.CONTROL_FIELD, n_points, s.seed)
    ctol = TOL["control"]
    rows.append(("control u*d_x", r, ctol, int(r > ctol)))
    checks.append(asserted("control field rejected", r > ctol, r, ctol, "non-symmetry u*d_x", group="symmetry"))
    write_csv(s.out / "symmetries.csv", ("field", "residual", "tol", "pass"), rows)
    return checks


# -- solutions ----------------------------------------------------------------------


CLOSURE_EPS = (0.3, -0.3, 1.0, -1.0)


def _apply_params(rec: sol.SolutionRecord, params: dict) -> sol.SolutionRecord:
    own = {k: v for k, v in params.items() if k in rec.param_dict}
    return rec.with_params(**own) if own else rec


def run_solutions(
    s: Settings,
    names: Sequence[str] | None = None,
    closure: bool = True,
    dump: bool = True,
) -> list[Check]:
    tol = s.tolerance("solution")
    recs = [_apply_params(r, s.params) for r in sol.catalog()] if not names else [
        _apply_params(sol.lookup(n), s.params) for n in names]
    checks = []
    rows = []
    for r in recs:
        rep = sol.pde_residual(r, s.grid, tol)
        am = rep.argmax
        rows.append((r.name, r.provenance, int(r.asserted), rep.n_points, rep.max_abs,
                     am["x"], am["y"], am["z"], am["t"], "PASS" if rep.passed else "FAIL"))
        make = asserted if r.asserted else audited
        checks.append(make(f"solution {r.name}", rep.passed, rep.max_abs, tol, r.citation, group="solutions",
                           detail=f"max |Delta| over {rep.n_points} points at {_pt(am)}",
                           evidence={"argmax": am, "provenance": r.provenance, "expr": r.text()}))
        if dump:
            write_csv(s.out / "residuals" / f"{r.name}.csv", ("x", "y", "z", "t", "residual"),
                      (tuple(p) + (v,) for p, v in zip(rep.points.tolist(), rep.values.tolist())))
        if r.name == "u2-printed":
            v = sol.point_residual(r, {"x": 1, "y": 0, "z": 0, "t": 1})
            checks.append(audited("solution u2-printed at (1,0,0,1)", abs(v) < tol, v, tol, r.citation,
                                  group="solutions", detail="hand value 1 - 1/2 = 0.5 with a = 1"))
    write_csv(s.out / "solutions.csv",
              ("name", "provenance", "asserted", "n_points", "max_residual", "x", "y", "z", "t", "verdict"), rows)

    if names is None or "u7" in names:
        scan = sol.u7_speed_scan(grid=s.grid)
        write_csv(s.out / "u7_speed_scan.csv", ("d", "max_residual"), zip(scan.d_values.tolist(), scan.residuals.tolist()))
        adm = scan.admissible(TOL["speed"])
        checks.append(asserted("u7 speed scan", adm.size > 0, scan.best_residual, TOL["speed"],
                               "printed traveling-wave closed form u7 (speed d not fixed)", group="solutions",
                               detail=f"minimum at d = {scan.best_d:g}; admissible d = {adm.tolist()} "
                                      "for (a,b,c) = (1,0,0), C1 = 1/2, C2 = 0",
                               evidence={"best_d": scan.best_d, "admissible": adm.tolist()}))
    if closure:
        checks += _closure(s, [r for r in recs if r.asserted])
    if s.figures:
        emit_solution_figures(s.out / "figures")
    return checks


def _pt(p: dict) -> str:
    return "(" + ", ".join(f"{k}={v:.4g}" for k, v in p.items()) + ")"


def _closure(s: Settings, recs) -> list[Check]:
    tol = TOL["closure"]
    rows = []
    checks = []
    for r in recs:
        for i in range(1, 8):
            worst = 0.0
            for e in CLOSURE_EPS:
                rep = sol.pde_residual(sol.group_transform(r, i, e), s.grid, tol)
                rows.append((r.name, f"D{i}", e, "exact", rep.n_points, rep.max_abs))
                worst = max(worst, rep.max_abs)
            checks.append(asserted(f"closure {r.name} under V{i}", worst < tol, worst, tol,
                                   "group-transform theorem (one-parameter family of solutions)", group="closure"))
    # the printed forms of V3 and V5
    for rec_name, i in (("quad-y", 3), ("u2-corrected", 5)):
        if not any(r.name == rec_name for r in recs):
            continue
        r = next(r for r in recs if r.name == rec_name)
        worst = 0.0
        for e in CLOSURE_EPS:
            rep = sol.pde_residual(sol.group_transform(r, i, e, printed=True), s.grid, tol)
            rows.append((r.name, f"D{i}", e, "printed", rep.n_points, rep.max_abs))
            worst = max(worst, rep.max_abs)
        what = {3: "printed V3 is the linearized rotation U(x, y - eps z, z + eps y, t)",
                5: "printed V5 shifts by -eps/a; the flow of D5 shifts by +eps/a"}[i]
        checks.append(audited(f"printed V{i} on {r.name}", worst < tol, worst, tol,
                              f"group-transform theorem, printed transform V{i}", group="closure", detail=what))
    # composition of translations
    rng = np.random.default_rng([s.seed, 6])
    u1 = sol.lookup("u1")
    dev = 0.0
    for i in (2, 4, 6, 7):
        e1, e2 = rng.uniform(-1, 1, 2)
        a = sol.group_transform(sol.group_transform(u1, i, e1), i, e2)
        b = sol.group_transform(u1, i, e1 + e2)
        for p in rng.uniform(-1, 1, (20, 4)):
            pt = dict(zip(sol.BASE, p))
            dev = max(dev, abs(evaluate(a.expr, pt, a.param_dict) - evaluate(b.expr, pt, b.param_dict)))
    checks.append(asserted("translation composition", dev < 1e-12, dev, 1e-12, "group-transform theorem, translations",
                           group="closure"))
    write_csv(s.out / "closure.csv", ("solution", "generator", "eps", "form", "n_points", "max_residual"), rows)
    return checks


FIGURE_SLICES = {
    "fig1": ("u1", ("x", "t"), ((-2.0, 2.0), (0.0, 2.0))),
    "fig2": ("u2-printed", ("x", "t"), ((-2.0, 2.0), (0.1, 2.1))),
    "fig3": ("u3-printed", ("y", "t"), ((-2.0, 2.0), (0.0, 2.0))),
    "fig4": ("u4-printed", ("x", "t"), ((-2.0, 2.0), (0.1, 2.1))),
    "fig5": ("u5", ("x", "y"), ((-2.0, 2.0), (-2.0, 2.0))),
    "fig6": ("u6", ("x", "y"), ((-2.0, 2.0), (-2.0, 2.0))),
    "fig7": ("u7", ("x", "t"), ((-5.0, 5.0), (0.0, 5.0))),
}


def emit_solution_figures(out: Path, n: int = 51) -> list[Path]:
    paths = []
    for fig, (name, axes, ranges) in FIGURE_SLICES.items():
        data = sol.slice_values(sol.lookup(name), axes, ranges, n)
        paths.append(write_csv(out / f"{fig}_{name}.csv", (*axes, "u"), data.tolist()))
    return paths


# -- reduced equations --------------------------------------------------------------


def run_reduce(s: Settings) -> list[Check]:
    tol = TOL["reduced"]
    checks = []
    rows = []
    for c in sol.REDUCED_CHECKS:
        rep = sol.run_reduced_check(c, s.grid)
        rows.append((c.name, c.equation, c.candidate, rep.n_points, rep.max_abs, "PASS" if rep.passed else "FAIL"))
        make = asserted if c.asserted else audited
        checks.append(make(f"reduced {c.name}", rep.passed, rep.max_abs, tol, c.citation, group="reduce",
                           detail=f"{sol.reduced_equation(c.equation).citation}; max at {_pt(rep.argmax)}"))
    # the last row solves its reduced PDE, yet the lift does not solve the equation
    lift = sol.pde_residual(sol.lookup("u4-candidate"), s.grid)
    checks.append(audited("lift of G = (r - 8)/a", lift.passed, lift.max_abs, TOL["solution"],
                          "D1 + k D3 reduction chain, row 2 against the full equation", group="reduce",
                          detail="G solves the printed row-2 PDE but u = G/sqrt(t) does not solve the equation; "
                                 "the row-2 reduced PDE is inconsistent with the reduction"))
    lift3 = sol.pde_residual(sol.lookup("u3-candidate"), s.grid)
    checks.append(audited("lift of H = d5*l/(2*d4*a)", lift3.passed, lift3.max_abs, TOL["solution"],
                          "third reduction chain against the full equation", group="reduce",
                          detail="H solves the printed row-3 ODE but its lift does not solve the equation"))
    # printed traveling-wave ODE against the kink K = tanh(e/2)
    K = parse("tanh(e/2)", sol.TRAVELING_WAVE_PRINTED.space)
    env = {"a": 1.0, "b": 0.0, "c": 0.0, "d": 0.0}
    printed = sol.substituted_residual(K, sol.TRAVELING_WAVE_PRINTED.expr, sol.TRAVELING_WAVE_PRINTED.space)
    standard = sol.substituted_residual(K, parse("-d*K_e + a^2*K*K_e + (a^2 + b^2 + c^2)*K_ee",
                                                 sol.TRAVELING_WAVE_PRINTED.space), sol.TRAVELING_WAVE_PRINTED.space)
    es = np.linspace(-4, 4, 81)
    vp = max(abs(evaluate(printed, {"e": e}, env)) for e in es)
    vs = max(abs(evaluate(standard, {"e": e}, env)) for e in es)
    checks.append(audited("printed traveling-wave ODE", vp < tol, vp, tol, "printed traveling-wave ODE", group="reduce",
                          detail=f"the u7 profile K = tanh(e/2) solves -dK' + a^2 K K' + (a^2+b^2+c^2) K'' "
                                 f"(residual {vs:.1e}) but not the printed ODE with K multiplying K''"))
    write_csv(s.out / "reduced.csv", ("name", "equation", "candidate", "n_points", "max_residual", "verdict"), rows)
    return checks


# -- integrators --------------------------------------------------------------------


def run_integrate(
    s: Settings,
    ode_name: str | None = None,
    method: str = "both",
    h: float = 0.01,
    rtol: float = 1e-8,
    atol: float = 1e-8,
    span: tuple[float, float] | None = None,
) -> list[Check]:
    if ode_name is not None:
        return _integrate_one(s, ode_name, method, h, rtol, atol, span)
    tol = TOL["ode"]
    checks = []
    probs = ode.figure_problems()
    rk_cfg = ode.IntegratorConfig(h=h)
    kf_cfg = ode.IntegratorConfig(method="rkf45", rtol=rtol, atol=atol)
    summary = []
    for name, p in probs.items():
        a = ode.rk4_integrate(p, rk_cfg)
        b = ode.rkf45_integrate(p, kf_cfg)
        cmp_ = ode.compare(a, b, tol)
        ok = a.ok and b.ok and cmp_.passed
        checks.append(asserted(f"rk4 vs rkf45 {name}", ok, cmp_.sup, tol,
                               f"Figure {name[3:]} parameter list", group="integrate",
                               detail=f"{p.equation.citation}; span [{p.l0:g}, {p.l1:g}], initial data {p.ic_source}; "
                                      f"rkf45 steps {b.n_accept} accepted / {b.n_reject} rejected"))
        summary.append((name, p.equation.name, p.l0, p.l1, p.H0, p.Hp0, p.ic_source, a.status_name, b.status_name,
                        b.n_accept, b.n_reject, cmp_.max_H, cmp_.max_Hp))
        if s.figures:
            emit_ode_figure(s.out / "figures" / f"{name}.csv", p, a, b)
        if p.analytic is not None:
            err = ode.analytic_error(a, p)
            checks.append(asserted(f"rk4 vs analytic {name}", err < tol, err, tol,
                                   f"Figure {name[3:]} analytic solution", group="integrate"))
        if p.ic_source == "convention":
            wide = p.with_state(-5.0, p.H0, p.Hp0, 5.0)
            wa = ode.rk4_integrate(wide, rk_cfg)
            wb = ode.rkf45_integrate(wide, kf_cfg)
            checks.append(audited(f"default span [-5, 5] for {name}", not (wa.ok and wb.ok), None, None,
                                  f"Figure {name[3:]} (span choice)", group="integrate",
                                  detail=f"from H(-5) = {p.H0:g}, H'(-5) = {p.Hp0:g}: rk4 {wa.status_name} at "
                                         f"l = {wa.l[-1]:.4g}, rkf45 {wb.status_name} at l = {wb.l[-1]:.4g}; "
                                         f"span [{p.l0:g}, {p.l1:g}] used instead"))
    write_csv(s.out / "integrators.csv",
              ("ode", "equation", "l0", "l1", "H0", "Hp0", "initial_data", "rk4_status", "rkf45_status",
               "rkf45_accepted", "rkf45_rejected", "max_dH", "max_dHp"), summary)
    p = probs["fig11"]
    errs, orders = ode.convergence_order(p)
    ok = all(3.7 <= o <= 4.3 for o in orders)
    checks.append(asserted("rk4 convergence order", ok, min(orders), 3.7, "fourth-order Runge-Kutta on Figure 11",
                           group="integrate", detail=f"h = 0.04, 0.02, 0.01 errors {errs}, orders {orders}"))
    ratio = errs[1] / errs[2]
    checks.append(asserted("rk4 halving ratio", 12 <= ratio <= 20, ratio, None, "fourth-order Runge-Kutta on Figure 11",
                           group="integrate"))
    coarse = ode.analytic_error(ode.rk4_integrate(p, ode.IntegratorConfig(h=0.5)), p)
    checks.append(asserted("coarse rk4 flagged", coarse > tol, coarse, tol, "Figure 11 with h = 0.5", group="integrate"))
    prev = None
    worst = 0.0
    for rt in (1e-5, 5e-6, 2.5e-6, 1.25e-6, 1e-6, 5e-7, 1e-8, 5e-9):
        e = ode.analytic_error(ode.rkf45_integrate(p, ode.IntegratorConfig(method="rkf45", rtol=rt, atol=rt)), p)
        if prev is not None:
            worst = max(worst, e / prev)
        prev = e
    checks.append(asserted("rkf45 honors tolerance", worst <= 1.5, worst, 1.5, "Figure 11 with decreasing rtol",
                           group="integrate"))
    checks.append(noted("Figure 12 parameters", "Figure 12 parameter list", group="integrate",
                        detail="the listed values omit d5; d5 = 1 is assumed"))
    return checks


def _integrate_one(s, name, method, h, rtol, atol, span) -> list[Check]:
    p = ode.figure_problem(name)
    if span is not None:
        if p.analytic is not None:
            p = ode.problem_from_equation(p.name, p.equation, p.param_dict, span, analytic=p.analytic)
        else:
            p = p.with_state(span[0], p.H0, p.Hp0, span[1])
    methods = ("rk4", "rkf45") if method == "both" else (method,)
    trajs = {}
    checks = []
    for m in methods:
        cfg = ode.IntegratorConfig(method=m, h=h, rtol=rtol, atol=atol)
        t = ode.integrate(p, cfg)
        trajs[m] = t
        write_csv(s.out / f"traj_{p.name}_{m}.csv", ("lambda", "H", "Hprime", "method"), t.rows())
        checks.append(asserted(f"{m} {p.name} finished", t.ok, len(t), None, f"Figure {p.name[3:]} integration",
                               group="integrate", detail=f"status {t.status_name} at l = {t.l[-1]:.6g}"))
    if len(trajs) == 2:
        c = ode.compare(trajs["rk4"], trajs["rkf45"], TOL["ode"])
        checks.append(asserted(f"rk4 vs rkf45 {p.name}", c.passed, c.sup, TOL["ode"], f"Figure {p.name[3:]}",
                               group="integrate"))
    return checks


def emit_ode_figure(path: Path, p, a, b) -> Path:
    """Rows ``(lambda, H, Hprime, method)`` for rk4, rkf45 (resampled) and the analytic solution if any."""
    rows = a.rows()
    H2, Hp2 = b.dense(a.l)
    rows += [(float(l), float(x), float(y), "rkf45") for l, x, y in zip(a.l, H2, Hp2)]
    if p.analytic is not None:
        H, Hp = p.exact(a.l)
        rows += [(float(l), float(x), float(y), "analytic") for l, x, y in zip(a.l, H, Hp)]
    return write_csv(path, ("lambda", "H", "Hprime", "method"), rows)


# -- modulation instability -----------------------------------------------------------


def run_mi(s: Settings, p_values=(1.0, 2.0, 3.0), A_range=(0.0, 4.0), n: int = 401) -> list[Check]:
    tol = TOL["mi"]
    rows = mi.sweep(p_values, A_range, n)
    write_csv(s.out / "spectrum.csv", mi.SPECTRUM_COLUMNS, (r.as_tuple() for r in rows))
    dg = max(abs(r.gain - mi.gain_closed_form(r.A, r.p)) for r in rows)
    dw = max(mi.complex_residual(r.w, r.A, r.p) for r in rows)
    flags = all(r.stable == (r.A >= r.p) for r in rows)
    pos = all((r.gain > 0) == (r.A < r.p) for r in rows)
    checks = [
        asserted("gain closed form", dg < tol, dg, tol, "gain 2 Im(w) = 2 sqrt(p^2 - A^2)", group="mi"),
        asserted("dispersion relation", dw < tol, dw, tol, "w = sqrt(A^2 - p^2)", group="mi"),
        asserted("stability flags", flags and pos, None, None, "stable exactly when A >= p", group="mi"),
    ]
    checks.append(noted("linearization caveat", "modulation-instability linearization", group="mi",
                        detail="the linearized equation keeps a time-dependent coefficient a*sqrt(A)*exp(iAt) on u_x "
                               "that the plane-wave ansatz ignores; the printed relation is implemented as given"))
    if s.figures:
        emit_mi_figures(s.out / "figures", p_values, n)
    return checks


def emit_mi_figures(out: Path, p_values=mi.FIGURE_P, n: int = 401) -> list[Path]:
    paths = []
    for fig in ("fig8a", "fig8b", "fig9"):
        rows = mi.figure_rows(fig, p_values, n)
        paths.append(write_csv(out / f"{fig}.csv", mi.SPECTRUM_COLUMNS, (r.as_tuple() for r in rows)))
    return paths


# -- conservation -------------------------------------------------------------------


def run_conserve(
    s: Settings,
    generators: Sequence[int] | None = None,
    psi: str | None = None,
    solution: str = "u1",
    table6: bool = True,
) -> list[Check]:
    checks = []
    rec = _apply_params(sol.lookup(solution), s.params)
    psi_expr = cons.PSI_FAMILY if psi is None else parse(psi)
    psi_params = {**cons.PSI_DEFAULTS, **{k: v for k, v in s.params.items() if k in cons.PSI_DEFAULTS}}
    if generators is None:
        sa = cons.self_adjointness_check(cons.PSI_FAMILY, 100, s.seed, psi_params)
        checks.append(asserted("self-adjointness psi family", sa.symbolic_zero and sa.numeric_max < TOL["self_adjoint"],
                               sa.numeric_max, TOL["self_adjoint"], "multiplier family c1*y*z + c2*y + c3*z + c4",
                               group="conserve", detail="operator-derived S normalizes to 0"))
        for p_text, want in (("x", "-a*u"), ("t", None), ("u", None)):
            r = cons.self_adjointness_check(p_text, 100, s.seed)
            ok = not r.passed and (want is None or r.residual == parse(want))
            checks.append(asserted(f"self-adjointness rejects psi = {p_text}", ok, r.numeric_max, TOL["self_adjoint"],
                                   "adjoint equation", group="conserve", detail=f"residual {to_string(r.residual)}"))
        printed = cons.printed_adjoint_equation(cons.PSI_FAMILY)
        X = cons.sample_jets(100, s.seed)
        vals = [abs(evaluate(printed, dict(zip(cons.JET2, x)), psi_params)) for x in X]
        checks.append(audited("printed adjoint equation", max(vals) < TOL["self_adjoint"], max(vals),
                              TOL["self_adjoint"], "printed adjoint equation S", group="conserve",
                              detail=f"the printed S = -psi_z + psi_xx + psi_yy + psi_zz gives {to_string(printed)} on the "
                                     "multiplier family; the Euler-Lagrange operator gives -psi_t - a*u*psi_x + psi_xx + "
                                     "psi_yy + psi_zz, which vanishes"))
    gens = list(range(1, 8)) if generators is None else list(generators)
    rows = []
    for i in gens:
        cv = cons.build_conserved_vector(la.generator(i), psi_expr)
        rep = cons.divergence_residual(cv, rec, s.grid, psi_params, s.tolerance("divergence"))
        write_csv(s.out / "divergence" / f"D{i}.csv", ("x", "y", "z", "t", "residual"),
                  (tuple(p) + (v,) for p, v in zip(rep.points.tolist(), rep.values.tolist())))
        rows.append((f"D{i}", to_string(psi_expr), rec.name, rep.n_points, rep.max_abs))
        translation = i in (2, 4, 6, 7)
        make = asserted if (translation and psi is None) else audited
        checks.append(make(f"divergence D{i} on {rec.name}", rep.passed, rep.max_abs, rep.tol,
                           "conserved vectors from the multiplier family", group="conserve",
                           detail=f"psi = {to_string(psi_expr)}, {rep.n_points} points"))
    if generators is None and psi is None:
        cv = cons.build_conserved_vector(la.generator(6), parse("x"))
        rep = cons.divergence_residual(cv, rec, s.grid, psi_params)
        rows.append(("D6", "x", rec.name, rep.n_points, rep.max_abs))
        checks.append(asserted("divergence control psi = x", rep.max_abs > 1e-3, rep.max_abs, 1e-3,
                               "multiplier outside the self-adjoint family", group="conserve"))
    write_csv(s.out / "divergence.csv", ("generator", "psi", "solution", "n_points", "max_residual"), rows)
    if table6:
        checks += _table6(s)
    return checks


def _table6(s: Settings) -> list[Check]:
    rows = []
    checks = []
    for r in cons.table6_crosscheck(100, s.seed):
        for comp, dev, arg, sc in zip(("eta_x", "eta_y", "eta_z", "eta_t"), r.deviations, r.argmax, r.scale):
            rows.append((f"D{r.generator}", r.convention, comp, dev, sc))
        ok = r.max_deviation < TOL["table6"]
        checks.append(audited(f"Table 6 row D{r.generator}", ok, r.max_deviation, TOL["table6"],
                              f"Table 6 (conserved vectors), row D{r.generator}", group="conserve",
                              detail=f"omega convention {r.convention}; component deviations "
                                     + ", ".join(f"{d:.3g}" for d in r.deviations),
                              evidence={"convention": r.convention, "deviations": list(r.deviations)}))
    write_csv(s.out / "table6.csv", ("generator", "convention", "component", "max_deviation", "max_abs_constructed"), rows)
    return checks
