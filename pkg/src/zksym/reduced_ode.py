"""Second-order reduced ODEs integrated with RK4 and adaptive Fehlberg 4(5).

A reduced equation ``E(l, H, H', H'') = 0`` that is linear in ``H''`` is
rewritten as ``H'' = -B/A`` with ``A = dE/dH''`` and ``B = E`` at ``H'' = 0``.
The right-hand side is compiled once and handed to the numeric kernels; ``A``
travels along as a second output so a vanishing leading coefficient stops the
integration with a ``singular`` status instead of dividing by zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .jet_expr import Const, Expr, add, evaluate, mul, parse, partial_diff, power, simplify, substitute
from .solutions import SPACE_L, ReducedEquation, reduced_equation

ODE_VARS = ("l", "H", "H_l")


class ODEError(ValueError):
    pass


@dataclass(frozen=True)
class ODEProblem:
    """``H'' = f(l, H, H')`` with parameters, initial state and span."""

    name: str
    equation: ReducedEquation
    params: tuple[tuple[str, float], ...]
    l0: float
    H0: float
    Hp0: float
    l1: float
    analytic: Expr | None = None
    ic_source: str = "convention"
    note: str = ""

    def __post_init__(self):
        if not self.l1 > self.l0:
            raise ODEError("span must be increasing")
        if partial_diff(self.equation.expr, "H_ll") == Const(0):
            raise ODEError(f"{self.equation.name} is not second order in H")

    @property
    def param_dict(self) -> dict[str, float]:
        return dict(self.params)

    def leading(self) -> Expr:
        return simplify(partial_diff(self.equation.expr, "H_ll"))

    def rhs(self) -> Expr:
        rest = substitute(self.equation.expr, {"H_ll": Const(0)})
        return simplify(mul(-1, rest, power(self.leading(), -1)))

    def program(self) -> _kernels.Program:
        return _kernels.compile_exprs([self.rhs(), self.leading()], ODE_VARS)

    def param_vector(self, prog: _kernels.Program) -> np.ndarray:
        return prog.param_vector(self.param_dict)

    def with_state(self, l0: float, H0: float, Hp0: float, l1: float | None = None) -> "ODEProblem":
        return _replace(self, l0=float(l0), H0=float(H0), Hp0=float(Hp0), l1=float(self.l1 if l1 is None else l1))

    def exact(self, l: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Analytic ``H`` and ``H'`` on ``l``; requires an analytic solution."""
        if self.analytic is None:
            raise ODEError(f"{self.name} has no analytic solution")
        p = self.param_dict
        dH = partial_diff(self.analytic, "l")
        H = np.array([evaluate(self.analytic, {"l": v}, p) for v in l])
        Hp = np.array([evaluate(dH, {"l": v}, p) for v in l])
        return H, Hp


def _replace(obj, **kw):
    from dataclasses import replace

    return replace(obj, **kw)


def problem_from_equation(
    name: str,
    equation: ReducedEquation | str,
    params: Mapping[str, float],
    span: tuple[float, float],
    ic: tuple[float, float] | None = None,
    analytic: str | Expr | None = None,
    note: str = "",
) -> ODEProblem:
    """Build a problem; the initial state comes from ``analytic`` when ``ic`` is omitted."""
    eq = reduced_equation(equation) if isinstance(equation, str) else equation
    sol = parse(analytic, SPACE_L) if isinstance(analytic, str) else analytic
    l0, l1 = (float(v) for v in span)
    params = {k: float(v) for k, v in params.items()}
    if ic is None:
        if sol is None:
            raise ODEError("initial conditions or an analytic solution are required")
        H0 = evaluate(sol, {"l": l0}, params)
        Hp0 = evaluate(partial_diff(sol, "l"), {"l": l0}, params)
        source = "analytic"
    else:
        H0, Hp0 = (float(v) for v in ic)
        source = "convention"
    return ODEProblem(name, eq, tuple(sorted(params.items())), l0, H0, Hp0, l1, sol, source, note)


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4"
    h: float = 0.01
    rtol: float = 1e-8
    atol: float = 1e-8
    h0: float = 1e-3
    hmin: float = 1e-12
    hmax: float = 0.5
    max_steps: int = 1_000_000

    def __post_init__(self):
        if self.method not in ("rk4", "rkf45"):
            raise ValueError(f"unknown method {self.method!r}")
        if not (self.h > 0 and self.rtol > 0 and self.atol > 0 and self.h0 > 0):
            raise ValueError("step sizes and tolerances must be positive")
        if not 0 < self.hmin < self.hmax:
            raise ValueError("need 0 < hmin < hmax")


@dataclass
class Trajectory:
    """Samples ``(l, H, H', H'')`` with the integrator status and step statistics."""

    name: str
    method: str
    l: np.ndarray
    H: np.ndarray
    Hp: np.ndarray
    Hpp: np.ndarray
    status: int = _kernels.OK
    n_accept: int = 0
    n_reject: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == _kernels.OK

    @property
    def status_name(self) -> str:
        return _kernels.STATUS_NAMES[self.status]

    def __len__(self) -> int:
        return len(self.l)

    def dense(self, lq: np.ndarray | Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
        """Quintic Hermite interpolant of ``H`` (and its derivative for ``H'``) at ``lq``."""
        lq = np.asarray(lq, dtype=float)
        if len(self.l) < 2:
            raise ODEError("need at least two samples to interpolate")
        if lq.size and (lq.min() < self.l[0] - 1e-12 or lq.max() > self.l[-1] + 1e-12):
            raise ODEError("query outside the integrated span")
        k = np.clip(np.searchsorted(self.l, lq, side="right") - 1, 0, len(self.l) - 2)
        la, lb = self.l[k], self.l[k + 1]
        h = lb - la
        s = (lq - la) / h
        y0, y1 = self.H[k], self.H[k + 1]
        d0, d1 = self.Hp[k] * h, self.Hp[k + 1] * h
        c0, c1 = self.Hpp[k] * h * h, self.Hpp[k + 1] * h * h
        s2, s3, s4, s5 = s * s, s**3, s**4, s**5
        h00 = 1 - 10 * s3 + 15 * s4 - 6 * s5
        h10 = s - 6 * s3 + 8 * s4 - 3 * s5
        h20 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5)
        h01 = 10 * s3 - 15 * s4 + 6 * s5
        h11 = -4 * s3 + 7 * s4 - 3 * s5
        h21 = 0.5 * (s3 - 2 * s4 + s5)
        H = h00 * y0 + h10 * d0 + h20 * c0 + h01 * y1 + h11 * d1 + h21 * c1
        g00 = -30 * s2 + 60 * s3 - 30 * s4
        g10 = 1 - 18 * s2 + 32 * s3 - 15 * s4
        g20 = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4)
        g01 = 30 * s2 - 60 * s3 + 30 * s4
        g11 = -12 * s2 + 28 * s3 - 15 * s4
        g21 = 0.5 * (3 * s2 - 8 * s3 + 5 * s4)
        Hp = (g00 * y0 + g10 * d0 + g20 * c0 + g01 * y1 + g11 * d1 + g21 * c1) / h
        return H, Hp

    def rows(self) -> list[tuple[float, float, float, str]]:
        return [(float(a), float(b), float(c), self.method) for a, b, c in zip(self.l, self.H, self.Hp)]


def _traj(p: ODEProblem, method: str, raw: np.ndarray, status: int, na: int = 0, nr: int = 0, **meta) -> Trajectory:
    raw = np.asarray(raw, dtype=float).reshape(-1, 4)
    return Trajectory(p.name, method, raw[:, 0].copy(), raw[:, 1].copy(), raw[:, 2].copy(), raw[:, 3].copy(),
                      int(status), int(na), int(nr), dict(meta))


def rk4_integrate(p: ODEProblem, cfg: IntegratorConfig = IntegratorConfig(), impl=None) -> Trajectory:
    """Classical RK4 with nodes ``l0 + n*h``; the last node lands on the span end."""
    if cfg.method != "rk4":
        raise ValueError("configuration is not for rk4")
    n = int(round((p.l1 - p.l0) / cfg.h))
    if n < 1 or abs(p.l0 + n * cfg.h - p.l1) > 1e-9 * max(1.0, abs(p.l1)):
        raise ODEError(f"step {cfg.h} does not divide the span [{p.l0}, {p.l1}]")
    prog = p.program()
    impl = impl or _kernels.backend
    raw, st = impl.rk4(prog.ops, prog.consts, p.param_vector(prog), prog.n_out, prog.max_stack,
                       p.l0, p.H0, p.Hp0, cfg.h, n)
    return _traj(p, "rk4", raw, st, n, 0, h=cfg.h)


def rkf45_integrate(p: ODEProblem, cfg: IntegratorConfig = IntegratorConfig(method="rkf45"), impl=None) -> Trajectory:
    """Fehlberg 4(5) pair, fifth-order solution carried forward, RMS error control."""
    if cfg.method != "rkf45":
        raise ValueError("configuration is not for rkf45")
    prog = p.program()
    impl = impl or _kernels.backend
    raw, st, na, nr = impl.rkf45(prog.ops, prog.consts, p.param_vector(prog), prog.n_out, prog.max_stack,
                                 p.l0, p.l1, p.H0, p.Hp0, cfg.rtol, cfg.atol, cfg.h0, cfg.hmin, cfg.hmax,
                                 cfg.max_steps)
    return _traj(p, "rkf45", raw, st, na, nr, rtol=cfg.rtol, atol=cfg.atol)


def integrate(p: ODEProblem, cfg: IntegratorConfig, impl=None) -> Trajectory:
    return rk4_integrate(p, cfg, impl) if cfg.method == "rk4" else rkf45_integrate(p, cfg, impl)


@dataclass
class Comparison:
    l: np.ndarray
    dH: np.ndarray
    dHp: np.ndarray
    tol: float

    @property
    def max_H(self) -> float:
        return float(np.max(self.dH)) if self.dH.size else 0.0

    @property
    def max_Hp(self) -> float:
        return float(np.max(self.dHp)) if self.dHp.size else 0.0

    @property
    def sup(self) -> float:
        return max(self.max_H, self.max_Hp)

    @property
    def passed(self) -> bool:
        return self.sup < self.tol


def compare(t1: Trajectory, t2: Trajectory, tol: float = 1e-6) -> Comparison:
    """Sup-norm of ``|H1 - H2|`` and ``|H1' - H2'|`` on the samples of ``t1`` inside ``t2``'s span."""
    lo, hi = max(t1.l[0], t2.l[0]), min(t1.l[-1], t2.l[-1])
    if hi < lo:
        raise ODEError("trajectories have disjoint spans")
    keep = (t1.l >= lo) & (t1.l <= hi)
    lq = t1.l[keep]
    H2, Hp2 = t2.dense(lq)
    return Comparison(lq, np.abs(t1.H[keep] - H2), np.abs(t1.Hp[keep] - Hp2), tol)


def analytic_error(t: Trajectory, p: ODEProblem) -> float:
    H, _ = p.exact(t.l)
    return float(np.max(np.abs(t.H - H)))


def convergence_order(p: ODEProblem, steps: Sequence[float] = (0.04, 0.02, 0.01), impl=None) -> tuple[list[float], list[float]]:
    """Errors against the analytic solution and the observed orders between consecutive steps."""
    errs = [analytic_error(rk4_integrate(p, IntegratorConfig(h=h), impl), p) for h in steps]
    orders = [float(np.log(errs[k] / errs[k + 1]) / np.log(steps[k] / steps[k + 1])) for k in range(len(errs) - 1)]
    return errs, orders


# -- the five comparison configurations ----------------------------------------------


def figure_problems() -> dict[str, ODEProblem]:
    """Problems behind Figures 11-15.

    Figure 11 starts from the analytic kink.  The others have no printed
    initial data; they start from ``H(1) = 1, H'(1) = 0`` and run over
    ``[1, 5]``, which avoids the zeros of the leading coefficients.
    """
    conv = (1.0, 0.0)
    span = (1.0, 5.0)
    return {
        "fig11": problem_from_equation(
            "fig11", "x1_r3", {"a": 1, "b2": 1, "b5": 0, "b6": 1, "C": 0.5}, (-5.0, 5.0),
            analytic="2/(1 + 2*C*exp(-l))",
            note="initial data from the analytic kink with C = 1/2",
        ),
        "fig12": problem_from_equation(
            "fig12", "x3_r3",
            {"a": 1, "b1": 1, "b2": 2, "b3": 1, "A1": 1, "A2": 1, "d2": 1, "d4": 1, "d7": 1, "d5": 1},
            span, conv, note="d5 = 1 assumed",
        ),
        "fig13": problem_from_equation("fig13", "d1_ode", {"a": 1}, span, conv),
        "fig14": problem_from_equation("fig14", "d2_ode", {"a": 1, "A1": 1}, span, conv),
        "fig15": problem_from_equation("fig15", "d3_ode", {"a": 1, "A1": 1}, span, conv),
    }


ODE_ALIASES = {"x1_r3": "fig11", "x3_r3": "fig12", "d1_ode": "fig13", "d2_ode": "fig14", "d3_ode": "fig15"}


def figure_problem(name: str) -> ODEProblem:
    probs = figure_problems()
    key = ODE_ALIASES.get(name, name)
    if key not in probs:
        raise KeyError(f"unknown ODE {name!r}; known: {', '.join(sorted(probs))}")
    return probs[key]
