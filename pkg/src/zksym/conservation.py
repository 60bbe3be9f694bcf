"""Formal Lagrangian, adjoint equation and conserved vectors.

The Lagrangian is ``L = psi * Delta``.  Because ``Delta`` holds no mixed
second derivatives, the conserved-vector formula below carries only the pure
``u_xx``, ``u_yy`` and ``u_zz`` terms; it is not a general formula for other
equations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import _kernels
from .equation import DEFAULT_A, DELTA
from .jet_expr import (
    ZERO,
    ZK_SPACE,
    Coord,
    Expr,
    add,
    free_names,
    mul,
    parse,
    partial_diff,
    simplify,
    substitute,
    to_string,
    total_derivative,
)
from .lie_algebra import VectorField, generator
from .solutions import DEFAULT_GRID, GridSpec, ResidualReport, SolutionRecord, _reduce, grid_points, jet_values

BASE = ZK_SPACE.base
FIRST = tuple(ZK_SPACE.derivatives(1))
SECOND = tuple(ZK_SPACE.derivatives(2))
JET2 = BASE + ("u",) + FIRST + SECOND
ALL_COORDS = ZK_SPACE.all_coords

PSI_FAMILY_TEXT = "c1*y*z + c2*y + c3*z + c4"
PSI_FAMILY = parse(PSI_FAMILY_TEXT)
PSI_DEFAULTS = {"c1": 1.0, "c2": -0.5, "c3": 0.75, "c4": 0.25}

#: the printed adjoint equation, in terms of psi
PRINTED_ADJOINT_TEXT = "-psi_z + psi_xx + psi_yy + psi_zz"


def lagrangian(psi: Expr) -> Expr:
    return mul(psi, DELTA)


def adjoint_equation(psi: Expr) -> Expr:
    """Euler-Lagrange operator applied to ``psi * Delta``, up to second order.

    Mixed second-order slots are included for completeness; they vanish for
    this equation.
    """
    L = lagrangian(psi)
    terms = [partial_diff(L, "u")]
    for v in BASE:
        terms.append(mul(-1, total_derivative(partial_diff(L, f"u_{v}"), v)))
    for name in SECOND:
        dL = partial_diff(L, name)
        if dL == ZERO:
            continue
        multi = ZK_SPACE.classify(name).multi
        d = dL
        for b, k in zip(BASE, multi):
            for _ in range(k):
                d = total_derivative(d, b)
        terms.append(d)
    return simplify(add(*terms))


def printed_adjoint_equation(psi: Expr) -> Expr:
    """The published adjoint expression, evaluated for a given ``psi``."""
    d = lambda e, *vs: _pd(e, vs)  # noqa: E731
    return simplify(add(mul(-1, d(psi, "z")), d(psi, "x", "x"), d(psi, "y", "y"), d(psi, "z", "z")))


def _pd(e: Expr, vs) -> Expr:
    for v in vs:
        e = partial_diff(e, v)
    return e


def sample_jets(n_points: int, seed: int, names=JET2, box: float = 2.0) -> np.ndarray:
    """Off-shell jet points, one RNG stream ``default_rng([seed, i])`` per point."""
    X = np.empty((n_points, len(names)))
    for i in range(n_points):
        X[i] = np.random.default_rng([seed, i]).uniform(-box, box, len(names))
    return X


def _params_for(e: Expr, params: Mapping[str, float] | None) -> dict[str, float]:
    env = {"a": DEFAULT_A, **PSI_DEFAULTS, **(params or {})}
    return env


@dataclass
class SelfAdjointness:
    psi: Expr
    delta1: Expr
    residual: Expr
    symbolic_zero: bool
    numeric_max: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.symbolic_zero or self.numeric_max < self.tol


def self_adjointness_check(
    psi: Expr | str,
    n_points: int = 100,
    seed: int = 42,
    params: Mapping[str, float] | None = None,
    tol: float = 1e-10,
) -> SelfAdjointness:
    """Test ``S - delta1 * Delta == 0`` with ``delta1 = -d psi / du``."""
    psi = parse(psi) if isinstance(psi, str) else psi
    S = adjoint_equation(psi)
    delta1 = simplify(mul(-1, partial_diff(psi, "u")))
    R = simplify(add(S, mul(-1, delta1, DELTA)))
    prog = _kernels.compile_exprs([R], JET2)
    X = sample_jets(n_points, seed)
    vals = _kernels.eval_program(prog, X, prog.param_vector(_params_for(R, params)))[:, 0]
    return SelfAdjointness(psi, delta1, R, R == ZERO, float(np.max(np.abs(vals))), tol)


@dataclass(frozen=True)
class ConservedVector:
    eta: tuple[Expr, Expr, Expr, Expr]
    field: VectorField
    psi: Expr
    convention: str = "standard"

    @property
    def eta_x(self) -> Expr:
        return self.eta[0]

    @property
    def eta_y(self) -> Expr:
        return self.eta[1]

    @property
    def eta_z(self) -> Expr:
        return self.eta[2]

    @property
    def eta_t(self) -> Expr:
        return self.eta[3]

    def divergence(self) -> Expr:
        return simplify(add(*(total_derivative(c, v) for c, v in zip(self.eta, BASE))))


def omega(V: VectorField) -> Expr:
    """``xi5 - xi1 u_x - xi2 u_y - xi3 u_z - xi4 u_t``."""
    terms = [V.xi_u]
    for xi, v in zip((V.xi_x, V.xi_y, V.xi_z, V.xi_t), ("u_x", "u_y", "u_z", "u_t")):
        terms.append(mul(-1, xi, Coord(v)))
    return simplify(add(*terms))


def build_conserved_vector(V: VectorField, psi: Expr | str, convention: str = "standard") -> ConservedVector:
    """Conserved vector of ``V`` for the multiplier ``psi``.

    ``convention="flipped"`` negates ``omega`` and keeps the ``xi L`` terms; the
    published table mixes both conventions, so the crosscheck tries each.
    """
    if convention not in ("standard", "flipped"):
        raise ValueError(f"unknown convention {convention!r}")
    psi = parse(psi) if isinstance(psi, str) else psi
    L = lagrangian(psi)
    w = omega(V)
    if convention == "flipped":
        w = simplify(mul(-1, w))
    xi = (V.xi_x, V.xi_y, V.xi_z)
    comps = []
    for k, v in enumerate(("x", "y", "z")):
        L1 = partial_diff(L, f"u_{v}")
        L2 = partial_diff(L, f"u_{v}{v}")
        comps.append(simplify(add(
            mul(xi[k], L),
            mul(w, L1),
            mul(-1, w, total_derivative(L2, v)),
            mul(L2, total_derivative(w, v)),
        )))
    comps.append(simplify(add(mul(V.xi_t, L), mul(w, partial_diff(L, "u_t")))))
    return ConservedVector(tuple(comps), V, psi, convention)


def divergence_values(
    cv: ConservedVector, record: SolutionRecord, pts: np.ndarray, params: Mapping[str, float] | None = None
) -> np.ndarray:
    div = cv.divergence()
    names, jets = jet_values(record, pts, order=3)
    prog = _kernels.compile_exprs([div], names)
    env = {**PSI_DEFAULTS, **record.param_dict, **(params or {})}
    return _kernels.eval_program(prog, jets, prog.param_vector(env))[:, 0]


def divergence_residual(
    cv: ConservedVector,
    record: SolutionRecord,
    grid: GridSpec = DEFAULT_GRID,
    params: Mapping[str, float] | None = None,
    tol: float = 1e-8,
) -> ResidualReport:
    """Max ``|D_x eta^x + D_y eta^y + D_z eta^z + D_t eta^t|`` on the order-3 jet of ``record``.

    The grid spans the record's active variables and every base variable
    that ``psi`` or the field depends on.
    """
    extra = {v for v in BASE if v in free_names(cv.psi) or any(v in free_names(c) for c in cv.field.xi)}
    rec = record
    if extra - set(record.active_vars()):
        from dataclasses import replace

        rec = replace(record, axes=tuple(sorted(set(record.axes) | extra, key=BASE.index)))
    pts = grid_points(rec, grid)
    vals = divergence_values(cv, rec, pts, params)
    name = f"{cv.field.name or 'V'}|{to_string(cv.psi)}|{record.name}"
    return _reduce(name, grid.describe(rec.active_vars()), pts, vals, tol, record.provenance, BASE)


# -- the published table of conserved vectors --------------------------------------

_KX = "(u/2 + x/2*u_x + y/2*u_y + z/2*u_z + t*u_t)"

TABLE6 = {
    1: (
        "Psi*x/2*(u_t + u_xx + u_yy + u_zz) + a*(-u/2 - x/2*u_x - y/2*u_y - z/2*u_z - t*u_t)*Psi*u"
        " + (-u_x - x*u_xx - y*u_xy - z*u_xz - t*u_xt)*Psi",
        f"y/2*Psi*(u_t + a*u_x + u_yy + u_zz) + {_KX}*(c1*z + c2) - (u_y + x/2*u_xy + z/2*u_yz + t*u_y)*Psi",
        f"z/2*Psi*(u_t + a*u_x + u_yy + u_zz) + {_KX}*(c1*y + c3) - (u_z + x/2*u_xz + y/2*u_yz)*Psi",
        f"-{_KX}*Psi + t*Psi*(u_t + a*u_x + u_yy + u_zz)",
    ),
    2: (
        "-a*Psi*u*u_t - Psi*u_xt",
        "-Psi*u_yt + (c1*z + c2)*u_t",
        "-Psi*u_zt + (c1*y + c3)*u_t",
        "-Psi*u_t + Psi*Delta",
    ),
    3: (
        "a*u*Psi*(-z*u_y + y*u_z) + Psi*(-z*u_xy + y*u_xz)",
        "Psi*(-z*u_yy + u_z + y*u_yz) - (c1*z + c2)*(-z*u_y + y*u_z) + z*Psi*Delta",
        "Psi*(-u_y - z*u_yz + y*u_zz) - (c1*y + c3)*(-z*u_y + y*u_z) - y*Psi*Delta",
        "Psi*(-z*u_y + y*u_z)",
    ),
    4: (
        "-a*Psi*u*u_y - u_xy*Psi",
        "-Psi*u_yy + (c1*z + c2)*u_y + Psi*Delta",
        "-Psi*u_yz + (c1*y + c3)*u_y",
        "-Psi*u_y",
    ),
    5: (
        "a*Psi*u*(1/a - t*u_x) - Psi*t*u_xx + Psi*t*Delta",
        "-Psi*t*u_xy - (c1*z + c2)*(1/a - t*u_x)",
        "-Psi*t*u_xz - (c1*y + c3)*(1/a - t*u_x)",
        "Psi*(1/a - t*u_x)",
    ),
    6: (
        "a*Psi*u*u_x + u_xx*Psi + Psi*Delta",
        "Psi*u_xy - (c1*z + c2)*u_x",
        "Psi*u_xz - (c1*y + c3)*u_x",
        "Psi*u_x",
    ),
    7: (
        "a*Psi*u*u_z + u_xz*Psi",
        "Psi*u_yz - (c1*z + c2)*u_z",
        "Psi*u_zz - (c1*y + c3)*u_z + Psi*Delta",
        "Psi*u_z",
    ),
}


def table6_entry(i: int, psi: Expr = PSI_FAMILY) -> tuple[Expr, ...]:
    mapping = {"Psi": psi, "Delta": DELTA}
    return tuple(simplify(substitute(parse(s), mapping)) for s in TABLE6[i])


@dataclass
class RowComparison:
    generator: int
    convention: str
    deviations: tuple[float, float, float, float]
    argmax: tuple[dict, dict, dict, dict]
    scale: tuple[float, float, float, float] = field(default=(0.0, 0.0, 0.0, 0.0))

    @property
    def max_deviation(self) -> float:
        return max(self.deviations)


def _compare_row(i: int, X: np.ndarray, env: dict) -> RowComparison:
    want = table6_entry(i)
    best = None
    for conv in ("standard", "flipped"):
        cv = build_conserved_vector(generator(i), PSI_FAMILY, conv)
        prog = _kernels.compile_exprs(list(cv.eta) + list(want), JET2)
        vals = _kernels.eval_program(prog, X, prog.param_vector(env))
        diff = np.abs(vals[:, :4] - vals[:, 4:])
        dev = tuple(float(diff[:, k].max()) for k in range(4))
        arg = tuple(dict(zip(JET2, X[int(np.argmax(diff[:, k]))].tolist())) for k in range(4))
        scale = tuple(float(np.abs(vals[:, k]).max()) for k in range(4))
        row = RowComparison(i, conv, dev, arg, scale)
        if best is None or row.max_deviation < best.max_deviation:
            best = row
    return best


def table6_crosscheck(n_points: int = 100, seed: int = 42, params: Mapping[str, float] | None = None) -> list[RowComparison]:
    """Constructed versus published conserved vectors at random off-shell jet points.

    For each row the sign convention of ``omega`` with the smaller deviation is
    kept; deviations are reported, never asserted.
    """
    env = {"a": DEFAULT_A, **PSI_DEFAULTS, **(params or {})}
    X = sample_jets(n_points, seed)
    return [_compare_row(i, X, env) for i in range(1, 8)]
