"""Second prolongation of point vector fields and the invariance test.

The coefficient of ``d/du_J`` is ``zeta_J = D_J W + sum_i xi^i u_{J,i}`` with
characteristic ``W = xi_u - sum_i xi^i u_i``.  The order-three terms cancel
exactly, so every coefficient lives on the second-order jet.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np

from . import _kernels
from .equation import DEFAULT_A, DELTA, UT_ON_SHELL
from .jet_expr import (
    ZK_SPACE,
    Coord,
    Expr,
    add,
    evaluate,
    jet_order,
    mul,
    partial_diff,
    simplify,
    total_derivative,
)
from .lie_algebra import VARS, VectorField

BASE = ZK_SPACE.base
FIRST = tuple(ZK_SPACE.derivatives(1))
SECOND = tuple(ZK_SPACE.derivatives(2))
#: coordinates of the second-order jet, in sampling order
JET2 = BASE + ("u",) + FIRST + SECOND

CONTROL_FIELD = VectorField.from_strings(("u", "0", "0", "0", "0"), "u*d_x")


@dataclass(frozen=True)
class ProlongedField:
    """A vector field with its first- and second-order prolongation coefficients."""

    field: VectorField
    coeffs: tuple[tuple[str, Expr], ...]

    def coefficient(self, name: str) -> Expr:
        return dict(self.coeffs)[ZK_SPACE.canonical(name)]

    def apply(self, e: Expr) -> Expr:
        """``pr V (e)`` for an expression on the second-order jet."""
        terms = [mul(c, partial_diff(e, v)) for c, v in zip(self.field.xi, VARS)]
        terms += [mul(c, partial_diff(e, name)) for name, c in self.coeffs]
        return simplify(add(*terms))


def characteristic(V: VectorField) -> Expr:
    """``W = xi_u - xi_x u_x - xi_y u_y - xi_z u_z - xi_t u_t``."""
    terms = [V.xi_u]
    for xi, name in zip(V.xi[:4], FIRST):
        terms.append(mul(-1, xi, Coord(name)))
    return simplify(add(*terms))


@lru_cache(maxsize=64)
def prolong2(V: VectorField) -> ProlongedField:
    W = characteristic(V)
    coeffs = []
    for name in FIRST + SECOND:
        multi = ZK_SPACE.classify(name).multi
        DW = W
        for b, k in zip(BASE, multi):
            for _ in range(k):
                DW = total_derivative(DW, b)
        transport = [mul(xi, Coord(ZK_SPACE.extend(name, b))) for xi, b in zip(V.xi[:4], BASE)]
        zeta = simplify(add(DW, *transport))
        if jet_order(zeta) > 2:
            raise AssertionError(f"third-order terms survive in the {name} coefficient")
        coeffs.append((name, zeta))
    return ProlongedField(V, tuple(coeffs))


def prolonged_action(V: VectorField, e: Expr = DELTA) -> Expr:
    return prolong2(V).apply(e)


def sample_on_shell(n_points: int, seed: int, a: float = DEFAULT_A, box: float = 2.0) -> np.ndarray:
    """Random second-order jet points with ``u_t`` solved from the equation.

    Columns follow :data:`JET2`.  Point ``i`` draws from its own stream
    ``default_rng([seed, i])`` so results do not depend on batching.
    """
    if n_points < 1:
        raise ValueError("n_points must be at least 1")
    X = np.empty((n_points, len(JET2)))
    j = {n: k for k, n in enumerate(JET2)}
    for i in range(n_points):
        rng = np.random.default_rng([seed, i])
        X[i] = rng.uniform(-box, box, len(JET2))
        pt = dict(zip(JET2, X[i]))
        X[i, j["u_t"]] = evaluate(UT_ON_SHELL, pt, {"a": a})
    return X


def invariance_values(
    V: VectorField,
    n_points: int = 100,
    seed: int = 42,
    params: Mapping[str, float] | None = None,
) -> np.ndarray:
    """``pr V (Delta)`` at each sampled on-shell point."""
    env = {"a": DEFAULT_A, **(params or {})}
    prog = _kernels.compile_exprs([prolonged_action(V)], JET2)
    X = sample_on_shell(n_points, seed, env["a"])
    return _kernels.eval_program(prog, X, prog.param_vector(env))[:, 0]


def invariance_residual(
    V: VectorField,
    n_points: int = 100,
    seed: int = 42,
    params: Mapping[str, float] | None = None,
) -> float:
    """Maximum of ``|pr V (Delta)|`` over ``n_points`` on-shell jet points."""
    return float(np.max(np.abs(invariance_values(V, n_points, seed, params))))
