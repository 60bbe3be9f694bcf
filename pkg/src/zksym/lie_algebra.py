"""The seven-dimensional symmetry algebra of the ZK equation.

Generators act on ``(x, y, z, t, u)``.  Brackets follow ``[A, B] = A(B) - B(A)``
componentwise.  Structure constants are derived from symbolic commutators and
compared against the printed commutator table, which is stored here only as a
golden value.

Adjoint conventions: an algebra element is a row of coefficients ``l`` over
``D1..D7``.  The single-generator matrices act on rows, ``l* = l @ R_i(eps)``,
with ``R_i(eps) = expm(-eps * M_i)`` and ``M_i[j, k] = c[i][j][k]``; row ``j``
of ``R_i`` is ``Ad(exp(eps D_i)) D_j`` expanded in the basis.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .jet_expr import (
    ZERO,
    Const,
    Expr,
    NotPolynomialError,
    add,
    evaluate,
    laurent_coeffs,
    mul,
    parse,
    partial_diff,
    simplify,
    symbols,
)

VARS = ("x", "y", "z", "t", "u")
N = 7


class BasisError(ValueError):
    """A commutator could not be written in the span of the basis."""


@dataclass(frozen=True)
class VectorField:
    """``xi_x d_x + xi_y d_y + xi_z d_z + xi_t d_t + xi_u d_u``."""

    xi: tuple[Expr, Expr, Expr, Expr, Expr]
    name: str = ""

    def __post_init__(self):
        if len(self.xi) != 5:
            raise ValueError("a vector field has five components")
        for c in self.xi:
            coords, _ = symbols(c)
            bad = coords - set(VARS)
            if bad:
                raise ValueError(f"component depends on jet coordinates {sorted(bad)}")

    @classmethod
    def from_strings(cls, comps: Sequence[str], name: str = "") -> "VectorField":
        return cls(tuple(parse(c) for c in comps), name)

    @property
    def xi_x(self) -> Expr:
        return self.xi[0]

    @property
    def xi_y(self) -> Expr:
        return self.xi[1]

    @property
    def xi_z(self) -> Expr:
        return self.xi[2]

    @property
    def xi_t(self) -> Expr:
        return self.xi[3]

    @property
    def xi_u(self) -> Expr:
        return self.xi[4]

    def apply(self, f: Expr) -> Expr:
        """Act on ``f`` as the first-order operator ``sum xi_s d_s f``."""
        return simplify(add(*(mul(c, partial_diff(f, v)) for c, v in zip(self.xi, VARS))))

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(tuple(simplify(add(a, b)) for a, b in zip(self.xi, other.xi)))

    def scale(self, k) -> "VectorField":
        return VectorField(tuple(simplify(mul(Const(k) if not isinstance(k, Expr) else k, c)) for c in self.xi))

    def is_zero(self) -> bool:
        return all(c == ZERO for c in self.xi)

    def __str__(self):
        parts = [f"({c})*d_{v}" for c, v in zip(self.xi, VARS) if c != ZERO]
        return " + ".join(parts) if parts else "0"


GENERATOR_TEXT = {
    1: ("x/2", "y/2", "z/2", "t", "-u/2"),
    2: ("0", "0", "0", "1", "0"),
    3: ("0", "z", "-y", "0", "0"),
    4: ("0", "1", "0", "0", "0"),
    5: ("t", "0", "0", "0", "1/a"),
    6: ("1", "0", "0", "0", "0"),
    7: ("0", "0", "1", "0", "0"),
}

GENERATOR_ROLES = {
    1: "dilation",
    2: "time translation",
    3: "rotation in (y, z)",
    4: "translation in y",
    5: "Galilean boost",
    6: "translation in x",
    7: "translation in z",
}


@lru_cache(maxsize=None)
def generator(i: int) -> VectorField:
    if i not in GENERATOR_TEXT:
        raise ValueError(f"generator index must be in 1..7, got {i}")
    return VectorField.from_strings(GENERATOR_TEXT[i], f"D{i}")


def generators() -> list[VectorField]:
    return [generator(i) for i in range(1, N + 1)]


ZERO_FIELD = VectorField((ZERO,) * 5, "0")


def combination(coeffs: Sequence) -> VectorField:
    """``sum c_i D_i``; coefficients may be numbers or expressions."""
    if len(coeffs) != N:
        raise ValueError("seven coefficients expected")
    out = ZERO_FIELD
    for c, g in zip(coeffs, generators()):
        if isinstance(c, Expr) or c != 0:
            out = out + g.scale(c)
    return out


def general_field(prefix: str = "c") -> VectorField:
    """The general infinitesimal with symbolic constants ``c1..c7``."""
    return combination([parse(f"{prefix}{i}") for i in range(1, N + 1)])


def commutator(A: VectorField, B: VectorField) -> VectorField:
    return VectorField(tuple(simplify(add(A.apply(b), -B.apply(a))) for a, b in zip(A.xi, B.xi)))


def _coeff_table(V: VectorField) -> dict[tuple[int, tuple[int, ...]], Fraction]:
    names = VARS + ("a",)
    out = {}
    for comp, e in enumerate(V.xi):
        try:
            coeffs = laurent_coeffs(e, names)
        except NotPolynomialError as exc:
            raise BasisError(str(exc)) from None
        for m, c in coeffs.items():
            out[(comp, m)] = c
    return out


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Solve an overdetermined but consistent rational system by elimination."""
    ncol = len(rows[0]) if rows else N
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(ncol):
        p = next((k for k in range(r, len(aug)) if aug[k][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        piv = aug[r][c]
        aug[r] = [v / piv for v in aug[r]]
        for k in range(len(aug)):
            if k != r and aug[k][c] != 0:
                f = aug[k][c]
                aug[k] = [v - f * w for v, w in zip(aug[k], aug[r])]
        pivots.append(c)
        r += 1
    for k in range(r, len(aug)):
        if aug[k][-1] != 0:
            raise BasisError("commutator is not in the span of D1..D7")
    sol = [Fraction(0)] * ncol
    for k, c in enumerate(pivots):
        sol[c] = aug[k][-1]
    return sol


def express_in_basis(V: VectorField) -> tuple[Fraction, ...]:
    """Coefficients ``k`` with ``V = sum k_i D_i``, matched exactly as Laurent polynomials in ``a``."""
    target = _coeff_table(V)
    basis = [_coeff_table(g) for g in generators()]
    keys = sorted(set(target).union(*basis))
    rows = [[b.get(k, Fraction(0)) for b in basis] for k in keys]
    rhs = [target.get(k, Fraction(0)) for k in keys]
    if not keys:
        return (Fraction(0),) * N
    return tuple(_solve_exact(rows, rhs))


@lru_cache(maxsize=1)
def structure_constants() -> tuple[tuple[tuple[Fraction, ...], ...], ...]:
    """``c[i][j][k]`` (0-based) with ``[D_{i+1}, D_{j+1}] = sum_k c[i][j][k] D_{k+1}``."""
    gens = generators()
    return tuple(
        tuple(express_in_basis(commutator(gens[i], gens[j])) for j in range(N)) for i in range(N)
    )


def structure_array() -> np.ndarray:
    c = structure_constants()
    return np.array([[[float(v) for v in row] for row in plane] for plane in c])


# printed commutator table; entry (i, j) is [D_i, D_j]
TABLE2 = {
    1: ("0", "-D2", "0", "-D4/2", "D5/2", "-D6/2", "-D7/2"),
    2: ("D2", "0", "0", "0", "D6", "0", "0"),
    3: ("0", "0", "0", "D7", "0", "0", "-D4"),
    4: ("D4/2", "0", "-D7", "0", "0", "0", "0"),
    5: ("-D5/2", "-D6", "0", "0", "0", "0", "0"),
    6: ("D6/2", "0", "0", "0", "0", "0", "0"),
    7: ("D7/2", "0", "D4", "0", "0", "0", "0"),
}


def basis_vector(text: str) -> tuple[Fraction, ...]:
    """Coefficients of a linear combination written with symbols ``D1..D7``."""
    e = parse(text)
    names = tuple(f"D{i}" for i in range(1, N + 1))
    coeffs = laurent_coeffs(e, names)
    out = [Fraction(0)] * N
    for m, c in coeffs.items():
        if sum(m) != 1 or any(v < 0 for v in m):
            raise ValueError(f"not a linear combination of D1..D7: {text!r}")
        out[m.index(1)] = c
    return tuple(out)


@dataclass
class TableComparison:
    total: int
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def compare_commutator_table() -> TableComparison:
    c = structure_constants()
    res = TableComparison(total=N * N)
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            want = basis_vector(TABLE2[i][j - 1])
            got = c[i - 1][j - 1]
            if tuple(got) != want:
                res.mismatches.append((i, j, want, tuple(got)))
    return res


def jacobi_defects() -> list[tuple[int, int, int]]:
    """Basis triples ``i < j < k`` where the Jacobi identity fails (exact arithmetic)."""
    c = structure_constants()
    bad = []
    for i, j, k in itertools.combinations(range(N), 3):
        for n in range(N):
            s = Fraction(0)
            for m in range(N):
                s += c[i][j][m] * c[m][k][n] + c[j][k][m] * c[m][i][n] + c[k][i][m] * c[m][j][n]
            if s != 0:
                bad.append((i + 1, j + 1, k + 1))
                break
    return bad


def antisymmetry_defects() -> list[tuple[int, int]]:
    c = structure_constants()
    return [
        (i + 1, j + 1)
        for i in range(N)
        for j in range(N)
        if any(c[i][j][k] != -c[j][i][k] for k in range(N))
    ]


def ad_matrix(l: Sequence[float]) -> np.ndarray:
    """Matrix of ``X -> [A, X]`` for ``A = sum l_i D_i``; column ``j`` is ``[A, D_j]``."""
    C = structure_array()
    return np.einsum("i,ijk->kj", np.asarray(l, dtype=float), C)


def killing_form(l: Sequence[float]) -> float:
    """``trace(ad(A) o ad(A))`` computed from the structure constants."""
    ad = ad_matrix(l)
    return float(np.trace(ad @ ad))


def killing_closed_form(l: Sequence[float]) -> float:
    return 2.0 * (l[0] ** 2 - l[2] ** 2)


def printed_ad_matrix(l: Sequence[float]) -> np.ndarray:
    """The matrix printed beside the Killing-form theorem."""
    l1, l2, l3, l4, l5, l6, l7 = (float(v) for v in l)
    return np.array(
        [
            [0, 0, 0, 0, 0, 0, 0],
            [-l2, l1, 0, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, 0, 0],
            [-l4 / 2, 0, -l7, l1 / 2, 0, 0, l3],
            [l5 / 2, 0, 0, 0, -l1 / 2, 0, 0],
            [-l6 / 2, l5, 0, 0, -l2, l1 / 2, 0],
            [-l7 / 2, 0, l4, -l3, 0, 0, l1 / 2],
        ]
    )


# printed single-generator adjoint matrices, in the symbol eps
ADJOINT_PRINTED = {
    1: {(2, 2): "exp(eps)", (4, 4): "exp(eps/2)", (5, 5): "exp(-eps/2)", (6, 6): "exp(eps/2)", (7, 7): "exp(eps/2)"},
    2: {(1, 2): "-eps", (5, 6): "-eps"},
    3: {(4, 4): "cos(eps)", (4, 7): "-sin(eps)", (7, 4): "sin(eps)", (7, 7): "cos(eps)"},
    4: {(1, 4): "-eps/2", (3, 7): "eps"},
    5: {(1, 5): "eps/2", (2, 6): "eps"},
    6: {(1, 6): "-eps/2"},
    7: {(1, 7): "-eps/2", (3, 4): "-eps"},
}


@lru_cache(maxsize=None)
def adjoint_matrix_expr(i: int) -> tuple[tuple[Expr, ...], ...]:
    """Symbolic ``R_i`` in the parameter ``eps``, as printed."""
    if i not in ADJOINT_PRINTED:
        raise ValueError(f"generator index must be in 1..7, got {i}")
    cells = ADJOINT_PRINTED[i]
    return tuple(
        tuple(
            parse(cells[(r, c)]) if (r, c) in cells else Const(1 if r == c else 0)
            for c in range(1, N + 1)
        )
        for r in range(1, N + 1)
    )


def _eval_matrix(m, env: dict) -> np.ndarray:
    return np.array([[evaluate(e, {}, env) for e in row] for row in m])


def adjoint_matrix(i: int, eps: float) -> np.ndarray:
    """Numeric ``R_i(eps)`` from the printed closed forms."""
    return _eval_matrix(adjoint_matrix_expr(i), {"eps": float(eps)})


def generator_matrix(i: int) -> np.ndarray:
    """``M_i[j, k] = c[i][j][k]``: the rows of ``X -> [D_i, X]``."""
    return structure_array()[i - 1]


def derived_adjoint_matrix(i: int, eps: float) -> np.ndarray:
    """``expm(-eps * M_i)`` from the derived structure constants."""
    from scipy.linalg import expm

    return expm(-float(eps) * generator_matrix(i))


def global_adjoint(eps: Sequence[float]) -> np.ndarray:
    """``R7 R6 R5 R4 R3 R2 R1`` evaluated at ``eps = (eps1, ..., eps7)``."""
    if len(eps) != N:
        raise ValueError("seven parameters expected")
    A = np.eye(N)
    for i in range(N, 0, -1):
        A = A @ adjoint_matrix(i, eps[i - 1])
    return A


# the printed global matrix, in the symbols e1..e7
GLOBAL_PRINTED = (
    ("1", "-e2*exp(e1)", "0", "(-e4*cos(e3) - e7*sin(e3))/2*exp(e1/2)", "e5/2*exp(-e1/2)",
     "(-e5*e2 - e6)/2*exp(e1/2)", "(e4*sin(e3) - e7*cos(e3))/2*exp(e1/2)"),
    ("0", "exp(e1)", "0", "0", "0", "e5*exp(e1/2)", "0"),
    ("0", "0", "1", "(-e7*cos(e3) + e4*sin(e3))*exp(e1/2)", "0", "0", "(e4*cos(e3) + e7*sin(e3))*exp(e1/2)"),
    ("0", "0", "0", "cos(e3)*exp(e1/2)", "0", "0", "-sin(e3)*exp(e1/2)"),
    ("0", "0", "0", "0", "exp(-e1/2)", "-e2*exp(e1/2)", "0"),
    ("0", "0", "0", "0", "0", "exp(e1/2)", "0"),
    ("0", "0", "0", "sin(e3)*exp(e1/2)", "0", "0", "cos(e3)*exp(e1/2)"),
)


def _eps_env(eps: Sequence[float]) -> dict:
    return {f"e{k}": float(v) for k, v in enumerate(eps, start=1)}


def printed_global_adjoint(eps: Sequence[float]) -> np.ndarray:
    return _eval_matrix([[parse(s) for s in row] for row in GLOBAL_PRINTED], _eps_env(eps))


def adjoint_transform(l: Sequence[float], eps: Sequence[float]) -> np.ndarray:
    """Closed-form ``l* = l @ A(eps)``.

    Agrees with the printed coefficient formulas except in ``l7*``, where the
    ``l4`` term enters as ``-l4 sin(eps3)``; the printed ``+l4 sin(eps3)`` is
    kept in :func:`printed_adjoint_transform` for the discrepancy report.
    """
    return _transform(l, eps, sign_l4_in_l7=-1.0)


def printed_adjoint_transform(l: Sequence[float], eps: Sequence[float]) -> np.ndarray:
    return _transform(l, eps, sign_l4_in_l7=+1.0)


def _transform(l, eps, sign_l4_in_l7: float) -> np.ndarray:
    l1, l2, l3, l4, l5, l6, l7 = (float(v) for v in l)
    e1, e2, e3, e4, e5, e6, e7 = (float(v) for v in eps)
    c, s = math.cos(e3), math.sin(e3)
    h = math.exp(e1 / 2)
    return np.array(
        [
            l1,
            (-l1 * e2 + l2) * math.exp(e1),
            l3,
            (-(e4 * c + e7 * s) * l1 / 2 + (-e7 * c + e4 * s) * l3 + l4 * c + l7 * s) * h,
            (l1 * e5 / 2 + l5) * math.exp(-e1 / 2),
            (-l1 / 2 * (e5 * e2 + e6) + l2 * e5 - l5 * e2 + l6) * h,
            (l1 / 2 * (e4 * s - e7 * c) + l3 * (e7 * s + e4 * c) + sign_l4_in_l7 * l4 * s + l7 * c) * h,
        ]
    )


# printed adjoint representation table: entry (i, j) is Ad(exp(eps D_i)) D_j
TABLE3 = {
    1: ("D1", "exp(eps)*D2", "D3", "exp(eps/2)*D4", "exp(-eps/2)*D5", "exp(eps/2)*D6", "exp(eps/2)*D7"),
    2: ("D1 - eps*D2", "D2", "D3", "D4", "D5 - eps*D6", "D6", "D7"),
    3: ("D1", "D2", "D3", "D4*cos(eps) - D7*sin(eps)", "D5", "D6", "D4*sin(eps) + D7*cos(eps)"),
    4: ("D1 - eps/2*D4", "D2", "D3 + eps*D7", "D4", "D5", "D6", "D7"),
    5: ("D1 + eps/2*D5", "D2 + eps*D6", "D3", "D4", "D5", "D6", "D7"),
    6: ("D1 - eps/2*D6", "D2", "D3", "D4", "D5", "D6", "D7"),
    7: ("D1 - eps/2*D7", "D2", "D3 - eps*D4", "D4", "D5", "D6", "D7"),
}

# printed table of transformed coefficients: entry (i, k) is l_k* under Ad(exp(eps D_i))
TABLE_COEFF = {
    1: ("l1", "exp(eps)*l2", "l3", "exp(eps/2)*l4", "exp(-eps/2)*l5", "exp(eps/2)*l6", "exp(eps/2)*l7"),
    2: ("l1", "l2 - eps*l1", "l3", "l4", "l5", "l6 - eps*l5", "l7"),
    3: ("l1", "l2", "l3", "l4*cos(eps) + l7*sin(eps)", "l5", "l6", "l7*cos(eps) - l4*sin(eps)"),
    4: ("l1", "l2", "l3", "l4 - eps*l1/2", "l5", "l6", "l7 + eps*l3"),
    5: ("l1", "l2", "l3", "l4", "l5 + eps*l1/2", "l6 + eps*l2", "l7"),
    6: ("l1", "l2", "l3", "l4", "l5", "l6 - eps*l1/2", "l7"),
    7: ("l1", "l2", "l3", "l4 - eps*l3", "l5", "l6", "l7 - eps*l1/2"),
}


def _linear_coeffs(text: str, prefix: str) -> tuple[Expr, ...]:
    e = parse(text)
    return tuple(simplify(partial_diff(e, f"{prefix}{k}")) for k in range(1, N + 1))


def compare_adjoint_table() -> TableComparison:
    """Each printed cell against the matching row of ``R_i``, structurally."""
    res = TableComparison(total=N * N)
    for i in range(1, N + 1):
        R = adjoint_matrix_expr(i)
        for j in range(1, N + 1):
            want = _linear_coeffs(TABLE3[i][j - 1], "D")
            got = tuple(simplify(v) for v in R[j - 1])
            if want != got:
                res.mismatches.append((i, j, TABLE3[i][j - 1], [str(g) for g in got]))
    return res


def compare_coefficient_table() -> TableComparison:
    """Each printed ``l_k*`` against column ``k`` of ``l @ R_i``, structurally."""
    res = TableComparison(total=N * N)
    for i in range(1, N + 1):
        R = adjoint_matrix_expr(i)
        for k in range(1, N + 1):
            want = _linear_coeffs(TABLE_COEFF[i][k - 1], "l")
            got = tuple(simplify(R[j][k - 1]) for j in range(N))
            if want != got:
                res.mismatches.append((i, k, TABLE_COEFF[i][k - 1], [str(g) for g in got]))
    return res


def _sgn(v: float) -> int:
    return (v > 0) - (v < 0)


@dataclass(frozen=True)
class Signature:
    """Values of the invariant functions K, M, N, O, P, Q, R, S, T, U."""

    K: float
    M: float
    N: float
    O: int
    P: int
    Q: int
    R: int
    S: int
    T: int
    U: int

    def as_tuple(self) -> tuple:
        return (self.K, self.M, self.N, self.O, self.P, self.Q, self.R, self.S, self.T, self.U)


SIGNATURE_FIELDS = ("K", "M", "N", "O", "P", "Q", "R", "S", "T", "U")


def invariant_signature(l: Sequence[float]) -> Signature:
    """Killing value, ``l1``, ``l3``, two indicators and five conditional signs (``sgn(0) = 0``)."""
    l1, l2, l3, l4, l5, l6, l7 = (float(v) for v in l)
    return Signature(
        K=killing_form(l),
        M=l1,
        N=l3,
        O=int(l1 * l1 + l2 * l2 + l3 * l3 != 0),
        P=int(l1 * l1 + l2 * l2 + l3 * l3 + l5 * l5 + l6 * l6 != 0),
        Q=_sgn(l4) if l1 == 0 and l3 == 0 and l7 == 0 else 0,
        R=_sgn(l2) if l1 == 0 else 0,
        S=_sgn(l5) if l1 == 0 else 0,
        T=_sgn(l6) if l1 == 0 and l2 == 0 and l5 == 0 else 0,
        U=_sgn(l7) if l1 == 0 and l3 == 0 and l4 == 0 else 0,
    )


# printed table of invariant values; ``d2..d7`` are the free coefficients of each row
TABLE4 = (
    ("X1,1,0,1", "D2 + D3 + D6", ("-2", "0", "1", "1", "1", "0", "1", "0", "0", "0")),
    ("X1,0,0,0", "D3", ("-2", "0", "1", "1", "1", "0", "0", "0", "0", "0")),
    ("X2", "D1", ("2", "1", "0", "1", "1", "0", "0", "0", "0", "0")),
    ("X3,0,d4,d5,d6,d7", "d4*D4 + d5*D5 + d6*D6 + d7*D7", ("0", "0", "0", "0", "1", "0", "0", "d5", "0", "0")),
    ("X3,d2,0,d5,d6,d7", "d2*D2 + d5*D5 + d6*D6 + d7*D7", ("0", "0", "0", "1", "1", "0", "d2", "d5", "0", "d7")),
    ("X3,0,d4,0,d6,d7", "d4*D4 + d6*D6 + d7*D7", ("0", "0", "0", "0", "1", "0", "0", "0", "d6", "0")),
    ("X3,d2,0,d5,d6,0", "d2*D2 + d5*D5 + d6*D6", ("0", "0", "0", "1", "1", "0", "d2", "d5", "0", "0")),
    ("X3,0,0,0,d6,d7", "d6*D6 + d7*D7", ("0", "0", "0", "0", "1", "0", "0", "0", "d6", "d7")),
    ("X4,1", "D1 + D3", ("0", "1", "1", "1", "1", "0", "0", "0", "0", "0")),
    ("X4,-1", "D1 - D3", ("0", "1", "-1", "1", "1", "0", "0", "0", "0", "0")),
)


def table4_row(row: tuple, d: dict[str, float]) -> tuple[np.ndarray, tuple]:
    """Instantiate a printed row with values for its free coefficients."""
    _, element, expected = row
    e = parse(element)
    l = np.array([evaluate(partial_diff(e, f"D{k}"), {}, d) for k in range(1, N + 1)])
    want = tuple(evaluate(parse(v), {}, d) for v in expected)
    return l, want
