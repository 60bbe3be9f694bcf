import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from zksym import lie_algebra as la
from zksym.jet_expr import parse

SX = sp.symbols("x y z t u")
A_SYM = sp.Symbol("a")
floats = st.floats(-2, 2, allow_nan=False)
elements = arrays(np.float64, 7, elements=floats)
eps_vectors = arrays(np.float64, 7, elements=st.floats(-1, 1, allow_nan=False))


def _sym_field(i):
    return [sp.sympify(c, locals={"a": A_SYM}) for c in la.GENERATOR_TEXT[i]]


def _sym_bracket(A, B):
    def act(V, f):
        return sum(v * sp.diff(f, s) for v, s in zip(V, SX))

    return [sp.simplify(act(A, b) - act(B, a)) for a, b in zip(A, B)]


@pytest.mark.parametrize("i", range(1, 8))
@pytest.mark.parametrize("j", range(1, 8))
def test_commutator_matches_sympy_oracle(i, j):
    got = la.basis_vector(la.TABLE2[i][j - 1])
    want = _sym_bracket(_sym_field(i), _sym_field(j))
    combo = [sum(sp.Rational(c.numerator, c.denominator) * comp for c, comp in zip(got, comps))
             for comps in zip(*[_sym_field(k) for k in range(1, 8)])]
    assert all(sp.simplify(w - c) == 0 for w, c in zip(want, combo))


def test_structure_constants_match_table():
    cmp = la.compare_commutator_table()
    assert cmp.total == 49 and cmp.ok, cmp.mismatches


def test_jacobi_and_antisymmetry():
    assert la.jacobi_defects() == []
    assert la.antisymmetry_defects() == []


@pytest.mark.parametrize(
    "text, coeffs",
    [("-D4/2", (0, 0, 0, Fraction(-1, 2), 0, 0, 0)), ("0", (0,) * 7), ("D2 + 3*D7", (0, 1, 0, 0, 0, 0, 3))],
)
def test_basis_vector(text, coeffs):
    assert la.basis_vector(text) == tuple(Fraction(c) for c in coeffs)


def test_basis_vector_rejects_nonlinear():
    with pytest.raises(ValueError):
        la.basis_vector("D1*D2")


def test_express_in_basis_rejects_foreign_field():
    with pytest.raises(la.BasisError):
        la.express_in_basis(la.VectorField.from_strings(("u", "0", "0", "0", "0")))


def test_vector_field_rejects_jet_coordinates():
    with pytest.raises(ValueError):
        la.VectorField.from_strings(("u_x", "0", "0", "0", "0"))


@pytest.mark.parametrize("i", [0, 8])
def test_generator_index(i):
    with pytest.raises(ValueError):
        la.generator(i)


@given(elements)
def test_killing_form_closed_form(l):
    assert la.killing_form(l) == pytest.approx(la.killing_closed_form(l), abs=1e-12)


@given(elements, eps_vectors)
def test_killing_form_ad_invariant(l, eps):
    lt = la.adjoint_transform(l, eps)
    assert la.killing_form(lt) == pytest.approx(la.killing_form(l), abs=1e-10)


@given(elements, eps_vectors)
def test_global_adjoint_equals_transform(l, eps):
    assert np.allclose(l @ la.global_adjoint(eps), la.adjoint_transform(l, eps), atol=1e-12, rtol=0)


@given(eps_vectors)
def test_printed_global_matrix(eps):
    assert np.allclose(la.global_adjoint(eps), la.printed_global_adjoint(eps), atol=1e-12, rtol=0)


@given(elements, eps_vectors)
def test_l1_l3_invariant(l, eps):
    lt = la.adjoint_transform(l, eps)
    assert lt[0] == pytest.approx(l[0], abs=1e-12)
    assert lt[2] == pytest.approx(l[2], abs=1e-12)


@pytest.mark.parametrize("i", range(1, 8))
@given(e=st.floats(-2, 2, allow_nan=False))
def test_adjoint_inverse(i, e):
    assert np.allclose(la.adjoint_matrix(i, e) @ la.adjoint_matrix(i, -e), np.eye(7), atol=1e-12)


@pytest.mark.parametrize("i", range(1, 8))
@pytest.mark.parametrize("e", [-1.0, 0.3, 1.7])
def test_adjoint_equals_matrix_exponential(i, e):
    assert np.allclose(la.adjoint_matrix(i, e), la.derived_adjoint_matrix(i, e), atol=1e-12)


@pytest.mark.parametrize("i", range(1, 8))
def test_series_consistency(i):
    # d/d eps R_i at 0 equals -M_i
    h = 1e-6
    d = (la.adjoint_matrix(i, h) - la.adjoint_matrix(i, -h)) / (2 * h)
    assert np.allclose(d, -la.generator_matrix(i), atol=1e-8)


@given(elements)
def test_translation_adjoints_compose(l):
    for i in (2, 4, 6, 7):
        a = la.adjoint_matrix(i, 0.3) @ la.adjoint_matrix(i, 0.4)
        assert np.allclose(a, la.adjoint_matrix(i, 0.7), atol=1e-14)


def test_adjoint_tables():
    assert la.compare_adjoint_table().ok
    assert la.compare_coefficient_table().ok


def test_printed_l7_sign_differs():
    l = np.array([0, 0, 0, 1.0, 0, 0, 0])
    eps = np.array([0, 0, 0.5, 0, 0, 0, 0])
    good = la.adjoint_transform(l, eps)
    bad = la.printed_adjoint_transform(l, eps)
    assert good[6] == pytest.approx(-math.sin(0.5))
    assert bad[6] == pytest.approx(math.sin(0.5))
    assert np.allclose(l @ la.global_adjoint(eps), good)


@given(elements)
def test_printed_ad_is_negative_ad(l):
    assert np.allclose(la.printed_ad_matrix(l), -la.ad_matrix(l), atol=1e-14)


@pytest.mark.parametrize("row", la.TABLE4, ids=[r[0] for r in la.TABLE4])
@pytest.mark.parametrize("sign", [1.0, -1.0])
def test_table4_rows(row, sign):
    d = {f"d{k}": sign for k in (2, 4, 5, 6, 7)}
    l, want = la.table4_row(row, d)
    assert la.invariant_signature(l).as_tuple() == pytest.approx(want, abs=0)


@given(elements, st.floats(0.1, 3))
def test_signature_scaling(l, k):
    # K scales quadratically, M and N linearly, indicators are unchanged
    s1 = la.invariant_signature(l)
    s2 = la.invariant_signature(k * l)
    assert s2.K == pytest.approx(k * k * s1.K, abs=1e-9)
    assert s2.M == pytest.approx(k * s1.M)
    assert s2.as_tuple()[3:] == s1.as_tuple()[3:]


def test_general_field_combination():
    V = la.general_field()
    assert V.xi_t == parse("c1*t + c2")
    assert V.xi_u == parse("-c1*u/2 + c5/a")
