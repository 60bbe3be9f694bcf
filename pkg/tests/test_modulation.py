import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zksym import modulation as mi

nonneg = st.floats(0, 10, allow_nan=False)


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
def test_sweep_gain_and_residual(p):
    rows = mi.sweep([p], (0.0, 4.0), 401)
    assert len(rows) == 401
    for r in rows:
        if r.A >= p:
            assert r.gain == 0.0 and r.stable
        else:
            assert r.gain == pytest.approx(2 * math.sqrt(p * p - r.A * r.A), abs=1e-12)
            assert not r.stable
        assert mi.complex_residual(r.w, r.A, p) < 1e-12


@given(A=nonneg, p=nonneg)
def test_w_squared_identity(A, p):
    w = mi._dispersion(A, p)
    assert mi.complex_residual(w, A, p) <= 1e-12 * max(1.0, A * A, p * p)
    assert w.imag >= 0


@given(A=nonneg, p=nonneg)
def test_principal_branch_matches_cmath(A, p):
    w = mi._dispersion(A, p)
    ref = mi.principal_sqrt(complex(A * A - p * p))
    assert abs(w - ref) <= 1e-12 * max(1.0, abs(ref))


@given(A=nonneg, b=st.floats(-5, 5), c=st.floats(-5, 5), d=st.floats(-5, 5), angle=st.floats(0, 2 * math.pi))
def test_gain_depends_on_p_only(A, b, c, d, angle):
    # rotating (b, c) keeps p, so the gain is unchanged
    m1 = mi.ModulationParams(A, b, c, d)
    m2 = mi.ModulationParams(A, b * math.cos(angle) - c * math.sin(angle), b * math.sin(angle) + c * math.cos(angle), d)
    assert mi.gain(m1) == pytest.approx(mi.gain(m2), rel=1e-9, abs=1e-9)


def test_boundary_is_exact():
    assert mi._dispersion(2.0, 2.0) == 0j


@pytest.mark.parametrize("A", [-1.0])
def test_negative_sensitivity_rejected(A):
    with pytest.raises(ValueError):
        mi.ModulationParams(A)


def test_sweep_validation():
    with pytest.raises(ValueError):
        mi.sweep([], (0, 1), 10)
    with pytest.raises(ValueError):
        mi.sweep([1.0], (0, 1), 1)


def test_sweep_endpoints_exact():
    rows = mi.sweep([3.0, 1.0], (0.0, 4.0), 401)
    assert rows[0].p == 1.0 and rows[0].A == 0.0 and rows[400].A == 4.0


@pytest.mark.parametrize("fig, cond", [("fig8a", lambda r: r.A >= r.p), ("fig8b", lambda r: r.A < r.p), ("fig9", lambda r: True)])
def test_figure_rows(fig, cond):
    rows = mi.figure_rows(fig)
    assert rows and all(cond(r) for r in rows)
    assert {r.p for r in rows} == {1.0, 2.0, 3.0}


def test_unknown_figure():
    with pytest.raises(KeyError):
        mi.figure_rows("fig10")


def test_as_tuple_columns():
    r = mi.sweep([2.0], (0, 4), 3)[0]
    assert len(r.as_tuple()) == len(mi.SPECTRUM_COLUMNS)
    assert r.as_tuple()[4] == -r.as_tuple()[3]
