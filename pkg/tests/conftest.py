import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from zksym.jet_expr import Const, Coord, Param, add, func, mul, power

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def expressions(names=("x", "y", "t", "u", "u_x"), params=("a",), funcs=("sin", "cos", "exp", "tanh"), depth=3):
    """Random expressions built through the smart constructors, so already normalized."""
    consts = st.fractions(min_value=-3, max_value=3, max_denominator=4).map(Const)
    leaves = st.one_of(
        consts,
        st.sampled_from(names).map(Coord),
        st.sampled_from(params).map(Param),
    )

    def extend(children):
        return st.one_of(
            st.lists(children, min_size=2, max_size=3).map(lambda xs: add(*xs)),
            st.lists(children, min_size=2, max_size=3).map(lambda xs: mul(*xs)),
            st.tuples(children, st.integers(1, 3)).map(lambda p: power(p[0], p[1])),
            st.tuples(st.sampled_from(funcs), children).map(lambda p: func(p[0], p[1])),
        )

    return st.recursive(leaves, extend, max_leaves=6 if depth >= 3 else 3)


@pytest.fixture
def tmp_out(tmp_path):
    return tmp_path / "out"


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[key])
