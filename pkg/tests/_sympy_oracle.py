"""Translate jet expressions into sympy through the printed form."""
import sympy as sp

from zksym.jet_expr import to_string

_LOCALS = {"ln": sp.log, "sech": sp.sech, "arctan": sp.atan, "tanh": sp.tanh}


def to_sympy(e):
    return sp.sympify(to_string(e).replace("^", "**"), locals=_LOCALS)
