"""Symbolic expressions over the jet space of ``u(x, y, z, t)``."""
from .calculus import free_names, gradient, jet_order, partial_diff, total_derivative, total_derivative_multi
from .evaluate import DomainError, JetPoint, UnboundSymbolError, derivative_table, evaluate, solution_jet
from .expr import (
    FUNCTIONS,
    MINUS_ONE,
    ONE,
    ZERO,
    Add,
    Const,
    Coord,
    Expr,
    Func,
    Mul,
    Param,
    Pow,
    add,
    as_expr,
    count_nodes,
    expand,
    func,
    is_zero,
    mul,
    neg,
    normalize,
    power,
    simplify,
    substitute,
    symbols,
)
from .parse import ParseError, parse, to_string
from .poly import NotPolynomialError, laurent_coeffs
from .space import ZK_SPACE, JetCoord, JetOrderError, JetSpace

__all__ = [name for name in dir() if not name.startswith("_")]
