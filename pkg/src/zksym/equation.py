"""The Zakharov-Kuznetsov residual, shared by every module."""
from __future__ import annotations

from .jet_expr import ZK_SPACE, Expr, parse

ZK_TEXT = "u_t + a*u*u_x + u_xx + u_yy + u_zz"

#: ``Delta = u_t + a*u*u_x + u_xx + u_yy + u_zz`` with nonlinearity strength ``a``.
DELTA: Expr = parse(ZK_TEXT)

#: Right-hand side of ``u_t = -(a*u*u_x + u_xx + u_yy + u_zz)`` on solutions.
UT_ON_SHELL: Expr = parse("-(a*u*u_x + u_xx + u_yy + u_zz)")

BASE = ZK_SPACE.base
DEFAULT_A = 1.0
