"""Symmetry, solution and conservation-law toolkit for the (3+1)-dimensional
Zakharov-Kuznetsov equation ``u_t + a*u*u_x + u_xx + u_yy + u_zz = 0``."""

__version__ = "0.1.0"
