"""Numeric kernels with a compiled backend and a pure-Python fallback.

The compiled extension is used when it imports; setting the environment
variable ``ZKSYM_BACKEND=python`` forces the fallback.  Both backends expose
``eval_batch``, ``rk4`` and ``rkf45`` with identical signatures and results.
"""
from __future__ import annotations

import os

from . import _vm_py
from .program import Program, compile_exprs

OK, NONFINITE, SINGULAR, STEP_UNDERFLOW, MAX_STEPS = range(5)
STATUS_NAMES = {
    OK: "ok",
    NONFINITE: "non-finite state",
    SINGULAR: "singular leading coefficient",
    STEP_UNDERFLOW: "step size underflow",
    MAX_STEPS: "step budget exhausted",
}


def load_backend(name: str | None = None):
    """Return ``(module, name)`` for the requested or best available backend."""
    choice = (name or os.environ.get("ZKSYM_BACKEND", "auto")).lower()
    if choice not in ("auto", "compiled", "python"):
        raise ValueError(f"unknown backend {choice!r}")
    if choice != "python":
        try:
            from . import _vm_cy

            return _vm_cy, "compiled"
        except ImportError:
            if choice == "compiled":
                raise
    return _vm_py, "python"


backend, BACKEND = load_backend()


def eval_program(prog: Program, X, params, impl=None):
    impl = impl or backend
    return impl.eval_batch(prog.ops, prog.consts, X, params, prog.n_out, prog.max_stack)


__all__ = [
    "BACKEND",
    "Program",
    "STATUS_NAMES",
    "backend",
    "compile_exprs",
    "eval_program",
    "load_backend",
]
