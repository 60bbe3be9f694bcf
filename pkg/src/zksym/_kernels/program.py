"""Compile expressions into postfix programs for the numeric kernels.

A program is an ``int32`` array of shape ``(n, 3)`` holding ``(opcode, a, b)``
triples plus a ``float64`` constant pool.  It is run on a value stack; every
``STORE`` pops the top of the stack into one output slot, so a single program
evaluates several expressions that share the same inputs.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..jet_expr.expr import Add, Const, Coord, Expr, Func, Mul, Param, Pow

OP_CONST, OP_VAR, OP_PARAM, OP_ADD, OP_MUL, OP_POWI, OP_POWQ, OP_FUNC, OP_STORE = range(9)

FUNC_CODES = {"exp": 0, "ln": 1, "sin": 2, "cos": 3, "tan": 4, "tanh": 5, "sech": 6, "arctan": 7}


@dataclass(frozen=True)
class Program:
    ops: np.ndarray
    consts: np.ndarray
    variables: tuple[str, ...]
    params: tuple[str, ...]
    n_out: int
    max_stack: int

    def param_vector(self, values: dict) -> np.ndarray:
        missing = [p for p in self.params if p not in values]
        if missing:
            from ..jet_expr.evaluate import UnboundSymbolError

            raise UnboundSymbolError(missing[0])
        return np.array([float(values[p]) for p in self.params], dtype=np.float64)

    def input_matrix(self, points: Sequence[dict]) -> np.ndarray:
        from ..jet_expr.evaluate import UnboundSymbolError

        X = np.empty((len(points), len(self.variables)), dtype=np.float64)
        for i, pt in enumerate(points):
            for j, v in enumerate(self.variables):
                try:
                    X[i, j] = pt[v]
                except KeyError:
                    raise UnboundSymbolError(v) from None
        return X


def compile_exprs(
    exprs: Sequence[Expr],
    variables: Sequence[str],
    params: Sequence[str] | None = None,
) -> Program:
    """Compile ``exprs`` with coordinates read from ``variables`` (column order).

    Symbols that are not in ``variables`` become parameters; pass ``params`` to
    fix their order.
    """
    var_index = {v: i for i, v in enumerate(variables)}
    param_list = list(params) if params is not None else []
    param_index = {p: i for i, p in enumerate(param_list)}
    consts: list[float] = []
    const_index: dict[float, int] = {}
    ops: list[tuple[int, int, int]] = []
    depth = 0
    max_depth = 0

    def push(op):
        nonlocal depth, max_depth
        ops.append(op)
        code = op[0]
        if code in (OP_CONST, OP_VAR, OP_PARAM):
            depth += 1
        elif code in (OP_ADD, OP_MUL):
            depth -= op[1] - 1
        elif code == OP_STORE:
            depth -= 1
        max_depth = max(max_depth, depth)

    def symbol(name: str):
        if name in var_index:
            push((OP_VAR, var_index[name], 0))
            return
        if name not in param_index:
            if params is not None:
                raise KeyError(f"symbol {name!r} is neither a variable nor a declared parameter")
            param_index[name] = len(param_list)
            param_list.append(name)
        push((OP_PARAM, param_index[name], 0))

    def emit(e: Expr):
        if isinstance(e, Const):
            v = float(e.value)
            k = const_index.get(v)
            if k is None:
                k = const_index[v] = len(consts)
                consts.append(v)
            push((OP_CONST, k, 0))
        elif isinstance(e, (Coord, Param)):
            symbol(e.name)
        elif isinstance(e, Add):
            for t in e.terms:
                emit(t)
            push((OP_ADD, len(e.terms), 0))
        elif isinstance(e, Mul):
            for f in e.factors:
                emit(f)
            push((OP_MUL, len(e.factors), 0))
        elif isinstance(e, Pow):
            emit(e.base)
            if e.exp.denominator == 1:
                push((OP_POWI, int(e.exp), 0))
            else:
                push((OP_POWQ, e.exp.numerator, e.exp.denominator))
        elif isinstance(e, Func):
            emit(e.arg)
            push((OP_FUNC, FUNC_CODES[e.name], 0))
        else:
            raise TypeError(type(e))

    for k, e in enumerate(exprs):
        emit(e)
        push((OP_STORE, k, 0))
    arr = np.array(ops, dtype=np.int32).reshape(-1, 3)
    return Program(
        ops=np.ascontiguousarray(arr),
        consts=np.array(consts, dtype=np.float64),
        variables=tuple(variables),
        params=tuple(param_list),
        n_out=len(exprs),
        max_stack=max(max_depth, 1),
    )
