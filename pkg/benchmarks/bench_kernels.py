"""Compare the compiled and pure-Python kernels.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.  Prints one line
per kernel with the best wall time of each backend and the speedup.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from zksym import _kernels
from zksym import reduced_ode as ode
from zksym import solutions as sol
from zksym.equation import DELTA


def _cases():
    rec = sol.lookup("u7")
    prog = _kernels.compile_exprs([sol.substituted_residual(rec.expr, DELTA)], sol.BASE)
    X = np.random.default_rng(0).uniform(-2, 2, (20000, 4))
    P = prog.param_vector(rec.param_dict)
    p = ode.figure_problem("fig11")
    return {
        "eval_batch (20000 points)": lambda impl: _kernels.eval_program(prog, X, P, impl),
        "rk4 (fig11, h = 0.01)": lambda impl: ode.rk4_integrate(p, ode.IntegratorConfig(h=0.01), impl),
        "rkf45 (fig11, rtol = 1e-10)": lambda impl: ode.rkf45_integrate(
            p, ode.IntegratorConfig(method="rkf45", rtol=1e-10, atol=1e-10), impl),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    py, _ = _kernels.load_backend("python")
    try:
        cy, _ = _kernels.load_backend("compiled")
    except ImportError:
        print("compiled backend not built; only the Python timings are shown")
        cy = None
    print(f"{'kernel':32s} {'python [s]':>12s} {'compiled [s]':>13s} {'speedup':>8s}")
    for name, fn in _cases().items():
        tp = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat))
        if cy is None:
            print(f"{name:32s} {tp:12.4f}")
            continue
        tc = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat))
        print(f"{name:32s} {tp:12.4f} {tc:13.5f} {tp / tc:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
