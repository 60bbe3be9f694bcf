"""Pure-Python stack machine; the reference for the compiled kernel.

Every arithmetic step is carried out in the same order as in ``_vm_cy.pyx``
with the C library functions exposed by :mod:`math`, so both backends return
bit-identical results.  Domain violations produce ``nan`` or ``inf`` instead
of raising.
"""
from __future__ import annotations

import math

import numpy as np

OK, NONFINITE, SINGULAR, STEP_UNDERFLOW, MAX_STEPS = range(5)

_NAN = math.nan
_INF = math.inf


def _powi(b: float, n: int) -> float:
    if b == 0.0 and n < 0:
        return _INF
    try:
        return math.pow(b, n)
    except OverflowError:
        return -_INF if (b < 0.0 and n % 2) else _INF


def _powq(b: float, num: int, den: int) -> float:
    if b < 0.0:
        if den % 2 == 0:
            return _NAN
        r = _powq(-b, num, den)
        return -r if num % 2 else r
    if b == 0.0 and num < 0:
        return _INF
    try:
        return math.pow(b, num / den)
    except OverflowError:
        return _INF


def _func(code: int, v: float) -> float:
    if v != v:
        return v
    if code == 0:
        try:
            return math.exp(v)
        except OverflowError:
            return _INF
    if code == 1:
        if v < 0.0:
            return _NAN
        if v == 0.0:
            return -_INF
        return math.log(v)
    if code == 2:
        return math.sin(v) if math.isfinite(v) else _NAN
    if code == 3:
        return math.cos(v) if math.isfinite(v) else _NAN
    if code == 4:
        return math.tan(v) if math.isfinite(v) else _NAN
    if code == 5:
        return math.tanh(v)
    if code == 6:
        try:
            return 1.0 / math.cosh(v)
        except OverflowError:
            return 0.0
    return math.atan(v)


def _run(ops, consts, x, params, out, stack) -> None:
    sp = 0
    for op, a, b in ops:
        if op == 0:
            stack[sp] = consts[a]
            sp += 1
        elif op == 1:
            stack[sp] = x[a]
            sp += 1
        elif op == 2:
            stack[sp] = params[a]
            sp += 1
        elif op == 3:
            s = 0.0
            for k in range(sp - a, sp):
                s += stack[k]
            sp -= a
            stack[sp] = s
            sp += 1
        elif op == 4:
            p = 1.0
            for k in range(sp - a, sp):
                p *= stack[k]
            sp -= a
            stack[sp] = p
            sp += 1
        elif op == 5:
            stack[sp - 1] = _powi(stack[sp - 1], a)
        elif op == 6:
            stack[sp - 1] = _powq(stack[sp - 1], a, b)
        elif op == 7:
            stack[sp - 1] = _func(a, stack[sp - 1])
        else:
            sp -= 1
            out[a] = stack[sp]


def _prep(ops, consts, params, max_stack):
    return (
        [tuple(int(v) for v in row) for row in np.asarray(ops)],
        [float(c) for c in consts],
        [float(p) for p in params],
        [0.0] * max_stack,
    )


def eval_batch(ops, consts, X, params, n_out: int, max_stack: int) -> np.ndarray:
    ops_l, consts_l, params_l, stack = _prep(ops, consts, params, max_stack)
    X = np.asarray(X, dtype=np.float64)
    res = np.empty((X.shape[0], n_out), dtype=np.float64)
    out = [0.0] * n_out
    for i in range(X.shape[0]):
        _run(ops_l, consts_l, X[i].tolist(), params_l, out, stack)
        res[i, :] = out
    return res


class _Rhs:
    """``f(l, H, H')`` with an optional leading-coefficient check in output 1."""

    def __init__(self, ops, consts, params, n_out, max_stack):
        self.ops, self.consts, self.params, self.stack = _prep(ops, consts, params, max_stack)
        self.out = [0.0] * n_out
        self.check = n_out > 1

    def __call__(self, l: float, h: float, hp: float) -> tuple[float, int]:
        self.out[0] = 0.0
        _run(self.ops, self.consts, [l, h, hp], self.params, self.out, self.stack)
        if self.check and self.out[1] == 0.0:
            return self.out[0], SINGULAR
        f = self.out[0]
        if not math.isfinite(f):
            return f, NONFINITE
        return f, OK


def rk4(ops, consts, params, n_out, max_stack, l0, H0, Hp0, h, nsteps):
    """Classical RK4 on ``H' = P, P' = f``; rows of the result are ``(l, H, P, f)``."""
    rhs = _Rhs(ops, consts, params, n_out, max_stack)
    traj = np.empty((nsteps + 1, 4), dtype=np.float64)
    y0, y1 = float(H0), float(Hp0)
    l = float(l0)
    f1, st = rhs(l, y0, y1)
    traj[0] = (l, y0, y1, f1)
    if st != OK:
        return traj[:1], st
    half = 0.5 * h
    for n in range(nsteps):
        # stage 1 is the stored f at the current node
        k1y, k1p = y1, f1
        k2y = y1 + half * k1p
        k2p, st = rhs(l + half, y0 + half * k1y, y1 + half * k1p)
        if st != OK:
            return traj[: n + 1], st
        k3y = y1 + half * k2p
        k3p, st = rhs(l + half, y0 + half * k2y, y1 + half * k2p)
        if st != OK:
            return traj[: n + 1], st
        k4y = y1 + h * k3p
        k4p, st = rhs(l + h, y0 + h * k3y, y1 + h * k3p)
        if st != OK:
            return traj[: n + 1], st
        y0 = y0 + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        y1 = y1 + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        l = l0 + (n + 1) * h
        f1, st = rhs(l, y0, y1)
        traj[n + 1] = (l, y0, y1, f1)
        if st != OK:
            return traj[: n + 2], st
    return traj, OK


# Fehlberg 4(5) tableau
_C = (0.0, 0.25, 0.375, 12.0 / 13.0, 1.0, 0.5)
_A = (
    (),
    (0.25,),
    (3.0 / 32.0, 9.0 / 32.0),
    (1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0),
    (439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0),
    (-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0),
)
_B5 = (16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0)
# difference between the fifth- and fourth-order weights
_E = (
    16.0 / 135.0 - 25.0 / 216.0,
    0.0,
    6656.0 / 12825.0 - 1408.0 / 2565.0,
    28561.0 / 56430.0 - 2197.0 / 4104.0,
    -9.0 / 50.0 + 1.0 / 5.0,
    2.0 / 55.0,
)


def rkf45(ops, consts, params, n_out, max_stack, l0, l1, H0, Hp0, rtol, atol, h0, hmin, hmax, max_steps):
    """Adaptive Fehlberg 4(5) with local extrapolation.

    Returns ``(traj, status, n_accept, n_reject)`` where ``traj`` rows are
    ``(l, H, P, f)`` at the accepted nodes.
    """
    rhs = _Rhs(ops, consts, params, n_out, max_stack)
    rows = []
    y0, y1 = float(H0), float(Hp0)
    l = float(l0)
    f1, st = rhs(l, y0, y1)
    rows.append((l, y0, y1, f1))
    n_acc = n_rej = 0
    if st != OK:
        return np.array(rows), st, n_acc, n_rej
    h = min(h0, hmax)
    ky = [0.0] * 6
    kp = [0.0] * 6
    while l < l1:
        if n_acc + n_rej >= max_steps:
            return np.array(rows), MAX_STEPS, n_acc, n_rej
        last = False
        if l + h >= l1:
            h = l1 - l
            last = True
        ky[0], kp[0] = y1, f1
        for s in range(1, 6):
            sy = 0.0
            sp_ = 0.0
            for j in range(s):
                sy += _A[s][j] * ky[j]
                sp_ += _A[s][j] * kp[j]
            ty = y0 + h * sy
            tp = y1 + h * sp_
            ky[s] = tp
            kp[s], st = rhs(l + _C[s] * h, ty, tp)
            if st != OK:
                break
        if st == OK:
            dy = 0.0
            dp = 0.0
            ey = 0.0
            ep = 0.0
            for s in range(6):
                dy += _B5[s] * ky[s]
                dp += _B5[s] * kp[s]
                ey += _E[s] * ky[s]
                ep += _E[s] * kp[s]
            ny = y0 + h * dy
            np_ = y1 + h * dp
            sc0 = atol + rtol * max(abs(y0), abs(ny))
            sc1 = atol + rtol * max(abs(y1), abs(np_))
            e0 = h * ey / sc0
            e1 = h * ep / sc1
            err = math.sqrt(0.5 * (e0 * e0 + e1 * e1))
            if not math.isfinite(err):
                st = NONFINITE
        if st != OK:
            # a failed stage evaluation is treated as a rejection
            err = _INF
        if err <= 1.0:
            l = l1 if last else l + h
            y0, y1 = ny, np_
            f1, st = rhs(l, y0, y1)
            rows.append((l, y0, y1, f1))
            n_acc += 1
            if st != OK:
                return np.array(rows), st, n_acc, n_rej
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * math.pow(err, -0.2)))
        else:
            n_rej += 1
            fac = 0.2 if err == _INF else min(1.0, max(0.2, 0.9 * math.pow(err, -0.2)))
        h = min(hmax, h * fac)
        if h < hmin and l < l1:
            return np.array(rows), STEP_UNDERFLOW, n_acc, n_rej
    return np.array(rows), OK, n_acc, n_rej
