# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled stack machine and Runge-Kutta loops.

Mirrors ``_vm_py`` operation by operation; see that module for the semantics.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport pow, exp, log, sin, cos, tan, tanh, cosh, atan, sqrt, fabs, isfinite, INFINITY, NAN

cnp.import_array()

cdef enum:
    OK = 0
    NONFINITE = 1
    SINGULAR = 2
    STEP_UNDERFLOW = 3
    MAX_STEPS = 4


cdef inline double _powi(double b, int n) nogil:
    if b == 0.0 and n < 0:
        return INFINITY
    return pow(b, <double>n)


cdef double _powq(double b, int num, int den) nogil:
    cdef double r
    if b < 0.0:
        if den % 2 == 0:
            return NAN
        r = _powq(-b, num, den)
        return -r if num % 2 else r
    if b == 0.0 and num < 0:
        return INFINITY
    return pow(b, <double>num / <double>den)


cdef inline double _func(int code, double v) nogil:
    if v != v:
        return v
    if code == 0:
        return exp(v)
    if code == 1:
        if v < 0.0:
            return NAN
        if v == 0.0:
            return -INFINITY
        return log(v)
    if code == 2:
        return sin(v) if isfinite(v) else NAN
    if code == 3:
        return cos(v) if isfinite(v) else NAN
    if code == 4:
        return tan(v) if isfinite(v) else NAN
    if code == 5:
        return tanh(v)
    if code == 6:
        return 1.0 / cosh(v)
    return atan(v)


cdef void _run(const int[:, ::1] ops, const double[::1] consts, double* x,
               const double[::1] params, double* out, double* stack) nogil:
    cdef Py_ssize_t i, k, n = ops.shape[0]
    cdef int op, a, b, sp = 0
    cdef double s
    for i in range(n):
        op = ops[i, 0]
        a = ops[i, 1]
        b = ops[i, 2]
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
            s = 1.0
            for k in range(sp - a, sp):
                s *= stack[k]
            sp -= a
            stack[sp] = s
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


def eval_batch(const int[:, ::1] ops, const double[::1] consts, X, const double[::1] params,
               int n_out, int max_stack):
    cdef double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t m = Xv.shape[0], i
    res = np.empty((m, n_out), dtype=np.float64)
    cdef double[:, ::1] rv = res
    cdef double[::1] stack = np.zeros(max_stack, dtype=np.float64)
    with nogil:
        for i in range(m):
            _run(ops, consts, &Xv[i, 0] if Xv.shape[1] > 0 else NULL, params, &rv[i, 0], &stack[0])
    return res


cdef inline int _rhs(const int[:, ::1] ops, const double[::1] consts, const double[::1] params,
                     double* out, double* stack, int check,
                     double l, double h, double hp, double* f) nogil:
    cdef double x[3]
    x[0] = l
    x[1] = h
    x[2] = hp
    out[0] = 0.0
    _run(ops, consts, x, params, out, stack)
    f[0] = out[0]
    if check and out[1] == 0.0:
        return SINGULAR
    if not isfinite(out[0]):
        return NONFINITE
    return OK


def rk4(const int[:, ::1] ops, const double[::1] consts, const double[::1] params,
        int n_out, int max_stack, double l0, double H0, double Hp0, double h, Py_ssize_t nsteps):
    traj = np.empty((nsteps + 1, 4), dtype=np.float64)
    cdef double[:, ::1] tv = traj
    cdef double[::1] stack = np.zeros(max_stack, dtype=np.float64)
    cdef double[::1] outv = np.zeros(n_out, dtype=np.float64)
    cdef int check = n_out > 1, st
    cdef double y0 = H0, y1 = Hp0, l = l0, f1 = 0.0, half = 0.5 * h
    cdef double k1y, k1p, k2y, k2p, k3y, k3p, k4y, k4p
    cdef Py_ssize_t n, done = 0
    with nogil:
        st = _rhs(ops, consts, params, &outv[0], &stack[0], check, l, y0, y1, &f1)
        tv[0, 0] = l
        tv[0, 1] = y0
        tv[0, 2] = y1
        tv[0, 3] = f1
        done = 1
        if st == OK:
            for n in range(nsteps):
                k1y = y1
                k1p = f1
                k2y = y1 + half * k1p
                st = _rhs(ops, consts, params, &outv[0], &stack[0], check,
                          l + half, y0 + half * k1y, y1 + half * k1p, &k2p)
                if st != OK:
                    break
                k3y = y1 + half * k2p
                st = _rhs(ops, consts, params, &outv[0], &stack[0], check,
                          l + half, y0 + half * k2y, y1 + half * k2p, &k3p)
                if st != OK:
                    break
                k4y = y1 + h * k3p
                st = _rhs(ops, consts, params, &outv[0], &stack[0], check,
                          l + h, y0 + h * k3y, y1 + h * k3p, &k4p)
                if st != OK:
                    break
                y0 = y0 + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
                y1 = y1 + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
                l = l0 + (n + 1) * h
                st = _rhs(ops, consts, params, &outv[0], &stack[0], check, l, y0, y1, &f1)
                tv[n + 1, 0] = l
                tv[n + 1, 1] = y0
                tv[n + 1, 2] = y1
                tv[n + 1, 3] = f1
                done = n + 2
                if st != OK:
                    break
    return traj[:done], st


cdef double[6] _C = [0.0, 0.25, 0.375, 12.0 / 13.0, 1.0, 0.5]
cdef double[6][5] _A = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
]
cdef double[6] _B5 = [16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0]
cdef double[6] _E = [
    16.0 / 135.0 - 25.0 / 216.0,
    0.0,
    6656.0 / 12825.0 - 1408.0 / 2565.0,
    28561.0 / 56430.0 - 2197.0 / 4104.0,
    -9.0 / 50.0 + 1.0 / 5.0,
    2.0 / 55.0,
]


def rkf45(const int[:, ::1] ops, const double[::1] consts, const double[::1] params,
          int n_out, int max_stack, double l0, double l1, double H0, double Hp0,
          double rtol, double atol, double h0, double hmin, double hmax, Py_ssize_t max_steps):
    cdef double[::1] stack = np.zeros(max_stack, dtype=np.float64)
    cdef double[::1] outv = np.zeros(n_out, dtype=np.float64)
    cdef int check = n_out > 1, st, s, j, last
    cdef double y0 = H0, y1 = Hp0, l = l0, f1 = 0.0, h
    cdef double ky[6]
    cdef double kp[6]
    cdef double sy, sp_, ty, tp, dy, dp, ey, ep, ny = 0.0, np_ = 0.0, sc0, sc1, e0, e1, err, fac
    cdef Py_ssize_t n_acc = 0, n_rej = 0, cap = 64, nrow = 0
    buf = np.empty((cap, 4), dtype=np.float64)
    cdef double[:, ::1] bv = buf
    st = _rhs(ops, consts, params, &outv[0], &stack[0], check, l, y0, y1, &f1)
    bv[0, 0] = l
    bv[0, 1] = y0
    bv[0, 2] = y1
    bv[0, 3] = f1
    nrow = 1
    if st != OK:
        return buf[:nrow].copy(), st, n_acc, n_rej
    h = h0 if h0 < hmax else hmax
    while l < l1:
        if n_acc + n_rej >= max_steps:
            return buf[:nrow].copy(), MAX_STEPS, n_acc, n_rej
        last = 0
        if l + h >= l1:
            h = l1 - l
            last = 1
        ky[0] = y1
        kp[0] = f1
        for s in range(1, 6):
            sy = 0.0
            sp_ = 0.0
            for j in range(s):
                sy += _A[s][j] * ky[j]
                sp_ += _A[s][j] * kp[j]
            ty = y0 + h * sy
            tp = y1 + h * sp_
            ky[s] = tp
            st = _rhs(ops, consts, params, &outv[0], &stack[0], check, l + _C[s] * h, ty, tp, &kp[s])
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
            sc0 = atol + rtol * (fabs(y0) if fabs(y0) > fabs(ny) else fabs(ny))
            sc1 = atol + rtol * (fabs(y1) if fabs(y1) > fabs(np_) else fabs(np_))
            e0 = h * ey / sc0
            e1 = h * ep / sc1
            err = sqrt(0.5 * (e0 * e0 + e1 * e1))
            if not isfinite(err):
                st = NONFINITE
        if st != OK:
            err = INFINITY
        if err <= 1.0:
            l = l1 if last else l + h
            y0 = ny
            y1 = np_
            st = _rhs(ops, consts, params, &outv[0], &stack[0], check, l, y0, y1, &f1)
            if nrow == cap:
                cap *= 2
                buf = np.resize(buf, (cap, 4))
                bv = buf
            bv[nrow, 0] = l
            bv[nrow, 1] = y0
            bv[nrow, 2] = y1
            bv[nrow, 3] = f1
            nrow += 1
            n_acc += 1
            if st != OK:
                return buf[:nrow].copy(), st, n_acc, n_rej
            if err == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * pow(err, -0.2)
                fac = 5.0 if fac > 5.0 else (0.2 if fac < 0.2 else fac)
        else:
            n_rej += 1
            if err == INFINITY:
                fac = 0.2
            else:
                fac = 0.9 * pow(err, -0.2)
                fac = 1.0 if fac > 1.0 else (0.2 if fac < 0.2 else fac)
        h = h * fac
        if h > hmax:
            h = hmax
        if h < hmin and l < l1:
            return buf[:nrow].copy(), STEP_UNDERFLOW, n_acc, n_rej
    return buf[:nrow].copy(), OK, n_acc, n_rej
