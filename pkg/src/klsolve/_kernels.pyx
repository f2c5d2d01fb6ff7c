# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled solver core.

Same nested multiplicative-update iteration as ``_kernels_py``, written as
plain C loops over typed memoryviews.  The whole solve runs without the GIL,
so concurrent restarts scale across threads.  Semantics are kept in lockstep
with the python backend; only floating-point summation order differs.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, isfinite, log, pow, INFINITY

BACKEND_NAME = "cython"

STATUS_CRITICAL = 0
STATUS_BOUNDARY = 1
STATUS_MAXITER = 2

cdef int _CRITICAL = 0
cdef int _BOUNDARY = 1
cdef int _MAXITER = 2

cdef double X_FLOOR = 2.2250738585072014e-308  # smallest normal double
cdef double X_CAP = 1e154
cdef double INNER_SLACK = 1e-10


cdef void _monomial_values(const double[:, ::1] expon, double[::1] logx,
                           double[::1] x, double[::1] out) noexcept nogil:
    cdef Py_ssize_t S = expon.shape[0], n = expon.shape[1], a, i
    cdef double acc
    for i in range(n):
        logx[i] = log(x[i])
    for a in range(S):
        acc = 0.0
        for i in range(n):
            acc += expon[a, i] * logx[i]
        out[a] = exp(acc)


cdef double _gradient_residual(const double[:, ::1] expon, const double[:, ::1] coeffs,
                               const double[::1] rhs, double[::1] x,
                               double[::1] v0, double[::1] p,
                               double[::1] t) noexcept nogil:
    cdef Py_ssize_t S = expon.shape[0], n = expon.shape[1], l = coeffs.shape[0]
    cdef Py_ssize_t a, i, e
    cdef double acc, res = 0.0
    for e in range(l):
        if p[e] <= 0.0 or not isfinite(p[e]):
            return INFINITY
    for a in range(S):
        acc = 0.0
        for e in range(l):
            acc += coeffs[e, a] * (1.0 - rhs[e] / p[e])
        t[a] = acc * v0[a]
    for i in range(n):
        acc = 0.0
        for a in range(S):
            acc += expon[a, i] * t[a]
        acc = fabs(acc / x[i])
        if acc > res:
            res = acc
    return res


def solve_loop(const double[:, ::1] expon, const double[:, ::1] coeffs,
               const double[::1] rhs, const double[::1] colsum,
               const double[:, ::1] g, const double[::1] dvec,
               const double[::1] x0,
               double inner_tol, double outer_tol, double grad_tol,
               double boundary_eps, int max_inner, int max_outer,
               bint single_sweep):
    """Full nested iteration from x0; see the python backend for the contract."""
    cdef Py_ssize_t S = expon.shape[0], n = expon.shape[1]
    cdef Py_ssize_t l = coeffs.shape[0], s = g.shape[0]

    x_arr = np.array(x0, dtype=np.float64)
    trace_arr = np.empty(max_outer + 2, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef double[::1] trace = trace_arr
    cdef double[::1] logx = np.empty(n)
    cdef double[::1] v0 = np.empty(S)
    cdef double[::1] v = np.empty(S)
    cdef double[::1] p = np.empty(l)
    cdef double[::1] w = np.empty(S)
    cdef double[::1] logw = np.empty(S)
    cdef double[::1] t = np.empty(S)
    cdef double[::1] numer = np.empty(n)
    cdef double[::1] den = np.empty(n)
    cdef double[::1] x_start = np.empty(n)

    cdef int status = _MAXITER
    cdef int k = 0, outer_iters = 0, inner_total = 0, sweeps
    cdef bint boundary_hit, bad_objective = False
    cdef double prev_div = INFINITY, div, grad_res = -1.0
    cdef double wsum, prev_obj, obj, change, rel, acc, xmin, r
    cdef double bad_prev = 0.0, bad_obj = 0.0
    cdef Py_ssize_t a, i, e, j

    with nogil:
        while True:
            _monomial_values(expon, logx, x, v0)
            div = 0.0
            for e in range(l):
                acc = 0.0
                for a in range(S):
                    acc += coeffs[e, a] * v0[a]
                p[e] = acc
            for e in range(l):
                if p[e] <= 0.0 or not isfinite(p[e]):
                    div = INFINITY
                    break
                div += rhs[e] * log(rhs[e] / p[e]) - rhs[e] + p[e]
            if div < 0.0 and div > -1e-12:
                div = 0.0
            trace[k] = div

            xmin = x[0]
            for i in range(1, n):
                if x[i] < xmin:
                    xmin = x[i]
            if xmin <= boundary_eps:
                status = _BOUNDARY
                break
            if not isfinite(div):
                status = _MAXITER
                break
            if k > 0 and prev_div - div < outer_tol:
                grad_res = _gradient_residual(expon, coeffs, rhs, x, v0, p, t)
                if grad_res <= grad_tol:
                    status = _CRITICAL
                    break
            if k >= max_outer:
                status = _MAXITER
                break
            prev_div = div

            # mass redistribution: w_a = v0_a * sum_e coeffs[e,a] * rhs_e / p_e
            wsum = 0.0
            for a in range(S):
                acc = 0.0
                for e in range(l):
                    acc += coeffs[e, a] * (rhs[e] / p[e])
                w[a] = v0[a] * acc
                wsum += w[a]
                logw[a] = log(w[a]) if w[a] > 0.0 else 0.0
            for i in range(n):
                acc = 0.0
                for a in range(S):
                    acc += expon[a, i] * w[a]
                numer[i] = acc

            prev_obj = INFINITY
            boundary_hit = False
            sweeps = 0
            while sweeps < max_inner:
                for i in range(n):
                    x_start[i] = x[i]
                for j in range(s):
                    _monomial_values(expon, logx, x, v)
                    for a in range(S):
                        v[a] *= colsum[a]
                    xmin = INFINITY
                    for i in range(n):
                        acc = 0.0
                        for a in range(S):
                            acc += expon[a, i] * v[a]
                        den[i] = acc
                        if g[j, i] > 0.0 and den[i] > 0.0:
                            r = numer[i] / den[i]
                            x[i] *= pow(r, g[j, i] / dvec[j])
                            if x[i] < X_FLOOR:
                                x[i] = X_FLOOR
                            elif x[i] > X_CAP:
                                x[i] = X_CAP
                        if x[i] < xmin:
                            xmin = x[i]
                    if xmin <= boundary_eps:
                        boundary_hit = True
                        break
                sweeps += 1
                if boundary_hit:
                    break
                _monomial_values(expon, logx, x, v)
                obj = -wsum
                for a in range(S):
                    v[a] *= colsum[a]
                    obj += v[a]
                    if w[a] > 0.0:
                        obj += w[a] * (logw[a] - log(v[a]))
                if obj > prev_obj + INNER_SLACK:
                    bad_objective = True
                    bad_prev = prev_obj
                    bad_obj = obj
                    break
                prev_obj = obj
                change = 0.0
                for i in range(n):
                    rel = fabs(x[i] / x_start[i] - 1.0)
                    if rel > change:
                        change = rel
                if change < inner_tol:
                    break
                if single_sweep:
                    break
            inner_total += sweeps
            outer_iters = k + 1
            k += 1
            if bad_objective:
                break

        if not bad_objective and (grad_res < 0.0 or status != _CRITICAL):
            grad_res = _gradient_residual(expon, coeffs, rhs, x, v0, p, t)

    if bad_objective:
        raise RuntimeError(
            f"inner objective increased from {bad_prev} to {bad_obj}; "
            "this indicates a precision failure"
        )
    return x_arr, status, outer_iters, inner_total, trace_arr[: k + 1].copy(), grad_res
