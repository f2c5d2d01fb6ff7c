"""Pure-numpy solver kernels (fallback backend).

Implements the same nested iteration as the compiled core in ``_kernels``:
an outer mass-redistribution step computing per-monomial target weights,
and an inner loop of simultaneous multiplicative updates, one degree-structure
row at a time.  The compiled backend is an order of magnitude faster on the
small dense systems this solver targets; this module is selected when the
extension is unavailable (see ``klsolve.backend``).

All routines work on raw arrays so they stay importable without the rest of
the package.
"""

import numpy as np

BACKEND_NAME = "python"

STATUS_CRITICAL = 0
STATUS_BOUNDARY = 1
STATUS_MAXITER = 2

# Multiplicative iterates are clamped into [X_FLOOR, X_CAP] to keep logs and
# squares finite; X_FLOOR is the smallest normal double.  Normal runs never
# touch either bound: the boundary detector stops far earlier, and the cap is
# only reachable for systems lacking the bounding pure-power monomials.
X_FLOOR = np.finfo(np.float64).tiny
X_CAP = 1e154

# Absolute slack for the theoretical weak-decrease guarantee of the inner loop.
INNER_SLACK = 1e-10


def monomial_values(expon, x):
    """x**alpha for every exponent row, as exp of log-products."""
    return np.exp(expon @ np.log(x))


def lhs_and_divergence(coeffs, rhs, v0):
    """Equation left-hand sides and their total divergence from rhs.

    Tolerates zero left-hand sides (returns +inf divergence) so callers can
    report degenerate boundary states instead of crashing.
    """
    p = coeffs @ v0
    if np.any(p <= 0.0) or not np.all(np.isfinite(p)):
        return p, np.inf
    div = float(rhs @ np.log(rhs / p) - rhs.sum() + p.sum())
    if div < 0.0:
        div = 0.0 if div > -1e-12 else div
    return p, div


def weights(coeffs, rhs, v0):
    """Per-monomial target weights: each equation spreads its rhs mass over
    its monomials proportionally to their current values."""
    p = coeffs @ v0
    return v0 * (coeffs.T @ (rhs / p))


def row_update(expon, colsum, g_row, d_j, numer, x):
    """One simultaneous multiplicative update of x for one structure row.

    ``numer`` is the weight-side vector sum_alpha alpha_i * w_alpha (fixed
    during the inner loop).  Variables with g_row == 0, or untouched by any
    monomial, keep their value.
    """
    v = colsum * monomial_values(expon, x)
    den = expon.T @ v
    mask = (g_row > 0) & (den > 0)
    x = x.copy()
    x[mask] *= (numer[mask] / den[mask]) ** (g_row[mask] / d_j)
    np.clip(x, X_FLOOR, X_CAP, out=x)
    return x


def inner_objective(expon, colsum, w, logw, wsum, x):
    """sum_alpha D(colsum_alpha * x**alpha || w_alpha) with 0*log(0) = 0.

    ``logw`` must be log(w) where w > 0 (arbitrary elsewhere), ``wsum`` the
    plain sum of w.
    """
    v = colsum * monomial_values(expon, x)
    pos = w > 0
    with np.errstate(divide="ignore"):
        logv = np.log(v[pos])
    return float((w[pos] * (logw[pos] - logv)).sum() - wsum + v.sum())


def gradient_residual(expon, coeffs, rhs, x, v0, p):
    """Sup-norm of the divergence gradient; +inf if any lhs is degenerate."""
    if np.any(p <= 0.0) or not np.all(np.isfinite(p)):
        return np.inf
    t = coeffs.T @ (1.0 - rhs / p)
    grad = (expon.T @ (t * v0)) / x
    return float(np.max(np.abs(grad)))


def solve_loop(
    expon,
    coeffs,
    rhs,
    colsum,
    g,
    dvec,
    x0,
    inner_tol,
    outer_tol,
    grad_tol,
    boundary_eps,
    max_inner,
    max_outer,
    single_sweep,
):
    """Full nested iteration from x0.

    Returns (x, status, outer_iterations, total_inner_sweeps, trace,
    gradient_residual) where ``trace`` holds the divergence at x0 followed by
    the divergence after each outer iteration.
    """
    x = np.array(x0, dtype=np.float64)
    s = g.shape[0]
    trace = []
    inner_total = 0
    outer_iters = 0
    status = STATUS_MAXITER
    grad_res = -1.0
    prev_div = np.inf
    k = 0

    while True:
        v0 = monomial_values(expon, x)
        p, div = lhs_and_divergence(coeffs, rhs, v0)
        trace.append(div)
        if np.min(x) <= boundary_eps:
            status = STATUS_BOUNDARY
            break
        if not np.isfinite(div):
            status = STATUS_MAXITER
            break
        if k > 0 and prev_div - div < outer_tol:
            grad_res = gradient_residual(expon, coeffs, rhs, x, v0, p)
            if grad_res <= grad_tol:
                status = STATUS_CRITICAL
                break
        if k >= max_outer:
            status = STATUS_MAXITER
            break
        prev_div = div

        w = weights(coeffs, rhs, v0)
        numer = expon.T @ w
        pos = w > 0
        logw = np.zeros_like(w)
        logw[pos] = np.log(w[pos])
        wsum = float(w.sum())

        prev_obj = np.inf
        boundary_hit = False
        sweeps = 0
        while sweeps < max_inner:
            x_start = x
            for j in range(s):
                x = row_update(expon, colsum, g[j], dvec[j], numer, x)
                if np.min(x) <= boundary_eps:
                    boundary_hit = True
                    break
            sweeps += 1
            if boundary_hit:
                break
            obj = inner_objective(expon, colsum, w, logw, wsum, x)
            if obj > prev_obj + INNER_SLACK:
                raise RuntimeError(
                    f"inner objective increased from {prev_obj} to {obj}; "
                    "this indicates a precision failure"
                )
            prev_obj = obj
            if np.max(np.abs(x / x_start - 1.0)) < inner_tol:
                break
            if single_sweep:
                break
        inner_total += sweeps
        outer_iters = k + 1
        k += 1

    if grad_res < 0 or status != STATUS_CRITICAL:
        grad_res = gradient_residual(expon, coeffs, rhs, x, v0, p)
    return x, status, outer_iters, inner_total, np.asarray(trace), grad_res
