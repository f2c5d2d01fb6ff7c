"""Generalized Kullback-Leibler divergence and its exact algebraic identities.

The divergence here is the one defined for arbitrary positive vectors (not
probability distributions):

    D(a || b) = sum_i ( b_i * log(b_i / a_i) - b_i + a_i )

It is non-negative and zero exactly when a == b.  The two ``*_identity_residual``
functions are first-class oracles: each returns the difference between the two
sides of an exact identity of D, so a correct implementation makes them vanish
up to rounding.
"""

import numpy as np

# Divergences in [-NEGATIVE_SLACK, 0) are treated as rounding noise and clamped.
NEGATIVE_SLACK = 1e-12


def _as_vector(v, name):
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a vector, got shape {arr.shape}")
    return arr


def gen_kl(a, b):
    """Generalized KL divergence D(a || b) of two vectors, in nats.

    ``a`` must be strictly positive; ``b`` may have zero entries, which
    contribute ``a_i`` each (the 0*log(0) = 0 convention).  Tiny negative
    results from cancellation are clamped to 0.
    """
    a = _as_vector(a, "a")
    b = _as_vector(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: len(a)={a.size}, len(b)={b.size}")
    if not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
        raise ValueError("inputs must be finite")
    if np.any(a <= 0):
        bad = int(np.argmax(a <= 0))
        raise ValueError(f"a[{bad}]={a[bad]} is not strictly positive")
    if np.any(b < 0):
        bad = int(np.argmax(b < 0))
        raise ValueError(f"b[{bad}]={b[bad]} is negative")
    pos = b > 0
    terms = np.array(a, copy=True)  # b_i = 0 terms contribute a_i
    terms[pos] = b[pos] * np.log(b[pos] / a[pos]) - b[pos] + a[pos]
    value = float(terms.sum())
    if value < 0.0:
        assert value > -NEGATIVE_SLACK, f"divergence {value} below rounding slack"
        value = 0.0
    return value


def system_divergence(system, x):
    """Total divergence D(lhs(x) || rhs) of a polynomial system at x.

    This is the objective the solver monotonically decreases.
    """
    lhs = system.evaluate_lhs(x)
    return gen_kl(lhs, system.rhs)


def scaling_identity_residual(a, b, t):
    """Residual of the scaling identity of D under a -> t*a.

    Returns D(t*a || b) - [ D(a || b) + (t - 1) * sum(a) - sum(b) * log(t) ],
    which is exactly zero in real arithmetic for positive inputs and t > 0.
    """
    a = _as_vector(a, "a")
    b = _as_vector(b, "b")
    t = float(t)
    if t <= 0:
        raise ValueError(f"t={t} must be positive")
    lhs = gen_kl(t * a, b)
    rhs = gen_kl(a, b) + (t - 1.0) * float(a.sum()) - float(b.sum()) * np.log(t)
    return lhs - rhs


def normalizing_identity_residual(a, b):
    """Residual of the sum-splitting identity of D.

    Returns D(a || b) - [ D(sum(a) || sum(b)) + D((sum(b)/sum(a)) * a || b) ],
    exactly zero in real arithmetic for positive inputs.
    """
    a = _as_vector(a, "a")
    b = _as_vector(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: len(a)={a.size}, len(b)={b.size}")
    sa = float(a.sum())
    sb = float(b.sum())
    lhs = gen_kl(a, b)
    rhs = gen_kl([sa], [sb]) + gen_kl((sb / sa) * a, b)
    return lhs - rhs
