"""Shared generators for the test suite.

Everything is driven by an explicit numpy Generator so each test controls
its own seed and the suite stays deterministic.
"""

import numpy as np

from klsolve import PolynomialSystem


def homogeneous_monomials(rng, n, degree, count):
    """Distinct exponent rows of total degree ``degree``, covering all variables."""
    rows = set()
    for _ in range(40 * count):
        cuts = np.sort(rng.integers(0, degree + 1, size=n - 1)) if n > 1 else np.array([], dtype=int)
        parts = np.diff(np.concatenate([[0], cuts, [degree]]))
        rows.add(tuple(int(v) for v in parts))
        if len(rows) >= count:
            break
    mono = np.array(sorted(rows), dtype=np.float64)
    covered = np.any(mono > 0, axis=0)
    extra = [degree * np.eye(n)[i] for i in np.flatnonzero(~covered)]
    if extra:
        mono = np.vstack([mono] + extra)
    return mono


def multilinear_monomials(rng, n, count):
    """Distinct 0/1 exponent rows, none empty, covering all variables."""
    rows = set()
    for _ in range(40 * count):
        row = (rng.random(n) < rng.uniform(0.2, 0.7)).astype(np.float64)
        if row.sum() == 0:
            row[rng.integers(0, n)] = 1.0
        rows.add(tuple(row))
        if len(rows) >= count:
            break
    mono = np.array(sorted(rows), dtype=np.float64)
    covered = np.any(mono > 0, axis=0)
    extra = [np.eye(n)[i] for i in np.flatnonzero(~covered)]
    if extra:
        mono = np.vstack([mono] + extra)
    return mono


def covering_coefficients(rng, n_equations, n_monomials):
    """Sparse non-negative matrix with every row and column touched."""
    coef = np.where(
        rng.random((n_equations, n_monomials)) < 0.4,
        rng.uniform(0.2, 2.0, (n_equations, n_monomials)),
        0.0,
    )
    for k in range(max(n_equations, n_monomials)):
        coef[k % n_equations, k % n_monomials] = rng.uniform(0.2, 2.0)
    return coef


def random_system(rng, n, monomials, n_equations=None, solvable=True):
    """Random positive system on the given monomials.

    Solvable systems take their rhs from a sampled interior point, so an
    exact positive solution exists; otherwise the rhs is random and the
    system is typically inconsistent.
    """
    s = monomials.shape[0]
    n_eq = n_equations if n_equations is not None else s
    coef = covering_coefficients(rng, n_eq, s)
    names = tuple(f"x{i + 1}" for i in range(n))
    if solvable:
        x_star = rng.uniform(0.5, 1.5, n)
        draft = PolynomialSystem(names, monomials, coef, np.ones(n_eq))
        rhs = draft.evaluate_lhs(x_star)
        return PolynomialSystem(names, draft.monomials, draft.coefficients, rhs), x_star
    rhs = rng.uniform(0.5, 2.0, n_eq)
    return PolynomialSystem(names, monomials, coef, rhs), None


def suite_instances(count, seed=20260814):
    """The random mixed population used by the trace and gradient suites.

    Yields (index, system, x0): n <= 6, |S| <= 10, alternating multilinear
    and homogeneous monomials, alternating solvable and overconstrained.
    """
    rng = np.random.default_rng(seed)
    for idx in range(count):
        n = int(rng.integers(2, 7))
        if idx % 2:
            mono = multilinear_monomials(rng, n, int(rng.integers(n, 9)))
        else:
            mono = homogeneous_monomials(rng, n, int(rng.integers(1, 4)), int(rng.integers(n, 9)))
        mono = mono[:10]
        covered = np.any(mono > 0, axis=0)
        if not covered.all():
            continue
        solvable = idx % 4 < 2
        n_eq = int(rng.integers(1, mono.shape[0] + 3)) if solvable else mono.shape[0] + int(rng.integers(1, 4))
        system, _ = random_system(rng, n, mono, n_equations=n_eq, solvable=solvable)
        x0 = rng.uniform(0.3, 1.6, n)
        yield idx, system, x0
