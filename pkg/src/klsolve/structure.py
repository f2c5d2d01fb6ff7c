"""Degree structures: the exponent condition required by the solver.

A degree structure for a monomial set S is a non-negative matrix ``g`` of
shape (s, n) with no zero column, together with positive degrees ``d`` of
length s, such that for every exponent vector alpha in S and every row j,

    sum_i g[j, i] * alpha[i]  is either  0  or  d[j].

Homogeneous systems (all monomials of equal total degree d) admit the single
all-ones row with degree d.  Multilinear systems (all exponents 0/1) admit
indicator rows of any proper coloring of the variable co-occurrence graph,
with all degrees 1, which is also the fastest case for the solver since the
degrees appear as root orders in the update.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

REL_TOL = 1e-9


@dataclass(frozen=True)
class DegreeStructure:
    """Matrix g (s, n) and degrees d (s,) satisfying the exponent condition."""

    g: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.g, dtype=np.float64))
        d = np.atleast_1d(np.asarray(self.d, dtype=np.float64))
        problems = []
        if g.ndim != 2:
            problems.append(f"g must be a matrix, got shape {g.shape}")
        if d.ndim != 1 or d.shape[0] != g.shape[0]:
            problems.append(f"d must have one entry per row of g, got {d.shape[0]} for {g.shape[0]}")
        if np.any(g < 0) or not np.all(np.isfinite(g)):
            problems.append("g must be non-negative and finite")
        if np.any(d <= 0) or not np.all(np.isfinite(d)):
            problems.append("degrees d must be strictly positive and finite")
        if not problems and not np.all(np.any(g > 0, axis=0)):
            col = int(np.argmax(~np.any(g > 0, axis=0)))
            problems.append(f"column {col} of g is identically zero")
        if problems:
            raise ValidationError(problems)
        g.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "d", d)

    @property
    def n_rows(self):
        return self.g.shape[0]

    @property
    def n_variables(self):
        return self.g.shape[1]


@dataclass(frozen=True)
class StructureViolation:
    """One (row, monomial) pair where the weighted degree is neither 0 nor d."""

    row: int
    monomial: int
    value: float
    expected: float

    def __str__(self):
        return (
            f"row {self.row}, monomial {self.monomial}: weighted degree "
            f"{self.value} is neither 0 nor {self.expected}"
        )


def verify_degree_structure(system, structure, rel_tol=REL_TOL):
    """Check the exponent condition of ``structure`` against ``system``.

    Returns the list of violations; an empty list means the structure is
    valid.  Weighted degrees are compared with relative tolerance ``rel_tol``
    (relative to d[j]).
    """
    if structure.n_variables != system.n_variables:
        raise ValidationError(
            [
                f"structure has {structure.n_variables} columns, "
                f"system has {system.n_variables} variables"
            ]
        )
    weighted = system.monomials @ structure.g.T  # (|S|, s)
    violations = []
    for j in range(structure.n_rows):
        dj = structure.d[j]
        tol = rel_tol * dj
        bad = ~((np.abs(weighted[:, j]) <= tol) | (np.abs(weighted[:, j] - dj) <= tol))
        for k in np.flatnonzero(bad):
            violations.append(
                StructureViolation(row=j, monomial=int(k), value=float(weighted[k, j]), expected=float(dj))
            )
    return violations


def detect_degree_structure(system):
    """Find a degree structure for the system, or None.

    Tries multilinear detection first (proper coloring of the variable
    co-occurrence graph, all degrees 1, fastest for the solver), then
    homogeneous detection (single all-ones row).  Returns None when neither
    applies; callers should then ask the user for an explicit structure or
    homogenize the system.
    """
    multilinear = _detect_multilinear(system)
    if multilinear is not None and not verify_degree_structure(system, multilinear):
        return multilinear
    homogeneous = _detect_homogeneous(system)
    if homogeneous is not None and not verify_degree_structure(system, homogeneous):
        return homogeneous
    return None


def _detect_homogeneous(system):
    degrees = system.monomials.sum(axis=1)
    positive = degrees[degrees > 0]
    if positive.size == 0:
        return None
    d = positive[0]
    if np.any(np.abs(positive - d) > REL_TOL * d):
        return None
    n = system.n_variables
    return DegreeStructure(g=np.ones((1, n)), d=np.array([d]))


def _detect_multilinear(system):
    monomials = system.monomials
    is01 = np.all((monomials == 0) | (monomials == 1))
    if not is01:
        return None
    n = system.n_variables
    # Co-occurrence graph: variables sharing a monomial must land in
    # different groups, so any proper coloring yields a valid partition.
    adjacency = np.zeros((n, n), dtype=bool)
    for row in monomials:
        idx = np.flatnonzero(row > 0)
        for a in idx:
            adjacency[a, idx] = True
    np.fill_diagonal(adjacency, False)

    order = np.argsort(-adjacency.sum(axis=1), kind="stable")  # largest degree first
    colors = np.full(n, -1, dtype=int)
    for v in order:
        taken = set(colors[adjacency[v]]) - {-1}
        c = 0
        while c in taken:
            c += 1
        colors[v] = c
    s = colors.max() + 1
    g = np.zeros((s, n))
    g[colors, np.arange(n)] = 1.0
    return DegreeStructure(g=g, d=np.ones(s))
