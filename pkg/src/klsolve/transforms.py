"""System transformations and instance generators.

``homogenize_positivize`` rewrites an arbitrary polynomial system (signed
coefficients, equations of the form p_i(x) = 0) into the non-negative form
the solver accepts: every monomial is padded with a power of one fresh
variable up to the common degree d, a normalization equation forces the
padded monomials to sum to 1, and a per-equation multiple of that equation
shifts all coefficients to be positive.  Positive roots map to positive
roots of the output (scale by (sum of padded monomials)**(1/d)) and map back
by dividing out the fresh coordinate.

``generate_bilinear_instance`` builds square systems with many positive
solutions: 2m-2 linear forms evaluated on two blocks of m variables, each
product forced to zero.  Picking which m-1 forms vanish on the first block
selects one solution, so there are C(2m-2, m-1) of them.  The forms are
sampled as random Gaussian rows and then composed with random changes of
coordinates until every selected solution lies strictly inside the positive
orthant; genericity, conditioning, and separation of the solutions are
checked numerically and the draw repeated on failure.

``plant_solution`` assembles random systems with a known exact positive
root, for testing.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GenerationError, StructureNotFoundError, ValidationError
from .model import PolynomialSystem
from .structure import DegreeStructure, detect_degree_structure

MINOR_DET_FLOOR = 1e-8
# Each solution's block is cut out by m-1 forms plus the all-ones
# normalization row; a near-singular such matrix makes the solution badly
# determined and the iteration around it nearly flat, so instances whose
# normalized determinant falls below this floor are re-sampled.
SUBSET_COND_FLOOR = 5e-2
# Minimum smallest singular value over all m x m minors of the normalized
# forms.  A subset of m forms with a near-common nullvector opens a spurious
# flat valley of the divergence (both variable blocks can hedge against the
# whole subset at once), which traps random restarts away from the true
# solutions.  Positivity of all subset points is an increasingly rare event
# as m grows and the achievable conditioning degrades with it, so the floor
# falls with m.
MINOR_SIGMA_FLOOR = {2: 0.15, 3: 0.10, 4: 0.003}
# Coordinate-change draws before generation gives up.  Sized so that the
# acceptance probability measured for each m leaves a negligible failure
# rate: roughly 2e-1 for m=2, 1e-3 for m=3, 2e-5 for m=4.
COORDINATE_ATTEMPTS = {2: 10_000, 3: 200_000, 4: 1_000_000}
# Minimum spacing of the solution points; keeps distinct solutions far
# enough apart that run clustering cannot merge them.
POINT_GAP = 2e-3


@dataclass(frozen=True)
class GeneralPolynomialSystem:
    """Polynomial equations sum_a c_ia * x**a = 0 with coefficients of any sign.

    Exponents are non-negative integers.  Duplicate monomials are merged and
    unused ones dropped, mirroring the canonical form of the non-negative
    systems; every equation must keep at least one nonzero coefficient.
    """

    variable_names: tuple
    monomials: np.ndarray
    coefficients: np.ndarray

    def __init__(self, variable_names, monomials, coefficients):
        names = tuple(str(v) for v in variable_names)
        problems = []
        if len(names) == 0:
            problems.append("at least one variable is required")
        if len(set(names)) != len(names):
            problems.append("variable names must be unique")
        if any(not v for v in names):
            problems.append("variable names must be non-empty")

        mono = np.asarray(monomials, dtype=np.float64)
        coef = np.atleast_2d(np.asarray(coefficients, dtype=np.float64))
        if mono.ndim != 2:
            problems.append(f"monomials must be a 2-d array, got {mono.ndim} dimensions")
        if coef.shape[0] == 0:
            problems.append("at least one equation is required")
        if problems:
            raise ValidationError(problems)
        if mono.shape[1] != len(names):
            problems.append(
                f"monomials have {mono.shape[1]} columns for {len(names)} variables"
            )
        if coef.shape != (coef.shape[0], mono.shape[0]):
            problems.append(
                f"coefficient rows have length {coef.shape[1]}, "
                f"expected one entry per monomial ({mono.shape[0]})"
            )
        if problems:
            raise ValidationError(problems)

        if not np.all(np.isfinite(mono)):
            problems.append("exponents must be finite")
        elif np.any(mono < 0) or np.any(mono != np.round(mono)):
            problems.append("exponents must be non-negative integers")
        if not np.all(np.isfinite(coef)):
            problems.append("coefficients must be finite")
        if problems:
            raise ValidationError(problems)

        mono = np.round(mono)
        order = np.lexsort(mono.T[::-1])
        mono = mono[order]
        coef = coef[:, order]
        keep_rows = []
        for r in range(mono.shape[0]):
            if keep_rows and np.array_equal(mono[keep_rows[-1]], mono[r]):
                coef[:, keep_rows[-1]] += coef[:, r]
            else:
                keep_rows.append(r)
        mono = mono[keep_rows]
        coef = coef[:, keep_rows]
        used = np.any(coef != 0.0, axis=0)
        mono = mono[used]
        coef = coef[:, used]

        for i in range(coef.shape[0]):
            if not np.any(coef[i] != 0.0):
                problems.append(f"equation {i} has no nonzero coefficient")
        if problems:
            raise ValidationError(problems)

        mono.setflags(write=False)
        coef.setflags(write=False)
        object.__setattr__(self, "variable_names", names)
        object.__setattr__(self, "monomials", mono)
        object.__setattr__(self, "coefficients", coef)

    @property
    def n_variables(self):
        return len(self.variable_names)

    @property
    def n_equations(self):
        return self.coefficients.shape[0]

    @property
    def n_monomials(self):
        return self.monomials.shape[0]

    def evaluate(self, x):
        """Residual vector: value of each polynomial at x."""
        x = np.asarray(x, dtype=np.float64)
        values = np.prod(np.power(x[None, :], self.monomials), axis=1)
        return self.coefficients @ values


@dataclass(frozen=True)
class TransformCertificate:
    """Record of a homogenize-and-positivize run, with both solution maps.

    ``shifts[i]`` is the multiple of the normalization equation added to
    equation i (also its new right-hand side).  ``condition_estimate`` is the
    2-norm condition number of the output coefficient matrix; the shift step
    tends to inflate it on large systems, and it is reported rather than
    mitigated.  ``homogenizing_variable`` is None when the input was already
    homogeneous, in which case no variable is added and both maps reduce to
    a normalization.
    """

    degree: int
    shifts: np.ndarray
    variable_names: tuple
    homogenizing_variable: str
    back_map: str
    condition_estimate: float
    _monomials: np.ndarray = field(repr=False, default=None)

    def map_solution(self, x):
        """Image of a positive root of the input system in the output system."""
        x = np.asarray(x, dtype=np.float64)
        n = len(self.variable_names) - (0 if self.homogenizing_variable is None else 1)
        if x.shape != (n,):
            raise ValueError(f"expected a point with {n} coordinates, got {x.size}")
        if np.any(x <= 0):
            raise ValueError("only strictly positive points can be mapped")
        if self.homogenizing_variable is None:
            ext = x
        else:
            ext = np.append(x, 1.0)
        total = float(np.sum(np.prod(np.power(ext[None, :], self._monomials), axis=1)))
        sigma = total ** (1.0 / self.degree)
        return ext / sigma

    def pull_back(self, x_prime):
        """Positive root of the input system from a root of the output."""
        x_prime = np.asarray(x_prime, dtype=np.float64)
        if x_prime.shape != (len(self.variable_names),):
            raise ValueError(
                f"expected a point with {len(self.variable_names)} coordinates, "
                f"got {x_prime.size}"
            )
        if self.homogenizing_variable is None:
            return x_prime.copy()
        return x_prime[:-1] / x_prime[-1]


def homogenize_positivize(gsys):
    """Rewrite a signed system as an equivalent non-negative one.

    Returns the transformed system together with a certificate carrying the
    forward and backward solution maps.  The output gains one equation (the
    normalization row) and, unless the input was already homogeneous, one
    variable.
    """
    degrees = gsys.monomials.sum(axis=1)
    d = int(max(1, degrees.max())) if gsys.n_monomials else 1
    pad = d - degrees
    already_homogeneous = bool(np.all(pad == 0))

    if already_homogeneous:
        names = gsys.variable_names
        mono = gsys.monomials
        hvar = None
    else:
        hvar = _fresh_name(gsys.variable_names)
        names = gsys.variable_names + (hvar,)
        mono = np.column_stack([gsys.monomials, pad])

    row_min = gsys.coefficients.min(axis=1)
    shifts = np.maximum(1.0, 2.0 * np.abs(row_min))
    coef = np.vstack([gsys.coefficients + shifts[:, None], np.ones(gsys.n_monomials)])
    rhs = np.append(shifts, 1.0)

    system = PolynomialSystem(names, mono, coef, rhs)
    certificate = TransformCertificate(
        degree=d,
        shifts=shifts,
        variable_names=system.variable_names,
        homogenizing_variable=hvar,
        back_map="x_i = x'_i / x'_{n+1}" if hvar else "x_i = x'_i",
        condition_estimate=float(np.linalg.cond(system.coefficients)),
        _monomials=mono,
    )
    return system, certificate


def generate_bilinear_instance(m, seed=0):
    """Square system on 2m variables with C(2m-2, m-1) positive solutions.

    Returns ``(system, structure, expected_count)``.  The system consists of
    2m-2 positivized products of one linear form over each variable block,
    plus the two normalizations (sum of first block) = 1 and (sum of first
    block)(sum of second block) = 1.  ``bilinear_oracle_solutions`` with the
    same arguments enumerates the expected solutions independently.
    """
    if m < 2:
        raise ValueError(f"m must be at least 2, got {m}")
    forms = _sample_bilinear_forms(m, seed)
    names = tuple(f"x{i + 1}" for i in range(2 * m))

    pair_mono = []
    for p in range(m):
        for q in range(m):
            row = np.zeros(2 * m)
            row[p] = 1.0
            row[m + q] = 1.0
            pair_mono.append(row)
    single_mono = []
    for p in range(m):
        row = np.zeros(2 * m)
        row[p] = 1.0
        single_mono.append(row)
    mono = np.array(pair_mono + single_mono)

    n_pairs = m * m
    rows = []
    rhs = []
    for k in range(2 * m - 2):
        products = np.outer(forms[k], forms[k]).ravel()
        shift = max(1.0, 2.0 * abs(products.min()))
        rows.append(np.concatenate([products + shift, np.zeros(m)]))
        rhs.append(shift)
    rows.append(np.concatenate([np.ones(n_pairs), np.zeros(m)]))
    rhs.append(1.0)
    rows.append(np.concatenate([np.zeros(n_pairs), np.ones(m)]))
    rhs.append(1.0)

    system = PolynomialSystem(names, mono, np.array(rows), np.array(rhs))
    g = np.zeros((2, 2 * m))
    g[0, :m] = 1.0
    g[1, m:] = 1.0
    structure = DegreeStructure(g, np.ones(2))
    return system, structure, math.comb(2 * m - 2, m - 1)


def bilinear_oracle_solutions(m, seed=0):
    """All expected solutions of the matching generated instance.

    Independent of the solver: for each (m-1)-subset of the forms, the first
    block solves those forms by singular value decomposition and the second
    block solves the complementary ones, then both blocks are normalized to
    sum 1.  Returns an array of shape (C(2m-2, m-1), 2m).
    """
    forms = _sample_bilinear_forms(m, seed)
    points = {}
    for subset in itertools.combinations(range(2 * m - 2), m - 1):
        points[subset] = _positive_nullspace(forms[list(subset)])
    solutions = []
    all_rows = frozenset(range(2 * m - 2))
    for subset in sorted(points):
        complement = tuple(sorted(all_rows - set(subset)))
        u = points[subset]
        v = points[complement]
        solutions.append(np.concatenate([u / u.sum(), v / v.sum()]))
    return np.array(solutions)


def plant_solution(n, monomials, seed=0, n_equations=None):
    """Random system with a known exact positive root.

    Samples a positive point, a sparse non-negative coefficient matrix whose
    rows and columns are all covered, and sets the right-hand sides to the
    left-hand side values at the point.  Returns ``(system, x_star)``; the
    root is exact in floating point, so the system divergence at it is 0.0.
    """
    mono = np.atleast_2d(np.asarray(monomials, dtype=np.float64))
    if mono.shape[1] != n:
        raise ValueError(f"monomials have {mono.shape[1]} columns, expected {n}")
    s = mono.shape[0]
    n_eq = s if n_equations is None else int(n_equations)
    if n_eq < 1:
        raise ValueError("at least one equation is required")

    rng = np.random.default_rng(seed)
    x_star = rng.uniform(0.5, 1.5, n)
    coef = np.zeros((n_eq, s))
    for k in range(max(n_eq, s)):
        coef[k % n_eq, k % s] = rng.uniform(0.5, 1.5)
    extra = rng.uniform(0.0, 1.0, (n_eq, s))
    coef = coef + np.where(rng.random((n_eq, s)) < 0.3, extra, 0.0)

    names = tuple(f"x{i + 1}" for i in range(n))
    draft = PolynomialSystem(names, mono, coef, np.ones(n_eq))
    rhs = draft.evaluate_lhs(x_star)
    system = PolynomialSystem(names, draft.monomials, draft.coefficients, rhs)
    if detect_degree_structure(system) is None:
        raise StructureNotFoundError(
            "planted monomial set admits no degree structure; "
            "homogenize the system first"
        )
    return system, x_star


def _fresh_name(names):
    taken = set(names)
    if "z" not in taken:
        return "z"
    k = 1
    while f"z{k}" in taken:
        k += 1
    return f"z{k}"


def _sample_bilinear_forms(m, seed):
    """2m-2 generic linear forms on m variables, re-sampled until checks pass.

    Gaussian rows are post-composed with random changes of coordinates until
    the points every (m-1)-subset cuts out are strictly positive.  Each
    subset's point is the nullspace ray of those rows, so under a coordinate
    change T the candidate points are T^-1 applied to the precomputed rays;
    that makes a single draw cheap enough to afford the low acceptance rate.
    Checks on the accepted forms: every m x m minor is nonsingular and well
    conditioned after row normalization, and the subset points are strictly
    positive, well interior, and pairwise distinct.
    """
    rng = np.random.default_rng(seed)
    n_forms = 2 * m - 2
    subsets = list(itertools.combinations(range(n_forms), m - 1))
    sigma_floor = MINOR_SIGMA_FLOOR.get(m, 0.0)
    budget = COORDINATE_ATTEMPTS.get(m, 1_000_000)
    attempts = 0
    while attempts < budget:
        raw = rng.standard_normal((n_forms, m))
        if not _generic(raw, m):
            attempts += 1
            continue
        rays = []
        for subset in subsets:
            _, _, vt = np.linalg.svd(raw[list(subset)])
            rays.append(vt[-1])
        rays = np.array(rays)

        # Try many coordinate changes against this one set of rows before
        # redrawing the rows themselves.
        for _ in range(min(budget - attempts, 20_000)):
            attempts += 1
            change = rng.standard_normal((m, m))
            if abs(np.linalg.det(change)) < 0.2:
                continue
            candidate = np.linalg.solve(change, rays.T).T
            flip = np.sign(
                candidate[np.arange(len(rays)), np.argmax(np.abs(candidate), axis=1)]
            )
            candidate = candidate * flip[:, None]
            if np.any(np.min(candidate, axis=1) < 1e-2 * np.max(candidate, axis=1)):
                continue
            forms = raw @ change
            # Unit rows keep the positivization shifts of order one; large
            # shifts flatten the objective around the roots and stall
            # convergence.
            forms = forms / np.linalg.norm(forms, axis=1, keepdims=True)
            if not _generic(forms, m):
                continue
            if _min_minor_sigma(forms, m) < sigma_floor:
                continue
            if not _subsets_well_posed(forms, subsets):
                continue
            points = [
                _positive_nullspace(forms[list(subset)], strict=False)
                for subset in subsets
            ]
            if any(pt is None for pt in points):
                continue
            if any(np.min(pt) < 1e-2 * np.max(pt) for pt in points):
                continue
            if not _pairwise_distinct(points):
                continue
            return forms
    raise GenerationError(
        f"could not sample generic positive bilinear forms for m={m} "
        f"in {budget} attempts"
    )


def _subsets_well_posed(forms, subsets):
    """Every (m-1)-subset of forms, stacked with the all-ones row, must be
    far from singular; otherwise the solution it cuts out is badly
    determined and the iteration around it is nearly flat."""
    m = forms.shape[1]
    ones = np.full((1, m), 1.0 / math.sqrt(m))
    for subset in subsets:
        block = np.vstack([forms[list(subset)], ones])
        if abs(np.linalg.det(block)) <= SUBSET_COND_FLOOR:
            return False
    return True


def _generic(forms, m):
    normalized = forms / np.linalg.norm(forms, axis=1, keepdims=True)
    for subset in itertools.combinations(range(forms.shape[0]), m):
        if abs(np.linalg.det(normalized[list(subset)])) <= MINOR_DET_FLOOR:
            return False
    return True


def _min_minor_sigma(forms, m):
    """Smallest singular value over all m x m minors of the unit-row forms."""
    return min(
        np.linalg.svd(forms[list(subset)], compute_uv=False)[-1]
        for subset in itertools.combinations(range(forms.shape[0]), m)
    )


def _positive_nullspace(rows, strict=True):
    """One-signed unit generator of the nullspace of (m-1) x m rows."""
    _, _, vt = np.linalg.svd(rows)
    vec = vt[-1]
    vec = vec * np.sign(vec[np.argmax(np.abs(vec))])
    if np.min(vec) <= 1e-12 * np.max(vec):
        if strict:
            raise GenerationError("nullspace generator is not strictly positive")
        return None
    return vec


def _pairwise_distinct(points, tol=POINT_GAP):
    scaled = [pt / pt.sum() for pt in points]
    for a, b in itertools.combinations(scaled, 2):
        if np.max(np.abs(a - b)) <= tol * max(1.0, np.max(np.abs(a)), np.max(np.abs(b))):
            return False
    return True
