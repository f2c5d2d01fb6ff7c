"""System representation, validation, and monomial/residual evaluation.

A system is a set of equations

    sum_alpha  a[i, alpha] * x**alpha  =  b[i],    i = 1..l,

with non-negative coefficients ``a``, strictly positive right-hand sides
``b``, and a shared finite set of non-negative (possibly non-integer)
exponent vectors ``alpha``.  Construction canonicalizes the data: duplicate
exponent vectors are merged by summing their coefficient columns, columns
whose coefficients sum to zero are dropped, and monomials are sorted
lexicographically.  All arrays are frozen after construction, so systems can
be shared freely across concurrent solver runs.
"""

from dataclasses import dataclass, field

import numpy as np

from .divergence import gen_kl
from .errors import ValidationError


def _frozen(arr):
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.flags.writeable = False
    return arr


def evaluate_monomial(x, alpha):
    """Evaluate x**alpha = prod_i x_i**alpha_i for positive x, alpha >= 0.

    Computed as exp(sum_i alpha_i * log(x_i)), which is well-defined for any
    real non-negative exponents.
    """
    x = np.asarray(x, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    if x.shape != alpha.shape:
        raise ValueError(f"dimension mismatch: len(x)={x.size}, len(alpha)={alpha.size}")
    if np.any(x <= 0):
        bad = int(np.argmax(x <= 0))
        raise ValueError(f"x[{bad}]={x[bad]} must be strictly positive")
    if np.any(alpha < 0):
        bad = int(np.argmax(alpha < 0))
        raise ValueError(f"alpha[{bad}]={alpha[bad]} must be non-negative")
    return float(np.exp(alpha @ np.log(x)))


@dataclass
class ResidualReport:
    """Per-equation left-hand sides and summary residuals at a point."""

    lhs: np.ndarray
    rhs: np.ndarray
    max_abs_residual: float
    divergence: float


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.errors


class PolynomialSystem:
    """Canonical, immutable representation of one positive polynomial system.

    Attributes
    ----------
    variable_names : tuple of str, length n
    monomials : (|S|, n) float array of exponent vectors, rows sorted
        lexicographically, no duplicates
    coefficients : (l, |S|) non-negative float array
    rhs : (l,) strictly positive float array
    column_sums : (|S|,) cached per-monomial coefficient sums, all positive
    """

    def __init__(self, variable_names, monomials, coefficients, rhs):
        names = tuple(str(v) for v in variable_names)
        monomials = np.atleast_2d(np.asarray(monomials, dtype=np.float64))
        coefficients = np.atleast_2d(np.asarray(coefficients, dtype=np.float64))
        rhs = np.atleast_1d(np.asarray(rhs, dtype=np.float64))

        problems = []
        n = len(names)
        if n == 0:
            problems.append("system must have at least one variable")
        if len(set(names)) != n:
            problems.append("variable names must be unique")
        if any(not name for name in names):
            problems.append("variable names must be non-empty")
        if monomials.ndim != 2 or monomials.shape[1] != n:
            problems.append(
                f"monomials must be a matrix with {n} columns, got shape {monomials.shape}"
            )
        if coefficients.ndim != 2 or coefficients.shape[1] != monomials.shape[0]:
            problems.append(
                "coefficients must have one column per monomial: "
                f"got shape {coefficients.shape} for {monomials.shape[0]} monomials"
            )
        if rhs.ndim != 1 or rhs.shape[0] != coefficients.shape[0]:
            problems.append(
                f"rhs must have one entry per equation: got {rhs.shape[0]} "
                f"for {coefficients.shape[0]} equations"
            )
        if problems:
            raise ValidationError(problems)

        for label, arr in (("monomials", monomials), ("coefficients", coefficients), ("rhs", rhs)):
            if not np.all(np.isfinite(arr)):
                problems.append(f"{label} must be finite")
        if np.any(monomials < 0):
            r, c = np.argwhere(monomials < 0)[0]
            problems.append(f"monomials[{r}][{c}]={monomials[r, c]} must be non-negative")
        if np.any(coefficients < 0):
            r, c = np.argwhere(coefficients < 0)[0]
            problems.append(
                f"coefficients[{r}][{c}]={coefficients[r, c]} must be non-negative"
            )
        if np.any(rhs <= 0):
            i = int(np.argmax(rhs <= 0))
            problems.append(f"rhs must be strictly positive, got rhs[{i}]={rhs[i]}")
        if problems:
            raise ValidationError(problems)

        monomials, coefficients = _canonicalize(monomials, coefficients)
        if monomials.shape[0] == 0:
            raise ValidationError(["system has no monomial with a positive coefficient"])
        empty = ~np.any(coefficients > 0, axis=1)
        if np.any(empty):
            i = int(np.argmax(empty))
            raise ValidationError([f"equation {i} has no strictly positive coefficient"])

        self.variable_names = names
        self.monomials = _frozen(monomials)
        self.coefficients = _frozen(coefficients)
        self.rhs = _frozen(rhs)
        self.column_sums = _frozen(coefficients.sum(axis=0))

    @property
    def n_variables(self):
        return len(self.variable_names)

    @property
    def n_equations(self):
        return self.rhs.shape[0]

    @property
    def n_monomials(self):
        return self.monomials.shape[0]

    def check_point(self, x):
        """Validate a candidate point and return it as a float array."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1 or x.shape[0] != self.n_variables:
            raise ValueError(
                f"x has length {x.size}, system has {self.n_variables} variables"
            )
        if not np.all(np.isfinite(x)):
            bad = int(np.argmax(~np.isfinite(x)))
            raise ValueError(f"x[{bad}]={x[bad]} is not finite")
        if np.any(x <= 0):
            bad = int(np.argmax(x <= 0))
            raise ValueError(f"x[{bad}]={x[bad]} must be strictly positive")
        return x

    def monomial_values(self, x):
        """Vector of x**alpha over all monomials, via exp of log-products."""
        x = self.check_point(x)
        return np.exp(self.monomials @ np.log(x))

    def evaluate_lhs(self, x):
        """Per-equation left-hand sides sum_alpha a[i, alpha] * x**alpha."""
        return self.coefficients @ self.monomial_values(x)

    def __repr__(self):
        return (
            f"PolynomialSystem(n={self.n_variables}, equations={self.n_equations}, "
            f"monomials={self.n_monomials})"
        )


def _canonicalize(monomials, coefficients):
    """Merge duplicate exponent rows, drop zero columns, sort lexicographically."""
    order = np.lexsort(monomials.T[::-1])
    monomials = monomials[order]
    coefficients = coefficients[:, order]
    keep_rows = []
    for k in range(monomials.shape[0]):
        if keep_rows and np.array_equal(monomials[keep_rows[-1]], monomials[k]):
            coefficients[:, keep_rows[-1]] += coefficients[:, k]
        else:
            keep_rows.append(k)
    monomials = monomials[keep_rows]
    coefficients = coefficients[:, keep_rows]
    nonzero = coefficients.sum(axis=0) > 0
    return monomials[nonzero], coefficients[:, nonzero]


def evaluate_system(system, x):
    """Evaluate all equations at x and report residuals and divergence."""
    lhs = system.evaluate_lhs(x)
    max_abs = float(np.max(np.abs(lhs - system.rhs)))
    return ResidualReport(
        lhs=lhs,
        rhs=np.array(system.rhs),
        max_abs_residual=max_abs,
        divergence=gen_kl(lhs, system.rhs),
    )


def validate_system(system):
    """Re-check system invariants and emit warnings for weak spots.

    Errors mark data that construction should have rejected (defensive) plus
    variables that appear in no monomial.  A missing pure power of some
    variable is only a warning: the iteration still runs, but its boundedness
    guarantee no longer applies to that variable.
    """
    report = ValidationReport()
    if np.any(system.coefficients < 0):
        report.errors.append("coefficients must be non-negative")
    if np.any(system.rhs <= 0):
        report.errors.append("rhs must be strictly positive")
    if not np.all(np.any(system.coefficients > 0, axis=1)):
        i = int(np.argmax(~np.any(system.coefficients > 0, axis=1)))
        report.errors.append(f"equation {i} has no strictly positive coefficient")

    appears = np.any(system.monomials > 0, axis=0)
    if not np.all(appears):
        missing = [system.variable_names[i] for i in np.flatnonzero(~appears)]
        report.errors.append(
            "variable(s) appear in no monomial: " + ", ".join(missing)
        )

    # A multiple of each unit vector in the monomial set keeps iterates bounded.
    lacking = []
    for i in range(system.n_variables):
        others = np.delete(system.monomials, i, axis=1)
        pure = (system.monomials[:, i] > 0) & ~np.any(others > 0, axis=1)
        if not np.any(pure):
            lacking.append(system.variable_names[i])
    if lacking:
        report.warnings.append(
            "no pure power of variable(s) "
            + ", ".join(lacking)
            + " present; iterates are not guaranteed to stay bounded"
        )
    return report
