"""System construction, canonicalization, evaluation, and validation."""

import numpy as np
import pytest

from klsolve import (
    PolynomialSystem,
    ValidationError,
    evaluate_monomial,
    evaluate_system,
    plant_solution,
    validate_system,
)

from helpers import homogeneous_monomials, multilinear_monomials


def test_evaluate_monomial_closed_forms():
    assert evaluate_monomial([2.0, 3.0], [1.0, 1.0]) == pytest.approx(6.0, rel=1e-15)
    assert evaluate_monomial([2.0, 3.0], [0.0, 0.0]) == pytest.approx(1.0, rel=1e-15)
    assert evaluate_monomial([4.0], [0.5]) == pytest.approx(2.0, rel=1e-15)
    assert evaluate_monomial([2.0], [10.0]) == pytest.approx(1024.0, rel=1e-12)


def test_evaluate_monomial_validation():
    with pytest.raises(ValueError, match="strictly positive"):
        evaluate_monomial([0.0], [1.0])
    with pytest.raises(ValueError, match="non-negative"):
        evaluate_monomial([1.0], [-1.0])
    with pytest.raises(ValueError, match="dimension mismatch"):
        evaluate_monomial([1.0, 2.0], [1.0])


class TestCanonicalization:
    def test_duplicate_monomials_merge(self):
        system = PolynomialSystem(
            ("x",),
            [[2.0], [2.0], [1.0]],
            [[1.0, 3.0, 0.5]],
            [4.0],
        )
        assert system.n_monomials == 2
        # merged column keeps the summed coefficient
        values = dict(zip(map(tuple, system.monomials), system.coefficients[0]))
        assert values[(2.0,)] == pytest.approx(4.0)
        assert values[(1.0,)] == pytest.approx(0.5)

    def test_zero_columns_dropped(self):
        system = PolynomialSystem(
            ("x", "y"),
            [[1.0, 0.0], [0.0, 1.0]],
            [[2.0, 0.0]],
            [1.0],
        )
        assert system.n_monomials == 1
        assert tuple(system.monomials[0]) == (1.0, 0.0)

    def test_rows_sorted_lexicographically(self):
        system = PolynomialSystem(
            ("x", "y"),
            [[2.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
            [[1.0, 1.0, 1.0]],
            [3.0],
        )
        rows = [tuple(r) for r in system.monomials]
        assert rows == sorted(rows)

    def test_arrays_frozen(self):
        system = PolynomialSystem(("x",), [[1.0]], [[1.0]], [1.0])
        with pytest.raises(ValueError):
            system.coefficients[0, 0] = 5.0
        with pytest.raises(ValueError):
            system.rhs[0] = 5.0


class TestValidation:
    def test_negative_coefficient_rejected(self):
        with pytest.raises(ValidationError, match="non-negative"):
            PolynomialSystem(("x",), [[1.0]], [[-1.0]], [1.0])

    def test_non_positive_rhs_rejected(self):
        with pytest.raises(ValidationError, match="strictly positive"):
            PolynomialSystem(("x",), [[1.0]], [[1.0]], [0.0])

    def test_duplicate_names_rejected(self):
        with pytest.raises(ValidationError, match="unique"):
            PolynomialSystem(("x", "x"), [[1.0, 0.0]], [[1.0]], [1.0])

    def test_empty_equation_rejected(self):
        with pytest.raises(ValidationError, match="no strictly positive coefficient"):
            PolynomialSystem(("x",), [[1.0], [2.0]], [[1.0, 0.0], [0.0, 0.0]], [1.0, 1.0])

    def test_negative_exponent_rejected(self):
        with pytest.raises(ValidationError, match="non-negative"):
            PolynomialSystem(("x",), [[-1.0]], [[1.0]], [1.0])

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValidationError, match="one entry per equation"):
            PolynomialSystem(("x",), [[1.0]], [[1.0]], [1.0, 2.0])

    def test_uncovered_variable_reported(self):
        system = PolynomialSystem(("x", "y"), [[1.0, 0.0]], [[1.0]], [1.0])
        report = validate_system(system)
        assert not report.ok
        assert any("appear in no monomial" in e for e in report.errors)

    def test_missing_pure_power_is_a_warning(self):
        system = PolynomialSystem(("x", "y"), [[1.0, 1.0]], [[1.0]], [6.0])
        report = validate_system(system)
        assert report.ok
        assert any("pure power" in w for w in report.warnings)


def test_check_point_errors():
    system = PolynomialSystem(("x", "y"), [[1.0, 1.0]], [[1.0]], [6.0])
    with pytest.raises(ValueError, match="length"):
        system.check_point([1.0])
    with pytest.raises(ValueError, match="strictly positive"):
        system.check_point([1.0, 0.0])
    with pytest.raises(ValueError, match="not finite"):
        system.check_point([1.0, np.nan])


def test_monomial_values_against_reference():
    rng = np.random.default_rng(6)
    for _ in range(50):
        n = int(rng.integers(1, 5))
        mono = homogeneous_monomials(rng, n, int(rng.integers(1, 4)), int(rng.integers(1, 6)))
        coef = rng.uniform(0.1, 2.0, (2, mono.shape[0]))
        system = PolynomialSystem(
            tuple(f"x{i}" for i in range(n)), mono, coef, [1.0, 1.0]
        )
        x = rng.uniform(0.2, 3.0, n)
        expected = np.array([np.prod(x**row) for row in system.monomials])
        assert np.allclose(system.monomial_values(x), expected, rtol=1e-12)


def test_residuals_vanish_at_planted_solutions():
    rng = np.random.default_rng(7)
    for i in range(30):
        n = int(rng.integers(1, 5))
        if i % 2:
            mono = multilinear_monomials(rng, n, int(rng.integers(n, n + 4)))
        else:
            mono = homogeneous_monomials(rng, n, int(rng.integers(1, 4)), int(rng.integers(n, n + 4)))
        system, x_star = plant_solution(n, mono, seed=i)
        report = evaluate_system(system, x_star)
        scale = float(np.max(system.rhs))
        assert report.max_abs_residual <= 1e-12 * max(1.0, scale)
        assert report.divergence == 0.0
