"""Generalized KL divergence: values, conventions, and exact identities."""

import numpy as np
import pytest

from klsolve import (
    PolynomialSystem,
    gen_kl,
    normalizing_identity_residual,
    scaling_identity_residual,
    system_divergence,
)


def test_zero_at_equal_vectors():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a = rng.uniform(0.1, 5.0, rng.integers(1, 8))
        assert gen_kl(a, a) == 0.0


def test_known_value():
    # D([1] || [2]) = 2 log 2 - 2 + 1
    expected = 2.0 * np.log(2.0) - 1.0
    assert gen_kl([1.0], [2.0]) == pytest.approx(expected, abs=1e-15)


def test_zero_b_convention():
    # entries with b_i = 0 contribute a_i each
    assert gen_kl([0.5, 2.0], [0.0, 2.0]) == pytest.approx(0.5, abs=1e-15)
    assert gen_kl([3.0], [0.0]) == pytest.approx(3.0, abs=1e-15)


def test_non_negative_on_random_vectors():
    rng = np.random.default_rng(2)
    for _ in range(500):
        k = int(rng.integers(1, 17))
        a = rng.uniform(1e-3, 10.0, k)
        b = rng.uniform(0.0, 10.0, k)
        assert gen_kl(a, b) >= 0.0


def test_input_validation():
    with pytest.raises(ValueError, match="not strictly positive"):
        gen_kl([0.0], [1.0])
    with pytest.raises(ValueError, match="negative"):
        gen_kl([1.0], [-1.0])
    with pytest.raises(ValueError, match="dimension mismatch"):
        gen_kl([1.0, 2.0], [1.0])
    with pytest.raises(ValueError, match="finite"):
        gen_kl([np.inf], [1.0])
    with pytest.raises(ValueError, match="must be a vector"):
        gen_kl(np.ones((2, 2)), np.ones((2, 2)))


def test_scaling_identity_residual_vanishes():
    rng = np.random.default_rng(3)
    for _ in range(300):
        k = int(rng.integers(1, 17))
        a = rng.uniform(0.05, 8.0, k)
        b = rng.uniform(0.0, 8.0, k)
        t = float(rng.uniform(0.1, 5.0))
        res = scaling_identity_residual(a, b, t)
        assert abs(res) <= 1e-10 * max(1.0, gen_kl(a, b))


def test_scaling_identity_rejects_bad_t():
    with pytest.raises(ValueError, match="must be positive"):
        scaling_identity_residual([1.0], [1.0], 0.0)


def test_normalizing_identity_residual_vanishes():
    rng = np.random.default_rng(4)
    for _ in range(300):
        k = int(rng.integers(1, 17))
        a = rng.uniform(0.05, 8.0, k)
        b = rng.uniform(0.05, 8.0, k)
        res = normalizing_identity_residual(a, b)
        assert abs(res) <= 1e-10 * max(1.0, gen_kl(a, b))


def test_system_divergence_matches_direct_evaluation():
    rng = np.random.default_rng(5)
    system = PolynomialSystem(
        ("x", "y"),
        [[1.0, 1.0], [2.0, 0.0]],
        [[1.0, 0.5], [0.3, 2.0]],
        [4.0, 3.0],
    )
    for _ in range(20):
        x = rng.uniform(0.2, 3.0, 2)
        expected = gen_kl(system.evaluate_lhs(x), system.rhs)
        assert system_divergence(system, x) == pytest.approx(expected, rel=1e-15)
