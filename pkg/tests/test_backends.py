"""Cython/python kernel parity and per-backend determinism."""

import numpy as np
import pytest

from klsolve import (
    SolverConfig,
    available_backends,
    backend_name,
    set_backend,
    solve,
)
from klsolve.backend import get_backend

from helpers import suite_instances


def test_python_backend_always_available():
    assert "python" in available_backends()


def test_backend_name_matches_selection():
    original = backend_name()
    try:
        set_backend("python")
        assert backend_name() == "python"
    finally:
        set_backend(original)


def test_unknown_backend_rejected():
    with pytest.raises(ValueError, match="unknown backend"):
        set_backend("fortran")


def test_auto_prefers_compiled_core():
    original = backend_name()
    try:
        set_backend("auto")
        expected = "cython" if "cython" in available_backends() else "python"
        assert backend_name() == expected
    finally:
        set_backend(original)


def _solve_with(backend, system, x0, config):
    original = backend_name()
    try:
        set_backend(backend)
        return solve(system, config=config, x0=x0)
    finally:
        set_backend(original)


@pytest.mark.skipif(
    "cython" not in available_backends(), reason="compiled core not built"
)
def test_backends_agree_to_rounding():
    cfg = SolverConfig(max_outer=400)
    sweep_cfg = SolverConfig(max_outer=400, single_sweep=True)
    rng = np.random.default_rng(21)
    for idx, system, x0 in suite_instances(12, seed=21):
        config = sweep_cfg if idx % 3 == 0 else cfg
        a = _solve_with("python", system, x0, config)
        b = _solve_with("cython", system, x0, config)
        assert a.status == b.status
        assert a.outer_iterations == b.outer_iterations
        np.testing.assert_allclose(a.x_final, b.x_final, rtol=1e-10, atol=1e-13)
        np.testing.assert_allclose(
            a.divergence_final, b.divergence_final, rtol=1e-8, atol=1e-14
        )


@pytest.mark.parametrize("backend", available_backends())
def test_each_backend_is_bitwise_deterministic(backend):
    for idx, system, x0 in suite_instances(6, seed=33):
        cfg = SolverConfig(max_outer=300)
        a = _solve_with(backend, system, x0, cfg)
        b = _solve_with(backend, system, x0, cfg)
        assert a.status == b.status
        assert a.outer_iterations == b.outer_iterations
        assert np.array_equal(a.x_final, b.x_final)
        assert a.divergence_final == b.divergence_final


@pytest.mark.parametrize("backend", available_backends())
def test_kernel_modules_share_the_loop_contract(backend):
    original = backend_name()
    try:
        kernel = set_backend(backend)
    finally:
        set_backend(original)
    for name in (
        "solve_loop",
        "BACKEND_NAME",
        "STATUS_CRITICAL",
        "STATUS_BOUNDARY",
        "STATUS_MAXITER",
    ):
        assert hasattr(kernel, name)
    assert kernel.BACKEND_NAME == backend
