"""Solver backend selection.

Two interchangeable kernel implementations exist: ``klsolve._kernels`` (a
compiled Cython core, built at install time) and ``klsolve._kernels_py``
(pure numpy).  The compiled core is picked automatically when importable;
set ``KLSOLVE_BACKEND=python`` or ``KLSOLVE_BACKEND=cython`` to force one,
or call :func:`set_backend` at runtime (used by the benchmark and the parity
tests).

The two backends follow identical update rules but reduce sums in different
orders, so results can differ in the last few ulps; any single backend is
bitwise deterministic for fixed inputs and seed.
"""

import os

_selected = None


def _load(name):
    if name == "python":
        from . import _kernels_py
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}; expected 'python', 'cython', or 'auto'")


def available_backends():
    names = []
    try:
        _load("cython")
        names.append("cython")
    except ImportError:
        pass
    names.append("python")
    return names


def set_backend(name):
    """Select a backend by name ('python', 'cython', or 'auto')."""
    global _selected
    if name in (None, "", "auto"):
        try:
            _selected = _load("cython")
        except ImportError:
            _selected = _load("python")
    else:
        _selected = _load(name)
    return _selected


def get_backend():
    """Currently selected kernel module (resolving KLSOLVE_BACKEND on first use)."""
    if _selected is None:
        set_backend(os.environ.get("KLSOLVE_BACKEND", "auto"))
    return _selected


def backend_name():
    return get_backend().BACKEND_NAME
