"""Nested multiplicative-update solver.

The iteration minimizes the generalized KL divergence between the equation
left-hand sides and the right-hand sides.  Each outer step redistributes the
rhs mass of every equation over its monomials (proportionally to the current
term values), producing per-monomial target weights ``w``.  The inner loop
then multiplicatively rescales ``x``, one degree-structure row at a time,
until ``x`` stabilizes; each row update is

    x_i <- x_i * ( sum_a alpha_i g_ji w_a / sum_a alpha_i g_ji c_a x**a ) ** (g_ji / d_j)

with ``c_a`` the per-monomial coefficient column sums.  Both loops weakly
decrease the objective, which is the convergence certificate the reports
expose.  Interior runs stop once the per-iteration decrease falls below
``outer_tol`` *and* the analytic gradient certifies a critical point; iterates
that approach the boundary of the positive orthant stop with a ``boundary``
status instead.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels_py as ref
from .backend import get_backend
from .errors import StructureNotFoundError, ValidationError
from .model import validate_system
from .structure import detect_degree_structure, verify_degree_structure

STATUS_NAMES = {
    ref.STATUS_CRITICAL: "critical-point",
    ref.STATUS_BOUNDARY: "boundary",
    ref.STATUS_MAXITER: "max-iterations",
}

# Outer traces may rise by at most this much per step before we call it a bug.
TRACE_SLACK = 1e-10
# Restart endpoints within this relative sup-distance count as one solution.
# Runs at default tolerances stop within ~2e-4 of a nondegenerate root (the
# gradient certificate, not the step size, is what bounds the error), so a
# tighter radius would split one root into several clusters.
CLUSTER_TOL = 5e-4


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances, iteration caps, and restart/seeding policy.

    ``grad_tol`` is the certificate bound: a run only reports a critical
    point when the divergence decrease stalls below ``outer_tol`` and the
    gradient sup-norm is at most ``grad_tol``.  ``single_sweep`` trades the
    fully-converged inner loop for one sweep per outer step (cheaper per
    iteration, same limit points).
    """

    inner_tol: float = 1e-10
    outer_tol: float = 1e-9
    max_inner: int = 200
    max_outer: int = 10000
    boundary_eps: float = 1e-12
    restarts: int = 16
    seed: int = 0
    init_low: float = 0.1
    init_high: float = 1.0
    grad_tol: float = 1e-6
    single_sweep: bool = False

    def __post_init__(self):
        problems = []
        for name in ("inner_tol", "outer_tol", "boundary_eps", "grad_tol"):
            if getattr(self, name) <= 0:
                problems.append(f"{name} must be positive")
        for name in ("max_inner", "max_outer", "restarts"):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be at least 1")
        if not 0 < self.init_low < self.init_high:
            problems.append("init bounds must satisfy 0 < init_low < init_high")
        if not 0 <= int(self.seed) < 2**64:
            problems.append("seed must fit in 64 unsigned bits")
        if problems:
            raise ValidationError(problems)


@dataclass
class InnerStepReport:
    """One row update: inner objective before/after and its decrease bound.

    ``decrease_bound`` is the divergence between the variable-aggregated
    current masses and target weights; theory guarantees the objective drops
    by at least ``decrease_bound / d_row``.
    """

    row: int
    decrease_bound: float
    divergence_before: float
    divergence_after: float

    def __post_init__(self):
        assert self.divergence_after <= self.divergence_before + TRACE_SLACK


@dataclass
class InnerLoopReport:
    sweeps: int
    converged: bool
    boundary: bool
    objective: float
    steps: list = field(default_factory=list)


@dataclass
class SolveReport:
    """Outcome of one solve run."""

    x_final: np.ndarray
    divergence_final: float
    divergence_trace: np.ndarray
    gradient_residual: float
    status: str
    outer_iterations: int
    total_inner_iterations: int
    restart_index: int = None
    seed: int = None


@dataclass
class SolutionCluster:
    """Deduplicated solution: best report among restarts landing together."""

    x: np.ndarray
    divergence: float
    status: str
    gradient_residual: float
    members: int


@dataclass
class MultiStartResult:
    reports: list
    clusters: list

    @property
    def best(self):
        return self.reports[0]


def compute_weights(system, x):
    """Per-monomial target weights at x (the mass-redistribution step).

    w_a = sum_i b_i * a_ia * x**a / (sum_b a_ib * x**b); the weights of all
    monomials total sum(b): each equation distributes its rhs mass.
    """
    v0 = system.monomial_values(x)
    return ref.weights(system.coefficients, system.rhs, v0)


def analytic_gradient(system, x):
    """Gradient of the system divergence at x (see system_divergence)."""
    x = system.check_point(x)
    v0 = system.monomial_values(x)
    p = system.coefficients @ v0
    t = system.coefficients.T @ (1.0 - system.rhs / p)
    return (system.monomials.T @ (t * v0)) / x


def ipf_update(system, structure, j, w, x):
    """Apply the multiplicative update of structure row j to x."""
    x = system.check_point(x)
    w = _check_weights(system, w)
    if not 0 <= j < structure.n_rows:
        raise ValueError(f"row index {j} out of range for {structure.n_rows} rows")
    numer = system.monomials.T @ w
    return ref.row_update(
        system.monomials, system.column_sums, structure.g[j], structure.d[j], numer, x
    )


def inner_objective(system, w, x):
    """sum_a D(c_a * x**a || w_a), the quantity the inner loop decreases."""
    x = system.check_point(x)
    w = _check_weights(system, w)
    pos = w > 0
    logw = np.zeros_like(w)
    logw[pos] = np.log(w[pos])
    return ref.inner_objective(
        system.monomials, system.column_sums, w, logw, float(w.sum()), x
    )


def decrease_bound(system, structure, j, w, x):
    """Guaranteed-decrease quantity for row j at x.

    The divergence, summed over variables touched by row j, between the
    aggregated current masses g_ji * sum_a alpha_i c_a x**a and the aggregated
    targets g_ji * sum_a alpha_i w_a.  The row update lowers the inner
    objective by at least this value divided by d_j.
    """
    x = system.check_point(x)
    w = _check_weights(system, w)
    v = system.column_sums * system.monomial_values(x)
    den = structure.g[j] * (system.monomials.T @ v)
    num = structure.g[j] * (system.monomials.T @ w)
    total = 0.0
    for a, b in zip(den, num):
        if a > 0:
            total += (b * math.log(b / a) if b > 0 else 0.0) - b + a
        else:
            assert b == 0.0, "aggregated target positive where current mass is zero"
    return max(total, 0.0)


def inner_loop(system, structure, w, x, config=None, track=False):
    """Run row updates until x stabilizes or the sweep cap is reached.

    Returns the updated point and an :class:`InnerLoopReport`; with
    ``track=True`` the report carries one :class:`InnerStepReport` per row
    update.  This is the reference (numpy) implementation; full solves run
    the same loop fused inside the selected backend.
    """
    cfg = config or SolverConfig()
    x = system.check_point(x)
    w = _check_weights(system, w)
    numer = system.monomials.T @ w
    pos = w > 0
    logw = np.zeros_like(w)
    logw[pos] = np.log(w[pos])
    wsum = float(w.sum())

    def objective(point):
        return ref.inner_objective(
            system.monomials, system.column_sums, w, logw, wsum, point
        )

    steps = []
    sweeps = 0
    converged = False
    boundary = False
    prev_obj = np.inf
    while sweeps < cfg.max_inner:
        x_start = x
        for j in range(structure.n_rows):
            if track:
                before = objective(x)
                bound = decrease_bound(system, structure, j, w, x)
            x = ref.row_update(
                system.monomials, system.column_sums, structure.g[j], structure.d[j], numer, x
            )
            if track:
                steps.append(
                    InnerStepReport(
                        row=j,
                        decrease_bound=bound,
                        divergence_before=before,
                        divergence_after=objective(x),
                    )
                )
            if np.min(x) <= cfg.boundary_eps:
                boundary = True
                break
        sweeps += 1
        if boundary:
            break
        obj = objective(x)
        assert obj <= prev_obj + TRACE_SLACK, "inner objective increased"
        prev_obj = obj
        if np.max(np.abs(x / x_start - 1.0)) < cfg.inner_tol:
            converged = True
            break
        if cfg.single_sweep:
            break
    report = InnerLoopReport(
        sweeps=sweeps,
        converged=converged,
        boundary=boundary,
        objective=objective(x),
        steps=steps,
    )
    return x, report


def initial_point(system, config):
    """Deterministic random interior starting point for a config."""
    rng = np.random.default_rng(config.seed)
    return rng.uniform(config.init_low, config.init_high, system.n_variables)


def solve(system, structure=None, config=None, x0=None):
    """Run the full nested iteration and report the outcome.

    ``structure`` defaults to auto-detection; ``x0`` to a seeded uniform
    sample from [init_low, init_high).  Non-convergence is reported through
    ``status``, never raised.
    """
    cfg = config or SolverConfig()
    structure = resolve_structure(system, structure)
    if x0 is None:
        x0 = initial_point(system, cfg)
    else:
        x0 = system.check_point(x0)

    kernel = get_backend()
    x, status_code, outer_iters, inner_total, trace, grad_res = kernel.solve_loop(
        system.monomials,
        system.coefficients,
        system.rhs,
        system.column_sums,
        structure.g,
        structure.d,
        x0,
        float(cfg.inner_tol),
        float(cfg.outer_tol),
        float(cfg.grad_tol),
        float(cfg.boundary_eps),
        int(cfg.max_inner),
        int(cfg.max_outer),
        bool(cfg.single_sweep),
    )
    status = STATUS_NAMES[status_code]
    assert np.all(np.diff(trace) <= TRACE_SLACK), "divergence trace increased"
    assert (status == "boundary") == (float(np.min(x)) <= cfg.boundary_eps)
    assert np.all(x > 0)
    return SolveReport(
        x_final=x,
        divergence_final=float(trace[-1]),
        divergence_trace=trace,
        gradient_residual=float(grad_res),
        status=status,
        outer_iterations=int(outer_iters),
        total_inner_iterations=int(inner_total),
        seed=cfg.seed,
    )


def multi_start(system, structure=None, config=None, threads=0):
    """Independent restarts with derived seeds, clustered into solutions.

    Restart k runs with seed ``config.seed XOR k``, so results do not depend
    on scheduling; ``threads`` > 0 runs restarts in a thread pool of that
    size.  Reports are sorted by final divergence (ties by restart index);
    clusters merge final points within relative sup-distance CLUSTER_TOL.
    """
    cfg = config or SolverConfig()
    structure = resolve_structure(system, structure)

    def run_one(k):
        rep = solve(system, structure, replace(cfg, seed=cfg.seed ^ k))
        rep.restart_index = k
        return rep

    indices = range(cfg.restarts)
    if threads and threads > 0 and cfg.restarts > 1:
        with ThreadPoolExecutor(max_workers=min(int(threads), cfg.restarts)) as pool:
            runs = list(pool.map(run_one, indices))
    else:
        runs = [run_one(k) for k in indices]

    runs.sort(key=lambda r: (math.isnan(r.divergence_final), r.divergence_final, r.restart_index))
    clusters = []
    for rep in runs:
        for cluster in clusters:
            if _relative_distance(cluster.x, rep.x_final) < CLUSTER_TOL:
                cluster.members += 1
                break
        else:
            clusters.append(
                SolutionCluster(
                    x=rep.x_final,
                    divergence=rep.divergence_final,
                    status=rep.status,
                    gradient_residual=rep.gradient_residual,
                    members=1,
                )
            )
    return MultiStartResult(reports=runs, clusters=clusters)


def resolve_structure(system, structure=None):
    """Validate the system and obtain a verified degree structure."""
    report = validate_system(system)
    if not report.ok:
        raise ValidationError(report.errors)
    if structure is None:
        structure = detect_degree_structure(system)
        if structure is None:
            raise StructureNotFoundError(
                "no degree structure detected; supply one explicitly or "
                "homogenize the system first (see klsolve transform)"
            )
        return structure
    violations = verify_degree_structure(system, structure)
    if violations:
        raise ValidationError([str(v) for v in violations])
    return structure


def _relative_distance(x, y):
    scale = max(1.0, float(np.max(np.abs(x))), float(np.max(np.abs(y))))
    return float(np.max(np.abs(x - y))) / scale


def _check_weights(system, w):
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (system.n_monomials,):
        raise ValueError(
            f"weights have length {w.size}, system has {system.n_monomials} monomials"
        )
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and non-negative")
    return w
