"""Benchmark the compiled kernel against the pure-numpy fallback.

Runs identical solves on both backends and reports wall time per solve
plus the speedup. Workloads: planted structured systems (fast converging)
and positivized bilinear instances (long multiplicative-update runs, the
regime the compiled core exists for).

Usage: python benchmarks/bench_backends.py [--repeats 3] [--seed 0]
"""

import argparse
import math
import time

import numpy as np

from klsolve import (
    SolverConfig,
    available_backends,
    generate_bilinear_instance,
    plant_solution,
    set_backend,
    solve,
)


def planted_workload(seed):
    rng = np.random.default_rng(seed)
    cases = []
    for i in range(6):
        n = int(rng.integers(3, 7))
        degree = int(rng.integers(2, 4))
        target = min(n + 4, math.comb(degree + n - 1, n - 1))
        rows = []
        seen = set()
        while len(rows) < target:
            row = rng.multinomial(degree, np.full(n, 1.0 / n))
            if tuple(row) not in seen:
                seen.add(tuple(row))
                rows.append(row)
        for j in range(n):
            pure = degree * np.eye(n, dtype=int)[j]
            if tuple(pure) not in seen:
                seen.add(tuple(pure))
                rows.append(pure)
        system, _ = plant_solution(n, np.array(rows, dtype=float), seed=seed + i)
        cases.append((f"planted n={n} d={degree}", system, None,
                      SolverConfig(outer_tol=1e-12, max_outer=20000, seed=i)))
    return cases


def bilinear_workload(seed):
    # Tight tolerances with a fixed sweep budget: both backends follow the
    # same trajectory to the same stopping iteration, so the timing is a
    # pure kernel race.
    cases = []
    for m in (2, 3):
        system, structure, _ = generate_bilinear_instance(m, seed=seed)
        cases.append((
            f"bilinear m={m} (20k sweeps)",
            system,
            structure,
            SolverConfig(
                outer_tol=1e-15, grad_tol=1e-12, max_outer=20000,
                single_sweep=True, seed=m,
            ),
        ))
    return cases


def time_case(backend, system, structure, config, repeats):
    set_backend(backend)
    best = float("inf")
    report = None
    for _ in range(repeats):
        start = time.perf_counter()
        report = solve(system, structure, config)
        best = min(best, time.perf_counter() - start)
    return best, report


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3, metavar="N",
                        help="timing repeats per case, best-of (default 3)")
    parser.add_argument("--seed", type=int, default=0, metavar="S")
    args = parser.parse_args()

    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not built; timing the python fallback only")

    cases = planted_workload(args.seed) + bilinear_workload(args.seed)
    name_w = max(len(name) for name, *_ in cases)
    header = f"{'case':<{name_w}}  {'iters':>7}"
    for backend in backends:
        header += f"  {backend + ' [s]':>12}"
    if len(backends) > 1:
        header += f"  {'speedup':>8}"
    print(header)
    print("-" * len(header))

    totals = dict.fromkeys(backends, 0.0)
    for name, system, structure, config in cases:
        row = None
        times = {}
        for backend in backends:
            elapsed, report = time_case(backend, system, structure, config, args.repeats)
            times[backend] = elapsed
            totals[backend] += elapsed
            row = report
        line = f"{name:<{name_w}}  {row.outer_iterations:>7}"
        for backend in backends:
            line += f"  {times[backend]:>12.4f}"
        if len(backends) > 1:
            line += f"  {times['python'] / times['cython']:>7.1f}x"
        print(line)

    print("-" * len(header))
    line = f"{'total':<{name_w}}  {'':>7}"
    for backend in backends:
        line += f"  {totals[backend]:>12.4f}"
    if len(backends) > 1:
        line += f"  {totals['python'] / totals['cython']:>7.1f}x"
    print(line)


if __name__ == "__main__":
    main()
