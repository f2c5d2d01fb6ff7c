"""Command-line interface.

Subcommands: ``solve`` (multi-start solve of a system file, JSON report on
stdout), ``check`` (detect or verify a degree structure), ``transform``
(rewrite a signed system as a non-negative one), and ``generate`` (emit a
bilinear stress instance).  Exit codes: 0 success (for ``solve``: best
divergence within tolerance of zero), 2 best result is an approximation,
1 bad input or generation failure.

The environment variable KLSOLVE_THREADS caps restart concurrency for
``solve`` (0 or unset runs restarts sequentially); reports are byte-stable
for a fixed seed either way.
"""

import argparse
import os
import sys

from . import fileio
from .backend import backend_name
from .errors import KLSolveError
from .solver import SolverConfig, multi_start
from .structure import detect_degree_structure, verify_degree_structure
from .transforms import generate_bilinear_instance, homogenize_positivize


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KLSolveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="klsolve",
        description=(
            "Find positive solutions, or closest approximations in the "
            "generalized Kullback-Leibler sense, of polynomial systems with "
            "non-negative coefficients."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a system file, print a JSON report")
    p_solve.add_argument("path", help="system file (JSON)")
    p_solve.add_argument("--restarts", type=int, default=16, metavar="N")
    p_solve.add_argument("--seed", type=int, default=0, metavar="S")
    p_solve.add_argument("--outer-tol", type=float, default=1e-9, metavar="T")
    p_solve.add_argument("--inner-tol", type=float, default=1e-10, metavar="T")
    p_solve.add_argument("--max-outer", type=int, default=10000, metavar="N")
    p_solve.add_argument("--max-inner", type=int, default=200, metavar="N")
    p_solve.add_argument("--trace", action="store_true", help="include the divergence trace")
    p_solve.set_defaults(func=cmd_solve)

    p_check = sub.add_parser("check", help="detect or verify a degree structure")
    p_check.add_argument("path", help="system file (JSON)")
    p_check.set_defaults(func=cmd_check)

    p_transform = sub.add_parser(
        "transform",
        help="rewrite a signed system (rhs 0) as an equivalent non-negative one",
    )
    p_transform.add_argument("path", help="general system file (JSON, signed, rhs 0)")
    p_transform.set_defaults(func=cmd_transform)

    p_generate = sub.add_parser("generate", help="emit a generated test instance")
    p_generate.add_argument("kind", choices=["bilinear"], help="instance family")
    p_generate.add_argument("--m", type=int, default=2, metavar="M", help="block size, 2..4")
    p_generate.add_argument("--seed", type=int, default=0, metavar="S")
    p_generate.set_defaults(func=cmd_generate)

    p_backend = sub.add_parser("backend", help="print the active compute backend")
    p_backend.set_defaults(func=cmd_backend)
    return parser


def cmd_solve(args):
    system, structure, _ = fileio.parse_system_document(fileio.load_json(args.path))
    config = SolverConfig(
        inner_tol=args.inner_tol,
        outer_tol=args.outer_tol,
        max_inner=args.max_inner,
        max_outer=args.max_outer,
        restarts=args.restarts,
        seed=args.seed,
    )
    result = multi_start(system, structure, config, threads=_thread_cap())
    doc = fileio.report_document(result, system, include_trace=args.trace)
    sys.stdout.write(fileio.dumps_canonical(doc))
    best = result.best
    solved = (
        best.status == "critical-point"
        and best.divergence_final <= config.outer_tol * float(system.rhs.sum())
    )
    return 0 if solved else 2


def cmd_check(args):
    system, structure, _ = fileio.parse_system_document(fileio.load_json(args.path))
    if structure is not None:
        violations = verify_degree_structure(system, structure)
        if violations:
            for v in violations:
                print(f"error: {v}", file=sys.stderr)
            return 1
        print("declared degree structure verified")
    else:
        structure = detect_degree_structure(system)
        if structure is None:
            print(
                "error: no degree structure detected; "
                "rewrite the system with the transform subcommand",
                file=sys.stderr,
            )
            return 1
        print("detected degree structure")
    _describe_structure(system, structure)
    return 0


def cmd_transform(args):
    gsys = fileio.parse_general_document(fileio.load_json(args.path))
    system, certificate = homogenize_positivize(gsys)
    structure = detect_degree_structure(system)
    doc = fileio.system_document(
        system,
        structure=structure,
        note=(
            "non-negative form of a signed system; positive roots map back "
            f"by {certificate.back_map}"
        ),
        certificate=certificate,
    )
    sys.stdout.write(fileio.dumps_canonical(doc))
    return 0


def cmd_generate(args):
    if not 2 <= args.m <= 4:
        print("error: --m must be between 2 and 4", file=sys.stderr)
        return 1
    system, structure, count = generate_bilinear_instance(args.m, args.seed)
    note = f"bilinear instance, m={args.m}, seed={args.seed}, expected_solutions={count}"
    doc = fileio.system_document(system, structure=structure, note=note)
    sys.stdout.write(fileio.dumps_canonical(doc))
    return 0


def cmd_backend(args):
    print(backend_name())
    return 0


def _thread_cap():
    raw = os.environ.get("KLSOLVE_THREADS", "").strip()
    if not raw:
        return 0
    try:
        value = int(raw)
    except ValueError:
        raise KLSolveError(f"KLSOLVE_THREADS must be an integer, got {raw!r}") from None
    return max(value, 0)


def _describe_structure(system, structure):
    n = system.n_variables
    names = system.variable_names
    all_ones = structure.n_rows == 1 and bool((structure.g == 1.0).all())
    zero_one = bool(((structure.g == 0.0) | (structure.g == 1.0)).all())
    if all_ones:
        print(f"kind: homogeneous, degree {_fmt(structure.d[0])}")
    elif zero_one and bool((structure.g.sum(axis=0) == 1.0).all()):
        print(f"kind: multilinear, {structure.n_rows} groups")
        for j in range(structure.n_rows):
            group = [names[i] for i in range(n) if structure.g[j, i] > 0]
            print(f"group {j + 1} (d={_fmt(structure.d[j])}): {', '.join(group)}")
        return
    else:
        print(f"kind: general, {structure.n_rows} rows")
    for j in range(structure.n_rows):
        row = ", ".join(_fmt(v) for v in structure.g[j])
        print(f"row {j + 1}: d={_fmt(structure.d[j])}, g=[{row}]")


def _fmt(value):
    value = float(value)
    return str(int(value)) if value.is_integer() else repr(value)


if __name__ == "__main__":
    sys.exit(main())
