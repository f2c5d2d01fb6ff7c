"""Positive solutions of polynomial systems with non-negative coefficients.

The solver minimizes the generalized Kullback-Leibler divergence between
equation left-hand sides and right-hand sides with nested multiplicative
updates, so it returns either a positive solution or the divergence-closest
positive approximation.  See :func:`solve`, :func:`multi_start`, and the
``klsolve`` command-line tool.
"""

from .backend import available_backends, backend_name, set_backend
from .divergence import (
    gen_kl,
    normalizing_identity_residual,
    scaling_identity_residual,
    system_divergence,
)
from .errors import (
    GenerationError,
    KLSolveError,
    ParseError,
    StructureNotFoundError,
    ValidationError,
)
from .model import (
    PolynomialSystem,
    ResidualReport,
    ValidationReport,
    evaluate_monomial,
    evaluate_system,
    validate_system,
)
from .solver import (
    InnerLoopReport,
    InnerStepReport,
    MultiStartResult,
    SolutionCluster,
    SolveReport,
    SolverConfig,
    analytic_gradient,
    compute_weights,
    decrease_bound,
    initial_point,
    inner_loop,
    inner_objective,
    ipf_update,
    multi_start,
    resolve_structure,
    solve,
)
from .structure import (
    DegreeStructure,
    detect_degree_structure,
    verify_degree_structure,
)
from .transforms import (
    GeneralPolynomialSystem,
    TransformCertificate,
    bilinear_oracle_solutions,
    generate_bilinear_instance,
    homogenize_positivize,
    plant_solution,
)

__version__ = "0.1.0"

__all__ = [
    "DegreeStructure",
    "GeneralPolynomialSystem",
    "GenerationError",
    "InnerLoopReport",
    "InnerStepReport",
    "KLSolveError",
    "MultiStartResult",
    "ParseError",
    "PolynomialSystem",
    "ResidualReport",
    "SolutionCluster",
    "SolveReport",
    "SolverConfig",
    "StructureNotFoundError",
    "TransformCertificate",
    "ValidationError",
    "ValidationReport",
    "analytic_gradient",
    "available_backends",
    "backend_name",
    "bilinear_oracle_solutions",
    "compute_weights",
    "decrease_bound",
    "detect_degree_structure",
    "evaluate_monomial",
    "evaluate_system",
    "gen_kl",
    "generate_bilinear_instance",
    "homogenize_positivize",
    "initial_point",
    "inner_loop",
    "inner_objective",
    "ipf_update",
    "multi_start",
    "normalizing_identity_residual",
    "plant_solution",
    "resolve_structure",
    "scaling_identity_residual",
    "set_backend",
    "solve",
    "system_divergence",
    "validate_system",
    "verify_degree_structure",
]
