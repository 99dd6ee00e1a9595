"""Graded-mesh L1 / Alikhanov solvers for 1D time-fractional diffusion-wave problems.

The second-order-in-time fractional problem (Caputo order alpha in (1, 2))
is rewritten as a coupled pair of order alpha/2, stepped on a graded time
mesh and discretised with P1 finite elements in space. A Mittag-Leffler
sine-series solution serves as an independent reference.
"""

from ._kernels import BACKEND
from .errors import (
    DomainError,
    MLAccuracyError,
    NotSPDError,
    NumericalError,
    SforError,
    StepError,
    ValidationError,
)
from .fracops import (
    alikhanov_kernel_row,
    check_assumptions,
    complementary_kernels,
    kernel_rows,
    l1_kernel_row,
)
from .harness import (
    ConvergenceTable,
    ErrorNorm,
    Example,
    ExperimentConfig,
    compute_error,
    emit_csv,
    emit_markdown,
    parse_config,
    run_sweep,
    run_table,
)
from .mesh import GradedMesh, build_graded_mesh, optimal_grading
from .sfor import Formula, ProblemSpec, Scheme, run, step
from .space1d import build_fem
from .special import MLEvalPolicy, mittag_leffler

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConvergenceTable",
    "DomainError",
    "ErrorNorm",
    "Example",
    "ExperimentConfig",
    "Formula",
    "GradedMesh",
    "MLAccuracyError",
    "MLEvalPolicy",
    "NotSPDError",
    "NumericalError",
    "ProblemSpec",
    "Scheme",
    "SforError",
    "StepError",
    "ValidationError",
    "alikhanov_kernel_row",
    "build_fem",
    "build_graded_mesh",
    "check_assumptions",
    "complementary_kernels",
    "compute_error",
    "emit_csv",
    "emit_markdown",
    "kernel_rows",
    "l1_kernel_row",
    "mittag_leffler",
    "optimal_grading",
    "parse_config",
    "run",
    "run_sweep",
    "run_table",
    "step",
]
