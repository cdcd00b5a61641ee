"""Sparse DAG structure learning by continuous optimization.

Learns a weighted adjacency matrix from observational data by minimizing an
L1-regularized least-squares score subject to a smooth acyclicity constraint
(trace of the matrix exponential of the Hadamard square), solved with an
augmented Lagrangian whose subproblems run through a proximal quasi-Newton
method.  Ships a simulator, recovery metrics, an exhaustive small-graph
oracle, and a CLI.
"""

from ._kernels import KERNEL_BACKEND
from .acyclicity import (
    AcyclicityEval,
    acyclicity_expm,
    acyclicity_finite_series,
    acyclicity_trace_inverse,
    is_dag_dfs,
)
from .evaluation import GraphMetrics, SweepPoint, compare_graphs, exact_global_search, roc_sweep
from .learner import (
    DualIterationRecord,
    LearnResult,
    NotearsConfig,
    min_dag_threshold,
    notears_fit,
    threshold,
)
from .linalg import expm, expm_taylor, spectral_radius
from .scoring import (
    NumericalOverflowError,
    SmoothObjective,
    auglag_smooth,
    ls_loss,
    ls_loss_grad,
    penalized_score,
)
from .simulation import (
    GraphSpec,
    SemSpec,
    assign_weights,
    sample_er_dag,
    sample_sem,
    sample_sf_dag,
    topological_order,
)
from .solver import (
    LbfgsMemory,
    LineSearchError,
    MinimizeResult,
    armijo_search,
    composite_subgradient,
    coordinate_step,
    minimize_composite,
    minimize_smooth,
    soft_threshold,
    solve_direction,
)

__version__ = "0.1.0"

__all__ = [
    "AcyclicityEval",
    "DualIterationRecord",
    "GraphMetrics",
    "GraphSpec",
    "KERNEL_BACKEND",
    "LbfgsMemory",
    "LearnResult",
    "LineSearchError",
    "MinimizeResult",
    "NotearsConfig",
    "NumericalOverflowError",
    "SemSpec",
    "SmoothObjective",
    "SweepPoint",
    "acyclicity_expm",
    "acyclicity_finite_series",
    "acyclicity_trace_inverse",
    "armijo_search",
    "assign_weights",
    "auglag_smooth",
    "compare_graphs",
    "composite_subgradient",
    "coordinate_step",
    "exact_global_search",
    "expm",
    "expm_taylor",
    "is_dag_dfs",
    "ls_loss",
    "ls_loss_grad",
    "min_dag_threshold",
    "minimize_composite",
    "minimize_smooth",
    "notears_fit",
    "penalized_score",
    "roc_sweep",
    "sample_er_dag",
    "sample_sem",
    "sample_sf_dag",
    "soft_threshold",
    "solve_direction",
    "spectral_radius",
    "threshold",
    "topological_order",
]
