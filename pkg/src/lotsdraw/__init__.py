"""Sequential lots-drawing assignment under eligibility and avoidance
constraints, with maximum-matching oracles and named counterexample markets."""

from .engine import (
    AssignmentArrangement,
    AssignmentPlan,
    TubeSequence,
    execute,
    sample_uniform_job_orders,
    sample_uniform_worker_order,
    validate_arrangement,
)
from .model import (
    C_MINUS,
    C_PLUS,
    CompatibilityRegime,
    Job,
    JobCategory,
    LevelVector,
    Market,
    Matching,
    Worker,
    WorkerCategory,
    hl_dominates,
    is_compatible,
    is_feasible,
    level_vector,
    matching_size,
)
from .procedures import ProcedureKind, QingPartition

__all__ = [
    "AssignmentArrangement",
    "AssignmentPlan",
    "C_MINUS",
    "C_PLUS",
    "CompatibilityRegime",
    "Job",
    "JobCategory",
    "LevelVector",
    "Market",
    "Matching",
    "ProcedureKind",
    "QingPartition",
    "TubeSequence",
    "Worker",
    "WorkerCategory",
    "execute",
    "hl_dominates",
    "is_compatible",
    "is_feasible",
    "level_vector",
    "matching_size",
    "sample_uniform_job_orders",
    "sample_uniform_worker_order",
    "validate_arrangement",
]
