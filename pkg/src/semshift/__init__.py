"""Semantic change detection toolkit.

Scores how much a word's usage changed between two time periods by
solving an optimal transport problem over its contextual-embedding
occurrence sets, alongside clustering and static-embedding baselines,
gold-standard annotation aggregation, and rank-correlation evaluation.
"""

from .errors import SemshiftError
from .occurrences import (
    AvgPool,
    LayerStack,
    OccurrenceEmbedding,
    Single,
    UsageSet,
    build_usage_set,
    pool_layers,
    read_occurrence_file,
    write_occurrence_file,
)
from .transport import (
    OTProblem,
    TransportPlan,
    build_cost_matrix,
    ot_change_score,
    solve_exact,
    solve_sinkhorn,
    uniform_problem,
)

__all__ = [
    "AvgPool",
    "LayerStack",
    "OTProblem",
    "OccurrenceEmbedding",
    "SemshiftError",
    "Single",
    "TransportPlan",
    "UsageSet",
    "build_cost_matrix",
    "build_usage_set",
    "ot_change_score",
    "pool_layers",
    "read_occurrence_file",
    "solve_exact",
    "solve_sinkhorn",
    "uniform_problem",
    "write_occurrence_file",
]

__version__ = "0.1.0"
