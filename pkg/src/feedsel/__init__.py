"""Minimum-cost output-feedback pattern selection for structured systems."""

from .model import (
    INF,
    CostMatrix,
    DimensionError,
    FeedbackPattern,
    PreconditionError,
    SetCoverInstance,
    StructuredSystem,
    cost_of,
    full_pattern,
    validate,
)
from .graphs import (
    BipartiteGraph,
    Condensation,
    Digraph,
    closed_loop_bipartite,
    closed_loop_digraph,
    condense,
    has_line_spanning_path,
    is_line_dag,
    max_matching,
    min_cost_perfect_matching,
    state_bipartite,
    state_digraph,
)
from .sfm import SfmVerdict, check_condition_a, check_condition_b, check_no_sfm
from .solvers import (
    BudgetExceededError,
    DpTable,
    Solution,
    dp_cover,
    exact_oracle,
    greedy_set_cover,
    greedy_single_input,
    min_cost_condition_b,
    reduce_set_cover,
    selected_sets,
    solve_dp,
    two_stage,
)
from .generators import (
    random_line_system,
    random_single_input_system,
    random_system,
)
from .fileio import (
    SchemaError,
    emit_setcover,
    emit_system,
    load_setcover,
    load_system,
    parse_setcover,
    parse_system,
)

__version__ = "0.1.0"

__all__ = [
    "INF",
    "BipartiteGraph",
    "BudgetExceededError",
    "Condensation",
    "CostMatrix",
    "Digraph",
    "DimensionError",
    "DpTable",
    "FeedbackPattern",
    "PreconditionError",
    "SchemaError",
    "SetCoverInstance",
    "SfmVerdict",
    "Solution",
    "StructuredSystem",
    "check_condition_a",
    "check_condition_b",
    "check_no_sfm",
    "closed_loop_bipartite",
    "closed_loop_digraph",
    "condense",
    "cost_of",
    "dp_cover",
    "emit_setcover",
    "emit_system",
    "exact_oracle",
    "full_pattern",
    "greedy_set_cover",
    "greedy_single_input",
    "has_line_spanning_path",
    "is_line_dag",
    "load_setcover",
    "load_system",
    "max_matching",
    "min_cost_condition_b",
    "min_cost_perfect_matching",
    "parse_setcover",
    "parse_system",
    "random_line_system",
    "random_single_input_system",
    "random_system",
    "reduce_set_cover",
    "selected_sets",
    "solve_dp",
    "state_bipartite",
    "state_digraph",
    "two_stage",
    "validate",
]
