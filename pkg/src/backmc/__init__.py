"""Local PageRank estimation on undirected graphs.

Everything an estimator learns about a graph flows through a
:class:`GraphOracle` (deg/neigh/jump with exact query accounting); the
rest of the package provides the graph model, synthetic generators,
power-iteration ground truth, and an experiment harness.
"""
from .errors import GraphFormatError, IsolatedTargetError, ParameterError
from .estimators import (
    BackMCPlan,
    BackwardPushState,
    Estimate,
    EstimatorConfig,
    SetPushState,
    backmc,
    backmc_single_run,
    backward_push,
    mc_global,
    median_of_runs,
    plan_backmc,
    sample_node,
    setpush,
    setpush_single_run,
)
from .graph import (
    ErParams,
    GraphStats,
    HardInstanceParams,
    UndirectedGraph,
    generate_er,
    generate_hard_instance,
    graph_stats,
    load_edge_list,
    validate_graph,
    write_edge_list,
)
from .ground_truth import (
    ScoreVector,
    default_iterations,
    pagerank_power,
    ppr_power,
    relative_error,
)
from .harness import (
    ExperimentSpec,
    HardFamilyReport,
    SummaryRow,
    TrialRecord,
    records_from_csv,
    records_to_csv,
    run_experiment,
    sample_targets,
    summarize,
    validate_hard_family,
)
from .oracle import GraphOracle, QueryCounters, derive_rng, spawn_seed

__version__ = "0.1.0"

__all__ = [
    "BackMCPlan",
    "BackwardPushState",
    "ErParams",
    "Estimate",
    "EstimatorConfig",
    "ExperimentSpec",
    "GraphFormatError",
    "GraphOracle",
    "GraphStats",
    "HardFamilyReport",
    "HardInstanceParams",
    "IsolatedTargetError",
    "ParameterError",
    "QueryCounters",
    "ScoreVector",
    "SetPushState",
    "SummaryRow",
    "TrialRecord",
    "UndirectedGraph",
    "backmc",
    "backmc_single_run",
    "backward_push",
    "default_iterations",
    "derive_rng",
    "generate_er",
    "generate_hard_instance",
    "graph_stats",
    "load_edge_list",
    "mc_global",
    "median_of_runs",
    "pagerank_power",
    "plan_backmc",
    "ppr_power",
    "records_from_csv",
    "records_to_csv",
    "relative_error",
    "run_experiment",
    "sample_node",
    "sample_targets",
    "setpush",
    "setpush_single_run",
    "spawn_seed",
    "summarize",
    "validate_graph",
    "validate_hard_family",
    "write_edge_list",
]
