"""Partitioned matching games with exact rational arithmetic."""
from .core import (
    BlockingCoalition,
    check_core_membership,
    core_is_empty,
    find_balanced_certificate,
    find_core_allocation,
    verify_balanced_certificate,
)
from .errors import (
    BoundExceeded,
    BranchBudgetExceeded,
    CapacityViolated,
    EdgeNotInGraph,
    NotAnAllocation,
    NotBipartite,
    NotPerfectGame,
    ParseError,
    PMGamesError,
    UnbalancedCertificate,
    UnknownPlayer,
    UnknownVertex,
    ValidationError,
    WidthError,
)
from .games import (
    BMatchingGame,
    Game,
    PartitionedGame,
    country_kidney_counts,
    country_utilities,
    received,
    shapley_value,
)
from .graph import DirectedGraph, Graph, Partition, induced_subgraph, symmetric_lift, underlying_undirected, validate_instance
from .instances import instance_from_json, instance_to_json, load_game, parse_instance
from .lexmin import (
    deviation_vector,
    feasibility_probe,
    lexmin_bruteforce,
    lexmin_uniform,
    lexmin_width1_directed,
    minimal_matching_bruteforce,
)
from .matching import (
    Interval,
    LexPair,
    enumerate_optimal_matchings,
    interval_constrained_optimal_matching,
    max_weight_matching,
    max_weight_perfect_matching,
)
from .reductions import root_gadget, transform_b_matching, tutte_expansion
from .simulator import SimConfig, run_simulation

__version__ = "0.1.0"

__all__ = [
    "BMatchingGame",
    "BlockingCoalition",
    "BoundExceeded",
    "BranchBudgetExceeded",
    "CapacityViolated",
    "DirectedGraph",
    "EdgeNotInGraph",
    "Game",
    "Graph",
    "Interval",
    "LexPair",
    "NotAnAllocation",
    "NotBipartite",
    "NotPerfectGame",
    "PMGamesError",
    "ParseError",
    "Partition",
    "PartitionedGame",
    "SimConfig",
    "UnbalancedCertificate",
    "UnknownPlayer",
    "UnknownVertex",
    "ValidationError",
    "WidthError",
    "check_core_membership",
    "core_is_empty",
    "country_kidney_counts",
    "country_utilities",
    "deviation_vector",
    "enumerate_optimal_matchings",
    "feasibility_probe",
    "find_balanced_certificate",
    "find_core_allocation",
    "induced_subgraph",
    "instance_from_json",
    "instance_to_json",
    "interval_constrained_optimal_matching",
    "lexmin_bruteforce",
    "lexmin_uniform",
    "lexmin_width1_directed",
    "load_game",
    "max_weight_matching",
    "max_weight_perfect_matching",
    "minimal_matching_bruteforce",
    "parse_instance",
    "received",
    "root_gadget",
    "run_simulation",
    "shapley_value",
    "symmetric_lift",
    "transform_b_matching",
    "tutte_expansion",
    "underlying_undirected",
    "validate_instance",
    "verify_balanced_certificate",
]
