"""Bottleneck, lexicographic bottleneck and sequential bottleneck assignment on bipartite graphs."""

from .baselines import (
    brute_force_enumerate,
    solve_lexbap_exact,
    solve_lexbap_iterative,
    solve_lsap,
    solve_naive_greedy,
)
from .bottleneck import (
    BottleneckCertificate,
    PriceOfAbsence,
    bottleneck_weight,
    has_positive_price,
    is_critical_bottleneck_edge,
    price_of_absence,
    solve_bap,
)
from .distributed import CommGraph, SimTrace, build_comm_graph_radius, complete_comm_graph, run_distributed_seqbap
from .engine import Batch, SeqBapResult, enumerate_seqbap_solutions, solve_seqbap
from .errors import (
    DisconnectedTopology,
    EnumerationLimitError,
    InfeasibleError,
    InvalidInstance,
    NotAnMCMError,
    SeqbapError,
)
from .graph import Matching, Path, WeightedBipartiteGraph, WeightTuple, maximum_cardinality_matching

__all__ = [
    "Batch",
    "BottleneckCertificate",
    "CommGraph",
    "DisconnectedTopology",
    "EnumerationLimitError",
    "InfeasibleError",
    "InvalidInstance",
    "Matching",
    "NotAnMCMError",
    "Path",
    "PriceOfAbsence",
    "SeqBapResult",
    "SeqbapError",
    "SimTrace",
    "WeightTuple",
    "WeightedBipartiteGraph",
    "bottleneck_weight",
    "brute_force_enumerate",
    "build_comm_graph_radius",
    "complete_comm_graph",
    "enumerate_seqbap_solutions",
    "has_positive_price",
    "is_critical_bottleneck_edge",
    "maximum_cardinality_matching",
    "price_of_absence",
    "run_distributed_seqbap",
    "solve_bap",
    "solve_lexbap_exact",
    "solve_lexbap_iterative",
    "solve_lsap",
    "solve_naive_greedy",
    "solve_seqbap",
]
