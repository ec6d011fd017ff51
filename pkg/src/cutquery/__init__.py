"""Learning spanning forests of a hidden weighted graph through cut queries."""

from .graph_core import (
    Forest,
    GraphFamilySpec,
    GraphFormatError,
    WeightedGraph,
    generate_graph,
    ground_truth_components,
    is_maximal_spanning_forest,
    load_graph,
    save_graph,
)
from .oracle import CutOracle, QueryError, QueryLedger
from .reconstruct import (
    adaptive_split_bipartite,
    coin_weigh_support,
    doubling_reconstruct,
    general_adaptive_split,
)
from .forest_common import ComponentState, bin_search_edge, dfs_spanning_forest
from .randomized import PhaseConfig, reduce_connected_components, skeleton_reduce, spanning_forest_randomized
from .deterministic import harvey_baseline, spanning_forest_deterministic

__all__ = [
    "ComponentState",
    "CutOracle",
    "Forest",
    "GraphFamilySpec",
    "GraphFormatError",
    "PhaseConfig",
    "QueryError",
    "QueryLedger",
    "WeightedGraph",
    "adaptive_split_bipartite",
    "bin_search_edge",
    "coin_weigh_support",
    "dfs_spanning_forest",
    "doubling_reconstruct",
    "general_adaptive_split",
    "generate_graph",
    "ground_truth_components",
    "harvey_baseline",
    "is_maximal_spanning_forest",
    "load_graph",
    "reduce_connected_components",
    "save_graph",
    "skeleton_reduce",
    "spanning_forest_deterministic",
    "spanning_forest_randomized",
]
