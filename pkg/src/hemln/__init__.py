"""Community detection in heterogeneous multilayer networks by decoupling.

Each layer is clustered once; communities of pairs of layers are then
coupled through community bipartite graphs, following a linearized
k-community expression.
"""

from hemln.community import (
    CommunityAssignment,
    CommunityStats,
    community_stats,
    detect_all,
    detect_communities,
    hubs,
    modularity,
)
from hemln.coupling import WeightMetric, build_cbg, mwbc, weigh_cbg
from hemln.dsl import KCommunitySpec, SpecSyntaxError, parse_spec, print_spec, validate_spec
from hemln.ingest import load_hemln
from hemln.kcommunity import (
    KCommunityResult,
    KCommunityTuple,
    RankKey,
    classify,
    detect_k_community,
    drill_down,
    rank,
)
from hemln.network import HeMLN, InterLayerGraph, Layer, layer_adjacency, validate_hemln

__all__ = [
    "CommunityAssignment",
    "CommunityStats",
    "HeMLN",
    "InterLayerGraph",
    "KCommunityResult",
    "KCommunitySpec",
    "KCommunityTuple",
    "Layer",
    "RankKey",
    "SpecSyntaxError",
    "WeightMetric",
    "build_cbg",
    "classify",
    "community_stats",
    "detect_all",
    "detect_communities",
    "detect_k_community",
    "drill_down",
    "hubs",
    "layer_adjacency",
    "load_hemln",
    "modularity",
    "mwbc",
    "parse_spec",
    "print_spec",
    "rank",
    "validate_hemln",
    "validate_spec",
    "weigh_cbg",
]
