"""Community bipartite graphs and maximum weighted bipartite coupling.

A community bipartite graph (CBG) has one meta node per community of two
layers and one meta edge per community pair joined by at least one
inter-layer link. Weights are exact rationals so that ties are detected
exactly.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable
from dataclasses import dataclass, replace
from fractions import Fraction

from hemln.community import CommunityAssignment
from hemln.network import HeMLN, pair_key


class WeightMetric(enum.Enum):
    EDGE_COUNT = "we"
    DENSITY = "wd"
    HUB = "wh"

    @classmethod
    def from_token(cls, token: str) -> WeightMetric:
        try:
            return cls(token)
        except ValueError:
            raise ValueError(f"unknown metric {token!r}; expected one of we, wd, wh") from None


@dataclass(frozen=True)
class MetaEdge:
    left: int
    right: int
    expanded: frozenset[tuple[int, int]]
    weight: Fraction = Fraction(0)


@dataclass(frozen=True)
class CommunityBipartiteGraph:
    left_layer: str
    right_layer: str
    left_set: frozenset[int]
    right_set: frozenset[int]
    meta_edges: tuple[MetaEdge, ...]

    def edge(self, left: int, right: int) -> MetaEdge | None:
        for e in self.meta_edges:
            if e.left == left and e.right == right:
                return e
        return None

    @property
    def link_count(self) -> int:
        return sum(len(e.expanded) for e in self.meta_edges)


MatchPairs = dict[int, frozenset[int]]


def build_cbg(
    h: HeMLN,
    left_layer: str,
    left_ids: Iterable[int],
    right_layer: str,
    right_ids: Iterable[int],
    assignments: dict[str, CommunityAssignment],
) -> CommunityBipartiteGraph:
    """Group the inter-layer links of two layers into meta edges."""
    if not h.coupled(left_layer, right_layer):
        raise KeyError(f"layers not coupled: {left_layer!r}, {right_layer!r}")
    left_asg = assignments[left_layer]
    right_asg = assignments[right_layer]
    left_set = frozenset(left_ids)
    right_set = frozenset(right_ids)
    for cid in left_set:
        if cid not in left_asg.communities:
            raise KeyError(f"unknown community {cid} in layer {left_layer!r}")
    for cid in right_set:
        if cid not in right_asg.communities:
            raise KeyError(f"unknown community {cid} in layer {right_layer!r}")

    g = h.interlayer[pair_key(left_layer, right_layer)]
    groups: dict[tuple[int, int], list[tuple[int, int]]] = {}
    if g.links:
        ends_a, ends_b = zip(*g.links)
        if g.layer_a != left_layer:
            ends_a, ends_b = ends_b, ends_a
        comm_a = map(left_asg.membership.get, ends_a)
        comm_b = map(right_asg.membership.get, ends_b)
        for a, b, ca, cb in zip(ends_a, ends_b, comm_a, comm_b):
            if ca in left_set and cb in right_set:
                key = (ca, cb)
                if key in groups:
                    groups[key].append((a, b))
                else:
                    groups[key] = [(a, b)]
    edges = tuple(
        MetaEdge(l, r, frozenset(pairs)) for (l, r), pairs in sorted(groups.items())
    )
    return CommunityBipartiteGraph(left_layer, right_layer, left_set, right_set, edges)


def _hub_ratio(hub_set: frozenset[int], touched: set[int]) -> Fraction:
    if not hub_set:
        return Fraction(0)
    return Fraction(len(hub_set & touched), len(hub_set))


def weigh_cbg(
    cbg: CommunityBipartiteGraph,
    metric: WeightMetric,
    left: CommunityAssignment,
    right: CommunityAssignment,
) -> CommunityBipartiteGraph:
    """Return a copy of ``cbg`` with every meta edge weighted by ``metric``."""
    if not cbg.meta_edges:
        return cbg
    weighted = []
    if metric is WeightMetric.EDGE_COUNT:
        biggest = max(len(e.expanded) for e in cbg.meta_edges)
        for e in cbg.meta_edges:
            weighted.append(replace(e, weight=Fraction(len(e.expanded), biggest)))
    else:
        for e in cbg.meta_edges:
            ls = left.communities[e.left]
            rs = right.communities[e.right]
            fraction = Fraction(len(e.expanded), ls.size * rs.size)
            if metric is WeightMetric.DENSITY:
                w = ls.density * fraction * rs.density
            else:
                lh = _hub_ratio(ls.hubs, {a for a, _ in e.expanded})
                rh = _hub_ratio(rs.hubs, {b for _, b in e.expanded})
                w = lh * fraction * rh
            weighted.append(replace(e, weight=w))
    return replace(cbg, meta_edges=tuple(weighted))


def mwbc(cbg: CommunityBipartiteGraph) -> MatchPairs:
    """Pair each left meta node with every right node of maximal weight.

    Single pass over the meta edges; left nodes without outgoing meta edges
    are absent from the result.
    """
    best: dict[int, tuple[Fraction, set[int]]] = {}
    for e in cbg.meta_edges:
        cur = best.get(e.left)
        if cur is None or e.weight > cur[0]:
            best[e.left] = (e.weight, {e.right})
        elif e.weight == cur[0]:
            cur[1].add(e.right)
    return {left: frozenset(rights) for left, (_, rights) in sorted(best.items())}


def cbg_rows(cbg: CommunityBipartiteGraph) -> list[tuple[int, int, int, int, int]]:
    """Tabular dump: left id, right id, |expanded|, weight numerator, denominator."""
    return [
        (e.left, e.right, len(e.expanded), e.weight.numerator, e.weight.denominator)
        for e in cbg.meta_edges
    ]
