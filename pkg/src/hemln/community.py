"""Per-layer community detection and community statistics.

The built-in detector is a deterministic two-phase Louvain modularity
maximizer. All gain comparisons are done in integer arithmetic, so the
result does not depend on floating point rounding.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction

from hemln.network import Layer


@dataclass(frozen=True)
class CommunityStats:
    size: int
    internal_edges: int
    density: Fraction
    hubs: frozenset[int]
    members: frozenset[int]


@dataclass(frozen=True)
class CommunityAssignment:
    """Partition of one layer's nodes into communities.

    ``membership`` maps every node to a local community id (dense, starting
    at 1). ``communities`` only holds entries for communities with at least
    two members; singletons never take part in coupling.
    """

    layer: str
    membership: Mapping[int, int]
    communities: Mapping[int, CommunityStats]

    @classmethod
    def from_membership(cls, layer: Layer, membership: Mapping[int, int]) -> CommunityAssignment:
        missing = layer.nodes - membership.keys()
        if missing:
            raise ValueError(f"partition is not total on layer {layer.name!r}: {sorted(missing)[:5]}")
        groups: dict[int, list[int]] = {}
        for v, cid in membership.items():
            if v not in layer.nodes:
                raise ValueError(f"node {v} is not in layer {layer.name!r}")
            if cid < 1:
                raise ValueError(f"community ids must be positive, got {cid}")
            groups.setdefault(cid, []).append(v)
        stats = {
            cid: community_stats(layer, members)
            for cid, members in sorted(groups.items())
            if len(members) >= 2
        }
        return cls(layer.name, dict(membership), stats)

    @classmethod
    def from_groups(cls, layer: Layer, groups: Mapping[int, Iterable[int]]) -> CommunityAssignment:
        """Build an assignment from explicit ``{community id: members}``.

        Nodes not covered become singletons with fresh ids above the
        largest given one.
        """
        membership: dict[int, int] = {}
        for cid, members in groups.items():
            for v in members:
                if v in membership:
                    raise ValueError(f"node {v} placed in two communities")
                membership[v] = cid
        next_id = max(groups, default=0) + 1
        for v in sorted(layer.nodes - membership.keys()):
            membership[v] = next_id
            next_id += 1
        return cls.from_membership(layer, membership)

    def members(self, cid: int) -> frozenset[int]:
        return self.communities[cid].members

    @property
    def ids(self) -> list[int]:
        return sorted(self.communities)


Detector = Callable[[Layer], CommunityAssignment]


def _within_degrees(layer: Layer, members: frozenset[int]) -> dict[int, int]:
    adj = layer.adjacency
    return {v: sum(1 for u in adj[v] if u in members) for v in members}


def hubs(layer: Layer, members: Iterable[int]) -> frozenset[int]:
    """Members whose within-community degree is at least the community mean.

    A community without internal edges has no hubs.
    """
    members = frozenset(members)
    deg = _within_degrees(layer, members)
    total = sum(deg.values())
    if total == 0:
        return frozenset()
    n = len(members)
    return frozenset(v for v, d in deg.items() if d * n >= total)


def community_stats(layer: Layer, members: Iterable[int]) -> CommunityStats:
    members = frozenset(members)
    n = len(members)
    if n < 2:
        raise ValueError("stats undefined for singleton")
    if not members <= layer.nodes:
        raise ValueError(f"community has nodes outside layer {layer.name!r}")
    internal = sum(_within_degrees(layer, members).values()) // 2
    density = Fraction(2 * internal, n * (n - 1))
    return CommunityStats(n, internal, density, hubs(layer, members), members)


def modularity(layer: Layer, partition: Mapping[int, int]) -> float:
    """Newman modularity of ``partition`` on an unweighted layer."""
    m = len(layer.edges)
    if m == 0:
        raise ValueError("modularity undefined for edgeless graph")
    intra: dict[int, int] = {}
    deg: dict[int, int] = {}
    for u, v in layer.edges:
        cu, cv = partition[u], partition[v]
        deg[cu] = deg.get(cu, 0) + 1
        deg[cv] = deg.get(cv, 0) + 1
        if cu == cv:
            intra[cu] = intra.get(cu, 0) + 1
    # Q * 4m^2 = sum_c 4m*l_c - d_c^2
    scaled = sum(4 * m * intra.get(c, 0) - d * d for c, d in deg.items())
    return float(Fraction(scaled, 4 * m * m))


class _Level:
    """Weighted graph on nodes 0..n-1 used inside one Louvain level."""

    def __init__(self, adj: list[dict[int, int]], loops: list[int]):
        self.adj = adj
        self.loops = loops
        self.k = [sum(nbrs.values()) + 2 * loop for nbrs, loop in zip(adj, loops)]
        self.m2 = sum(self.k)

    def __len__(self) -> int:
        return len(self.adj)

    def move_nodes(self) -> tuple[list[int], bool]:
        n = len(self.adj)
        comm = list(range(n))
        tot = list(self.k)
        m2 = self.m2
        moved_any = False
        while True:
            moved = False
            for i in range(n):
                ki = self.k[i]
                old = comm[i]
                weights: dict[int, int] = {}
                for j, w in self.adj[i].items():
                    c = comm[j]
                    weights[c] = weights.get(c, 0) + w
                tot[old] -= ki
                # gain scaled by 2m^2: 2m*k_i,C - tot_C*k_i
                stay = m2 * weights.get(old, 0) - tot[old] * ki
                best, best_gain = old, None
                for c in sorted(weights):
                    if c == old:
                        continue
                    gain = m2 * weights[c] - tot[c] * ki
                    if best_gain is None or gain > best_gain:
                        best, best_gain = c, gain
                if best_gain is not None and best_gain > stay:
                    comm[i] = best
                    moved = True
                else:
                    best = old
                tot[best] += ki
            if not moved:
                break
            moved_any = True
        return comm, moved_any

    def aggregate(self, comm: list[int]) -> tuple[_Level, list[int]]:
        """Quotient graph; returns it with the node -> new-node mapping."""
        relabel: dict[int, int] = {}
        for c in comm:
            if c not in relabel:
                relabel[c] = len(relabel)
        mapping = [relabel[c] for c in comm]
        size = len(relabel)
        adj: list[dict[int, int]] = [{} for _ in range(size)]
        loops = [0] * size
        for i, nbrs in enumerate(self.adj):
            ci = mapping[i]
            loops[ci] += self.loops[i]
            for j, w in nbrs.items():
                cj = mapping[j]
                if ci == cj:
                    if i < j:
                        loops[ci] += w
                else:
                    adj[ci][cj] = adj[ci].get(cj, 0) + w
        return _Level(adj, loops), mapping


def louvain_partition(layer: Layer) -> dict[int, int]:
    """Raw Louvain partition of ``layer``: node -> local id (1-based).

    Ids are ordered by each community's smallest node id.
    """
    order = sorted(layer.nodes)
    if not layer.edges:
        return {v: i + 1 for i, v in enumerate(order)}
    index = {v: i for i, v in enumerate(order)}
    adj: list[dict[int, int]] = [{} for _ in order]
    for u, v in layer.edges:
        adj[index[u]][index[v]] = 1
        adj[index[v]][index[u]] = 1
    level = _Level(adj, [0] * len(order))
    node_to_super = list(range(len(order)))
    while True:
        comm, moved = level.move_nodes()
        if not moved:
            break
        level, mapping = level.aggregate(comm)
        node_to_super = [mapping[s] for s in node_to_super]
    # relabel by smallest member node id; `order` is ascending so first-seen wins
    relabel: dict[int, int] = {}
    result: dict[int, int] = {}
    for i, v in enumerate(order):
        s = node_to_super[i]
        if s not in relabel:
            relabel[s] = len(relabel) + 1
        result[v] = relabel[s]
    return result


def detect_communities(layer: Layer) -> CommunityAssignment:
    return CommunityAssignment.from_membership(layer, louvain_partition(layer))


def detect_all(
    layers: Iterable[Layer], detector: Detector = detect_communities, threads: int = 1
) -> dict[str, CommunityAssignment]:
    """Run ``detector`` on each layer, optionally in worker processes."""
    layers = list(layers)
    if threads <= 1 or len(layers) <= 1:
        return {layer.name: detector(layer) for layer in layers}
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(detector, layers))
    return {layer.name: res for layer, res in zip(layers, results)}
