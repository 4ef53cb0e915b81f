"""Graph model for heterogeneous multilayer networks.

A HeMLN is a set of named layers, each a simple undirected graph over its
own entity type, plus bipartite inter-layer graphs joining pairs of layers.
Node ids are integers that are unique across the whole network.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property


def edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u <= v else (v, u)


def pair_key(a: str, b: str) -> tuple[str, str]:
    """Canonical key for an unordered pair of layer names."""
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class Layer:
    """A named simple undirected graph holding one entity type.

    Use :meth:`build` to construct from raw input; it normalizes edge
    orientation, drops duplicates and rejects self-loops. The plain
    constructor performs no checks so that :func:`validate_hemln` can be
    exercised on malformed data.
    """

    name: str
    nodes: frozenset[int]
    edges: frozenset[tuple[int, int]]
    labels: Mapping[int, str] = field(default_factory=dict, compare=False)

    @classmethod
    def build(
        cls,
        name: str,
        nodes: Iterable[int],
        edges: Iterable[tuple[int, int]] = (),
        labels: Mapping[int, str] | None = None,
    ) -> Layer:
        node_set = frozenset(int(v) for v in nodes)
        normalized = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop on node {u} in layer {name!r}")
            if u not in node_set or v not in node_set:
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside layer {name!r}")
            normalized.add(edge_key(u, v))
        return cls(name, node_set, frozenset(normalized), dict(labels or {}))

    @cached_property
    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in self.nodes}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for nbrs in adj.values():
            nbrs.sort()
        return adj

    def degree(self, v: int) -> int:
        if v not in self.nodes:
            raise KeyError(f"node not in layer: {v}")
        return len(self.adjacency[v])

    def label(self, v: int) -> str | None:
        return self.labels.get(v)

    def induced(self, members: Iterable[int], name: str | None = None) -> Layer:
        keep = frozenset(members)
        edges = frozenset(e for e in self.edges if e[0] in keep and e[1] in keep)
        labels = {v: lab for v, lab in self.labels.items() if v in keep}
        return Layer(name or self.name, keep, edges, labels)


def degree(layer: Layer, v: int) -> int:
    return layer.degree(v)


@dataclass(frozen=True)
class InterLayerGraph:
    """Bipartite link set between two layers.

    Links are stored oriented ``(node of layer_a, node of layer_b)``.
    """

    layer_a: str
    layer_b: str
    links: frozenset[tuple[int, int]]

    @property
    def key(self) -> tuple[str, str]:
        return pair_key(self.layer_a, self.layer_b)

    def oriented(self, left: str, right: str) -> frozenset[tuple[int, int]]:
        """Links as ``(left node, right node)`` pairs."""
        if (left, right) == (self.layer_a, self.layer_b):
            return self.links
        if (left, right) == (self.layer_b, self.layer_a):
            return frozenset((b, a) for a, b in self.links)
        raise KeyError(f"inter-layer graph {self.key} does not join {left!r} and {right!r}")


@dataclass(frozen=True)
class HeMLN:
    layers: Mapping[str, Layer]
    interlayer: Mapping[tuple[str, str], InterLayerGraph]

    @classmethod
    def build(cls, layers: Iterable[Layer], interlayer: Iterable[InterLayerGraph] = ()) -> HeMLN:
        layer_map: dict[str, Layer] = {}
        for layer in layers:
            if layer.name in layer_map:
                raise ValueError(f"duplicate layer name {layer.name!r}")
            layer_map[layer.name] = layer
        inter_map: dict[tuple[str, str], InterLayerGraph] = {}
        for g in interlayer:
            if g.key in inter_map:
                raise ValueError(f"more than one inter-layer graph for {g.key}")
            inter_map[g.key] = g
        return cls(layer_map, inter_map)

    @cached_property
    def node_layer(self) -> dict[int, str]:
        owner: dict[int, str] = {}
        for name in sorted(self.layers):
            for v in self.layers[name].nodes:
                owner.setdefault(v, name)
        return owner

    def coupled(self, a: str, b: str) -> bool:
        return pair_key(a, b) in self.interlayer

    def links(self, left: str, right: str) -> frozenset[tuple[int, int]]:
        """Inter-layer links oriented from ``left`` to ``right``."""
        try:
            g = self.interlayer[pair_key(left, right)]
        except KeyError:
            raise KeyError(f"layers not coupled: {left!r}, {right!r}") from None
        return g.oriented(left, right)

    def label(self, v: int) -> str | None:
        name = self.node_layer.get(v)
        return None if name is None else self.layers[name].label(v)


def validate_hemln(h: HeMLN) -> list[str]:
    """Return every invariant violation found in ``h``; empty when valid."""
    problems: list[str] = []
    seen: dict[int, str] = {}
    for name in sorted(h.layers):
        layer = h.layers[name]
        if layer.name != name:
            problems.append(f"layer stored under {name!r} is named {layer.name!r}")
        for v in sorted(layer.nodes):
            if v < 0:
                problems.append(f"negative node id {v} in layer {name!r}")
            if v in seen:
                problems.append(f"node id shared across layers: {v} in {seen[v]!r} and {name!r}")
            else:
                seen[v] = name
        edges_seen = set()
        for u, v in sorted(layer.edges):
            if u == v:
                problems.append(f"self-loop on node {u} in layer {name!r}")
            if u not in layer.nodes or v not in layer.nodes:
                problems.append(f"edge ({u}, {v}) endpoint not in layer {name!r}")
            k = edge_key(u, v)
            if k in edges_seen:
                problems.append(f"duplicate edge ({u}, {v}) in layer {name!r}")
            edges_seen.add(k)

    for key in sorted(h.interlayer):
        g = h.interlayer[key]
        if g.layer_a == g.layer_b:
            problems.append(f"inter-layer graph joins layer {g.layer_a!r} to itself")
            continue
        if key != g.key:
            problems.append(f"inter-layer graph stored under {key} joins {g.key}")
        missing = [n for n in (g.layer_a, g.layer_b) if n not in h.layers]
        if missing:
            problems.append(f"inter-layer graph {g.key} references unknown layer(s) {missing}")
            continue
        nodes_a = h.layers[g.layer_a].nodes
        nodes_b = h.layers[g.layer_b].nodes
        for a, b in sorted(g.links):
            if a not in nodes_a:
                problems.append(
                    f"link ({a}, {b}): link endpoint not in counterpart layer {g.layer_a!r}"
                )
            if b not in nodes_b:
                problems.append(
                    f"link ({a}, {b}): link endpoint not in counterpart layer {g.layer_b!r}"
                )
    return problems


@dataclass(frozen=True)
class LayerAdjacencyGraph:
    nodes: frozenset[str]
    edges: frozenset[tuple[str, str]]

    def neighbors(self, name: str) -> set[str]:
        out = set()
        for a, b in self.edges:
            if a == name:
                out.add(b)
            elif b == name:
                out.add(a)
        return out


def layer_adjacency(h: HeMLN) -> LayerAdjacencyGraph:
    return LayerAdjacencyGraph(frozenset(h.layers), frozenset(h.interlayer))
