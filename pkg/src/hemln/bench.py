"""Synthetic planted-partition HeMLNs and pipeline timing."""

from __future__ import annotations

import gc
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass

import numpy as np

from hemln.community import CommunityAssignment, Detector, detect_communities
from hemln.dsl import KCommunitySpec
from hemln.kcommunity import KCommunityResult, detect_k_community
from hemln.network import HeMLN, InterLayerGraph, Layer


@dataclass(frozen=True)
class BenchParams:
    layers: int = 3
    nodes: int = 10_000
    community_size: int = 200
    p_in: float = 0.1
    p_out: float = 1e-4
    links: int = 50_000
    seed: int = 7

    def header(self) -> str:
        return " ".join(f"{k}={v}" for k, v in asdict(self).items())


def planted_layer(
    name: str, n: int, size: int, p_in: float, p_out: float, rng: np.random.Generator, offset: int
) -> Layer:
    """Planted partition graph on ids ``offset .. offset+n-1``.

    Consecutive blocks of ``size`` nodes are the planted communities.
    """
    edges = []
    iu, ju = np.triu_indices(size, 1)
    for start in range(0, n, size):
        width = min(size, n - start)
        if width < 2:
            continue
        if width == size:
            a, b = iu, ju
        else:
            a, b = np.triu_indices(width, 1)
        keep = rng.random(len(a)) < p_in
        edges.append(np.stack([a[keep], b[keep]], axis=1) + start)

    block = np.arange(n) // size
    cross_pairs = n * (n - 1) // 2 - sum(
        int(w) * (int(w) - 1) // 2 for w in np.bincount(block)
    )
    count = rng.binomial(cross_pairs, p_out) if cross_pairs else 0
    if count:
        u = rng.integers(0, n, size=2 * count)
        v = rng.integers(0, n, size=2 * count)
        ok = block[u] != block[v]
        pairs = np.sort(np.stack([u[ok], v[ok]], axis=1), axis=1)
        pairs = np.unique(pairs, axis=0)[:count]
        edges.append(pairs)

    all_edges = np.unique(np.concatenate(edges), axis=0) + offset if edges else np.empty((0, 2))
    nodes = range(offset, offset + n)
    return Layer.build(name, nodes, map(tuple, all_edges.tolist()))


def random_links(
    left: Layer, right: Layer, count: int, rng: np.random.Generator
) -> InterLayerGraph:
    lnodes = np.asarray(sorted(left.nodes))
    rnodes = np.asarray(sorted(right.nodes))
    count = min(count, len(lnodes) * len(rnodes))
    found = np.empty((0, 2), dtype=np.int64)
    while len(found) < count:
        need = count - len(found)
        draw = np.stack(
            [rng.choice(lnodes, size=need), rng.choice(rnodes, size=need)], axis=1
        )
        found = np.unique(np.concatenate([found, draw]), axis=0)
    pick = np.sort(rng.permutation(len(found))[:count])
    return InterLayerGraph(left.name, right.name, frozenset(map(tuple, found[pick].tolist())))


def synthetic_hemln(params: BenchParams = BenchParams()) -> HeMLN:
    rng = np.random.default_rng(params.seed)
    names = [f"L{i + 1}" for i in range(params.layers)]
    layers = [
        planted_layer(
            name, params.nodes, params.community_size, params.p_in, params.p_out, rng,
            offset=i * params.nodes,
        )
        for i, name in enumerate(names)
    ]
    inter = [
        random_links(layers[i], layers[j], params.links, rng)
        for i in range(len(layers))
        for j in range(i + 1, len(layers))
    ]
    return HeMLN.build(layers, inter)


def synthetic_spec_text(layers: int = 3, metric: str = "we") -> str:
    """Cyclic spec over the synthetic layers: L1 @(L1,L2) L2 ... @(Ln,L1) L1."""
    names = [f"L{i + 1}" for i in range(layers)]
    parts = [names[0]]
    for a, b in zip(names, names[1:]):
        parts.append(f"@({a},{b}) {b}")
    if layers > 2:
        parts.append(f"@({names[-1]},{names[0]}) {names[0]}")
    return " ".join(parts) + f" ; {metric}"


@dataclass(frozen=True)
class BenchRow:
    phase: str
    name: str
    seconds: float
    communities: int | str = ""
    meta_edges: int | str = ""
    links: int | str = ""


@contextmanager
def _gc_paused():
    enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if enabled:
            gc.enable()


def run_bench(
    h: HeMLN, spec: KCommunitySpec, detector: Detector = detect_communities
) -> tuple[list[BenchRow], KCommunityResult, dict[str, CommunityAssignment]]:
    """Time each layer's community detection and each composition step.

    The garbage collector is paused while timing, as ``timeit`` does.
    """
    rows: list[BenchRow] = []
    assignments: dict[str, CommunityAssignment] = {}
    for name in spec.layers:
        with _gc_paused():
            clock = time.perf_counter()
            assignments[name] = detector(h.layers[name])
            elapsed = time.perf_counter() - clock
        rows.append(BenchRow("psi", name, elapsed, len(assignments[name].communities)))
    with _gc_paused():
        result = detect_k_community(h, spec, assignments)
    for i, ((a, b), secs, cbg) in enumerate(zip(spec.steps, result.step_seconds, result.cbgs)):
        rows.append(
            BenchRow(
                "compose", f"{i}:{a}->{b}", secs,
                meta_edges=len(cbg.meta_edges), links=len(h.links(a, b)),
            )
        )
    return rows, result, assignments


def composition_ratio(rows: list[BenchRow]) -> float:
    """Total composition time over the slowest single-layer detection time."""
    psi = max(r.seconds for r in rows if r.phase == "psi")
    compose = sum(r.seconds for r in rows if r.phase == "compose")
    return compose / psi if psi > 0 else float("inf")

