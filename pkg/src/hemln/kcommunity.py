"""Serial k-community detection over a HeMLN.

The result is a set of tuples. Each tuple holds one community id per
composed layer (0 when no partner was found) and one coupling slot per
composition step holding the expanded inter-layer edge set, or ``None``
for the empty set.
"""

from __future__ import annotations

import enum
import time
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from hemln.community import CommunityAssignment
from hemln.coupling import (
    CommunityBipartiteGraph,
    MatchPairs,
    build_cbg,
    mwbc,
    weigh_cbg,
)
from hemln.dsl import KCommunitySpec, validate_spec
from hemln.network import HeMLN, InterLayerGraph, Layer, pair_key

NULL = 0


class Coupling(NamedTuple):
    step: int
    left: str
    right: str
    edges: frozenset[tuple[int, int]] | None


@dataclass(frozen=True)
class KCommunityTuple:
    communities: tuple[tuple[str, int], ...]
    couplings: tuple[Coupling, ...]
    # where an inconsistent match pointed, per step; not part of equality
    diagnostics: tuple[tuple[int, tuple[int, ...]], ...] = field(default=(), compare=False)

    def community(self, layer: str) -> int | None:
        for name, cid in self.communities:
            if name == layer:
                return cid
        return None

    @property
    def total(self) -> bool:
        return all(c != NULL for _, c in self.communities) and all(
            c.edges is not None for c in self.couplings
        )

    def extend(self, layer: str, cid: int, coupling: Coupling) -> KCommunityTuple:
        return KCommunityTuple(
            self.communities + ((layer, cid),), self.couplings + (coupling,), self.diagnostics
        )

    def update(self, coupling: Coupling, note: tuple[int, ...] | None = None) -> KCommunityTuple:
        diagnostics = self.diagnostics
        if note is not None:
            diagnostics = diagnostics + ((coupling.step, note),)
        return KCommunityTuple(self.communities, self.couplings + (coupling,), diagnostics)

    def sort_key(self) -> tuple:
        return (
            tuple(c for _, c in self.communities),
            tuple(sorted(c.edges) if c.edges is not None else () for c in self.couplings),
        )


class Classification(enum.Enum):
    TOTAL = "total"
    PARTIAL = "partial"


def classify(t: KCommunityTuple) -> Classification:
    return Classification.TOTAL if t.total else Classification.PARTIAL


@dataclass(frozen=True)
class KCommunityResult:
    spec: KCommunitySpec
    tuples: tuple[KCommunityTuple, ...]
    k: int
    # meta-edge weights keyed by (step, left community, right community)
    weights: Mapping[tuple[int, int, int], Fraction] = field(default_factory=dict, compare=False)
    cbgs: tuple[CommunityBipartiteGraph, ...] = field(default=(), compare=False)
    step_seconds: tuple[float, ...] = field(default=(), compare=False)

    @property
    def total_count(self) -> int:
        return sum(1 for t in self.tuples if t.total)

    @property
    def partial_count(self) -> int:
        return len(self.tuples) - self.total_count

    def summary(self) -> str:
        return f"k={self.k} total={self.total_count} partial={self.partial_count}"


class SpecError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


def _ids_in(tuples: Iterable[KCommunityTuple], layer: str) -> set[int]:
    return {t.community(layer) for t in tuples} - {NULL, None}


def _expanded(cbg: CommunityBipartiteGraph) -> dict[tuple[int, int], frozenset]:
    return {(e.left, e.right): e.expanded for e in cbg.meta_edges}


def detect_k_community(
    h: HeMLN, spec: KCommunitySpec, assignments: Mapping[str, CommunityAssignment]
) -> KCommunityResult:
    violations = validate_spec(spec, h)
    if violations:
        raise SpecError(violations)
    missing = [name for name in spec.layers if name not in assignments]
    if missing:
        raise KeyError(f"no community assignment for layer(s) {missing}")
    assignments = dict(assignments)

    weights: dict[tuple[int, int, int], Fraction] = {}
    cbgs: list[CommunityBipartiteGraph] = []

    def couple(step: int, left: str, lids, right: str, rids) -> tuple[MatchPairs, dict]:
        cbg = build_cbg(h, left, lids, right, rids, assignments)
        cbg = weigh_cbg(cbg, spec.metric, assignments[left], assignments[right])
        cbgs.append(cbg)
        for e in cbg.meta_edges:
            weights[(step, e.left, e.right)] = e.weight
        return mwbc(cbg), _expanded(cbg)

    step_seconds: list[float] = []
    clock = time.perf_counter()
    left, right = spec.steps[0]
    mp, xs = couple(0, left, assignments[left].ids, right, assignments[right].ids)
    tuples: set[KCommunityTuple] = set()
    for c, ds in mp.items():
        for d in ds:
            tuples.add(
                KCommunityTuple(((left, c), (right, d)), (Coupling(0, left, right, xs[c, d]),))
            )
    processed = [left, right]
    step_seconds.append(time.perf_counter() - clock)

    for step, (left, right) in enumerate(spec.steps[1:], start=1):
        clock = time.perf_counter()
        is_new = right not in processed
        lids = _ids_in(tuples, left)
        rids = assignments[right].ids if is_new else _ids_in(tuples, right)
        mp, xs = couple(step, left, lids, right, rids)
        rewritten: set[KCommunityTuple] = set()
        for t in tuples:
            cl = t.community(left)
            matched = mp.get(cl, frozenset()) if cl else frozenset()
            if is_new:
                if matched:
                    for d in sorted(matched):
                        rewritten.add(t.extend(right, d, Coupling(step, left, right, xs[cl, d])))
                else:
                    rewritten.add(t.extend(right, NULL, Coupling(step, left, right, None)))
            else:
                cr = t.community(right)
                if cr and cr in matched:
                    rewritten.add(t.update(Coupling(step, left, right, xs[cl, cr])))
                else:
                    note = tuple(sorted(matched)) if cr and matched else None
                    rewritten.add(t.update(Coupling(step, left, right, None), note))
        tuples = rewritten
        if is_new:
            processed.append(right)
        step_seconds.append(time.perf_counter() - clock)

    ordered = tuple(sorted(tuples, key=KCommunityTuple.sort_key))
    return KCommunityResult(
        spec, ordered, len(processed), weights, tuple(cbgs), tuple(step_seconds)
    )


class RankKey(enum.Enum):
    TOTAL_FIRST = "total-first"
    COMMUNITY_SIZE_SUM = "size-sum"
    MIN_DENSITY = "min-density"
    COUPLING_WEIGHT_SUM = "weight-sum"


def rank_values(
    t: KCommunityTuple, result: KCommunityResult, assignments: Mapping[str, CommunityAssignment]
) -> dict[RankKey, Fraction]:
    stats = [assignments[layer].communities[c] for layer, c in t.communities if c != NULL]
    weight = Fraction(0)
    for cp in t.couplings:
        if cp.edges is not None:
            weight += result.weights.get(
                (cp.step, t.community(cp.left), t.community(cp.right)), Fraction(0)
            )
    return {
        RankKey.TOTAL_FIRST: Fraction(int(t.total)),
        RankKey.COMMUNITY_SIZE_SUM: Fraction(sum(s.size for s in stats)),
        RankKey.MIN_DENSITY: min((s.density for s in stats), default=Fraction(0)),
        RankKey.COUPLING_WEIGHT_SUM: weight,
    }


def rank(
    result: KCommunityResult,
    key: RankKey,
    assignments: Mapping[str, CommunityAssignment],
) -> list[KCommunityTuple]:
    """Tuples in descending ``key`` order; ties by community-id sequence."""
    return sorted(
        result.tuples,
        key=lambda t: (-rank_values(t, result, assignments)[key], t.sort_key()),
    )


def drill_down(
    t: KCommunityTuple, h: HeMLN, assignments: Mapping[str, CommunityAssignment]
) -> HeMLN:
    """Reconstruct the sub-network described by one result tuple."""
    layers: list[Layer] = []
    for name, cid in t.communities:
        if cid == NULL:
            continue
        layers.append(h.layers[name].induced(assignments[name].members(cid)))
    links = []
    for c in t.couplings:
        if c.edges is None:
            continue
        a, b = pair_key(c.left, c.right)
        edges = c.edges if (a, b) == (c.left, c.right) else frozenset((v, u) for u, v in c.edges)
        links.append(InterLayerGraph(a, b, edges))
    return HeMLN.build(layers, links)
