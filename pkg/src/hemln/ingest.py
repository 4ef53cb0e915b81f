"""Loading, building and exporting HeMLNs.

On-disk layout: a JSON manifest

    {"layers": [{"name": ..., "nodes_file": ..., "edges_file": ...}],
     "interlayer": [{"layer_a": ..., "layer_b": ..., "links_file": ...}]}

with paths relative to the manifest. Node files hold ``id<TAB>label``
lines (label optional), edge and link files hold ``id<TAB>id`` lines.
``#`` starts a comment.
"""

from __future__ import annotations

import bisect
import itertools
import json
import logging
from collections import Counter, defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from hemln.community import CommunityAssignment
from hemln.dsl import print_spec
from hemln.kcommunity import KCommunityResult, drill_down, rank_values
from hemln.network import HeMLN, InterLayerGraph, Layer, edge_key, validate_hemln

log = logging.getLogger(__name__)


class IngestError(ValueError):
    pass


@dataclass
class LoadReport:
    duplicates: dict[str, int] = field(default_factory=dict)
    self_loops: dict[str, int] = field(default_factory=dict)

    def lines(self) -> list[str]:
        out = [f"{f}: dropped {n} duplicate edge(s)" for f, n in sorted(self.duplicates.items())]
        out += [f"{f}: dropped {n} self-loop(s)" for f, n in sorted(self.self_loops.items())]
        return out


@dataclass(frozen=True)
class LayerEntry:
    name: str
    nodes_file: Path
    edges_file: Path


@dataclass(frozen=True)
class InterEntry:
    layer_a: str
    layer_b: str
    links_file: Path


@dataclass(frozen=True)
class Manifest:
    layers: tuple[LayerEntry, ...]
    interlayer: tuple[InterEntry, ...]

    @classmethod
    def read(cls, path: str | Path) -> Manifest:
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise IngestError(f"{path}: invalid manifest JSON: {exc}") from None
        base = path.parent
        try:
            layers = tuple(
                LayerEntry(d["name"], base / d["nodes_file"], base / d["edges_file"])
                for d in doc["layers"]
            )
            inter = tuple(
                InterEntry(d["layer_a"], d["layer_b"], base / d["links_file"])
                for d in doc.get("interlayer", [])
            )
        except (KeyError, TypeError) as exc:
            raise IngestError(f"{path}: malformed manifest, missing field {exc}") from None
        manifest = cls(layers, inter)
        manifest.check()
        return manifest

    def check(self) -> None:
        names = [e.name for e in self.layers]
        dupes = sorted(n for n, c in Counter(names).items() if c > 1)
        if dupes:
            raise IngestError(f"duplicate layer names in manifest: {dupes}")
        for f in [p for e in self.layers for p in (e.nodes_file, e.edges_file)] + [
            e.links_file for e in self.interlayer
        ]:
            if not f.is_file():
                raise FileNotFoundError(f"manifest references missing file {f}")


def _records(path: Path) -> Iterable[tuple[int, str]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].rstrip("\r\n")
            if not line.strip():
                continue
            yield lineno, line


def _node_id(token: str, path: Path, lineno: int) -> int:
    try:
        v = int(token)
    except ValueError:
        raise IngestError(f"{path}:{lineno}: unparseable node id {token!r}") from None
    if v < 0:
        raise IngestError(f"{path}:{lineno}: negative node id {v}")
    return v


def _read_nodes(path: Path) -> dict[int, str | None]:
    nodes: dict[int, str | None] = {}
    for lineno, line in _records(path):
        head, _, label = line.strip().partition("\t")
        v = _node_id(head.strip(), path, lineno)
        nodes[v] = label.strip() or None
    return nodes


def _read_pairs(path: Path) -> Iterable[tuple[int, int, int]]:
    for lineno, line in _records(path):
        parts = line.split()
        if len(parts) != 2:
            raise IngestError(f"{path}:{lineno}: expected two node ids, got {line!r}")
        yield lineno, _node_id(parts[0], path, lineno), _node_id(parts[1], path, lineno)


def load_hemln(manifest: Manifest | str | Path) -> tuple[HeMLN, LoadReport]:
    if not isinstance(manifest, Manifest):
        manifest = Manifest.read(manifest)
    report = LoadReport()
    layers = []
    for entry in manifest.layers:
        nodes = _read_nodes(entry.nodes_file)
        edges: set[tuple[int, int]] = set()
        dupes = loops = 0
        for lineno, u, v in _read_pairs(entry.edges_file):
            for x in (u, v):
                if x not in nodes:
                    raise IngestError(
                        f"{entry.edges_file}:{lineno}: node {x} not in layer {entry.name!r}"
                    )
            if u == v:
                loops += 1
                continue
            k = edge_key(u, v)
            if k in edges:
                dupes += 1
            edges.add(k)
        if dupes:
            report.duplicates[str(entry.edges_file)] = dupes
        if loops:
            report.self_loops[str(entry.edges_file)] = loops
        labels = {v: lab for v, lab in nodes.items() if lab is not None}
        layers.append(Layer(entry.name, frozenset(nodes), frozenset(edges), labels))

    by_name = {layer.name: layer for layer in layers}
    inter = []
    for entry in manifest.interlayer:
        for name in (entry.layer_a, entry.layer_b):
            if name not in by_name:
                raise IngestError(f"{entry.links_file}: unknown layer {name!r}")
        nodes_a = by_name[entry.layer_a].nodes
        nodes_b = by_name[entry.layer_b].nodes
        links: set[tuple[int, int]] = set()
        dupes = 0
        for lineno, a, b in _read_pairs(entry.links_file):
            if a not in nodes_a or b not in nodes_b:
                raise IngestError(
                    f"{entry.links_file}:{lineno}: link ({a}, {b}) endpoint not in "
                    f"layers {entry.layer_a!r}/{entry.layer_b!r}"
                )
            if (a, b) in links:
                dupes += 1
            links.add((a, b))
        if dupes:
            report.duplicates[str(entry.links_file)] = dupes
        inter.append(InterLayerGraph(entry.layer_a, entry.layer_b, frozenset(links)))

    try:
        h = HeMLN.build(layers, inter)
    except ValueError as exc:
        raise IngestError(str(exc)) from None
    problems = validate_hemln(h)
    if problems:
        raise IngestError("; ".join(problems[:10]))
    for line in report.lines():
        log.info(line)
    return h, report


def write_layer(layer: Layer, directory: Path) -> tuple[str, str]:
    nodes_name = f"{layer.name}.nodes.tsv"
    edges_name = f"{layer.name}.edges.tsv"
    with open(directory / nodes_name, "w", encoding="utf-8") as fh:
        for v in sorted(layer.nodes):
            label = layer.labels.get(v)
            fh.write(f"{v}\t{label}\n" if label else f"{v}\n")
    with open(directory / edges_name, "w", encoding="utf-8") as fh:
        for u, v in sorted(layer.edges):
            fh.write(f"{u}\t{v}\n")
    return nodes_name, edges_name


def write_hemln(h: HeMLN, directory: str | Path) -> Path:
    """Write ``h`` as a manifest plus edge-list files; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    doc: dict[str, list] = {"layers": [], "interlayer": []}
    for name in sorted(h.layers):
        nodes_name, edges_name = write_layer(h.layers[name], directory)
        doc["layers"].append({"name": name, "nodes_file": nodes_name, "edges_file": edges_name})
    for key in sorted(h.interlayer):
        g = h.interlayer[key]
        links_name = f"{g.layer_a}__{g.layer_b}.links.tsv"
        with open(directory / links_name, "w", encoding="utf-8") as fh:
            for a, b in sorted(g.links):
                fh.write(f"{a}\t{b}\n")
        doc["interlayer"].append(
            {"layer_a": g.layer_a, "layer_b": g.layer_b, "links_file": links_name}
        )
    path = directory / "manifest.json"
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return path


# -- layer builders ---------------------------------------------------------


def pearson_layer(
    features: Mapping[int, Sequence[float]],
    threshold: float,
    name: str = "layer",
    labels: Mapping[int, str] | None = None,
    block: int = 2048,
) -> Layer:
    """Similarity layer: connect rows whose Pearson correlation >= threshold.

    Rows with zero variance get no edges.
    """
    if not -1.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [-1, 1], got {threshold}")
    ids = sorted(features)
    dims = {len(features[v]) for v in ids}
    if len(dims) > 1:
        raise ValueError(f"feature vector length mismatch: {sorted(dims)}")
    if dims and dims.pop() < 2:
        raise ValueError("feature vectors need at least two components")
    edges: list[tuple[int, int]] = []
    if ids:
        x = np.asarray([features[v] for v in ids], dtype=np.float64)
        x = x - x.mean(axis=1, keepdims=True)
        norms = np.sqrt((x * x).sum(axis=1))
        live = np.flatnonzero(norms > 0)
        z = x[live] / norms[live, None]
        idx = np.asarray(ids)[live]
        for start in range(0, len(z), block):
            r = z[start : start + block] @ z.T
            rows, cols = np.nonzero(r >= threshold)
            keep = cols > rows + start
            for i, j in zip(rows[keep] + start, cols[keep]):
                edges.append((int(idx[i]), int(idx[j])))
    return Layer.build(name, ids, edges, labels)


def cooccurrence_layer(
    incidence: Iterable[tuple[int, object]],
    min_count: int,
    name: str = "layer",
    labels: Mapping[int, str] | None = None,
) -> Layer:
    """Connect entities that share at least ``min_count`` events."""
    if min_count < 1:
        raise ValueError("min_count must be positive")
    by_event: dict[object, set[int]] = defaultdict(set)
    entities: set[int] = set()
    for entity, event in incidence:
        by_event[event].add(entity)
        entities.add(entity)
    shared: Counter[tuple[int, int]] = Counter()
    for members in by_event.values():
        shared.update(itertools.combinations(sorted(members), 2))
    edges = [pair for pair, n in shared.items() if n >= min_count]
    return Layer.build(name, entities, edges, labels)


def range_layer(
    values: Mapping[int, float],
    breakpoints: Sequence[float],
    name: str = "layer",
    labels: Mapping[int, str] | None = None,
) -> Layer:
    """Connect nodes whose values fall in the same bin.

    Bins are ``[b_i, b_i+1)`` with the last bin closed on the right.
    """
    bps = list(breakpoints)
    if len(bps) < 2 or any(a >= b for a, b in zip(bps, bps[1:])):
        raise ValueError("breakpoints must be strictly ascending with at least two entries")
    bins: dict[int, list[int]] = defaultdict(list)
    for v in sorted(values):
        x = values[v]
        if not bps[0] <= x <= bps[-1]:
            raise ValueError(f"value {x} of node {v} outside range [{bps[0]}, {bps[-1]}]")
        i = min(bisect.bisect_right(bps, x) - 1, len(bps) - 2)
        bins[i].append(v)
    edges = [pair for members in bins.values() for pair in itertools.combinations(members, 2)]
    return Layer.build(name, values, edges, labels)


# -- result export ----------------------------------------------------------


def _num(x) -> float | int:
    return int(x) if x.denominator == 1 else float(x)


def result_document(
    result: KCommunityResult, h: HeMLN, assignments: Mapping[str, CommunityAssignment]
) -> dict:
    tuples = []
    for t in result.tuples:
        couplings = []
        for c in t.couplings:
            entry: dict = {"step": c.step, "left": c.left, "right": c.right}
            if c.edges is None:
                entry["edges"] = None
            else:
                pairs = sorted(c.edges)
                entry["edges"] = [list(p) for p in pairs]
                labels = [[h.label(a), h.label(b)] for a, b in pairs]
                if any(x is not None for pair in labels for x in pair):
                    entry["labels"] = labels
            couplings.append(entry)
        doc = {
            "communities": [{"layer": layer, "id": cid} for layer, cid in t.communities],
            "couplings": couplings,
            "total": t.total,
            "rank": {k.value: _num(v) for k, v in rank_values(t, result, assignments).items()},
        }
        if t.diagnostics:
            doc["inconsistent"] = [
                {"step": step, "matched": list(ids)} for step, ids in t.diagnostics
            ]
        tuples.append(doc)
    return {
        "spec": print_spec(result.spec),
        "k": result.k,
        "total_count": result.total_count,
        "partial_count": result.partial_count,
        "tuples": tuples,
    }


def export_result(
    result: KCommunityResult,
    h: HeMLN,
    assignments: Mapping[str, CommunityAssignment],
    out: str | Path,
    fmt: str = "json",
) -> list[Path]:
    """Write ``result`` as a JSON document or as per-tuple edge-list directories."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path = out / "result.json"
        text = json.dumps(result_document(result, h, assignments), indent=2)
        path.write_text(text + "\n", encoding="utf-8")
        return [path]
    if fmt == "edge-lists":
        written = []
        for i, t in enumerate(result.tuples, start=1):
            written.append(write_hemln(drill_down(t, h, assignments), out / f"tuple_{i:04d}"))
        return written
    raise ValueError(f"unknown export format {fmt!r}")
