import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hemln.dsl import parse_spec
from hemln.ingest import (
    IngestError,
    Manifest,
    cooccurrence_layer,
    export_result,
    load_hemln,
    pearson_layer,
    range_layer,
    write_hemln,
)
from hemln.kcommunity import detect_k_community

from fixtures import path_fixture


def write_fixture(tmp_path, edges_a="1\t2\n2\t3\n", links="1\t10\n"):
    (tmp_path / "a.nodes").write_text("# actors\n1\tAlice\n2\tBob\n3\n")
    (tmp_path / "a.edges").write_text(edges_a)
    (tmp_path / "b.nodes").write_text("10\tMovie X\n11\n")
    (tmp_path / "b.edges").write_text("10 11\n")
    (tmp_path / "ab.links").write_text(links)
    manifest = {
        "layers": [
            {"name": "A", "nodes_file": "a.nodes", "edges_file": "a.edges"},
            {"name": "B", "nodes_file": "b.nodes", "edges_file": "b.edges"},
        ],
        "interlayer": [{"layer_a": "A", "layer_b": "B", "links_file": "ab.links"}],
    }
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(manifest))
    return path


def test_load_fixture(tmp_path):
    h, report = load_hemln(write_fixture(tmp_path))
    assert len(h.layers["A"].nodes) == 3 and len(h.layers["A"].edges) == 2
    assert len(h.layers["B"].nodes) == 2 and len(h.layers["B"].edges) == 1
    assert h.links("A", "B") == {(1, 10)}
    assert h.label(1) == "Alice" and h.label(10) == "Movie X" and h.label(3) is None
    assert report.lines() == []


def test_load_dedupes_and_reports(tmp_path):
    h, report = load_hemln(write_fixture(tmp_path, edges_a="1\t2\n2\t1\n3 3\n"))
    assert h.layers["A"].edges == {(1, 2)}
    assert list(report.duplicates.values()) == [1]
    assert list(report.self_loops.values()) == [1]


def test_load_unknown_link_endpoint(tmp_path):
    with pytest.raises(IngestError, match=r"ab.links:2: link \(1, 99\)"):
        load_hemln(write_fixture(tmp_path, links="1\t10\n1\t99\n"))


def test_load_unparseable_line(tmp_path):
    with pytest.raises(IngestError, match=r"a.edges:1"):
        load_hemln(write_fixture(tmp_path, edges_a="1\tx\n"))


def test_manifest_missing_file(tmp_path):
    path = write_fixture(tmp_path)
    (tmp_path / "b.edges").unlink()
    with pytest.raises(FileNotFoundError):
        Manifest.read(path)


def test_round_trip(tmp_path):
    (tmp_path / "src").mkdir()
    h, _ = load_hemln(write_fixture(tmp_path / "src"))
    again, _ = load_hemln(write_hemln(h, tmp_path / "copy"))
    assert again == h
    assert {v: again.label(v) for v in again.node_layer} == {v: h.label(v) for v in h.node_layer}


def test_round_trip_fixture_network(tmp_path):
    h, _ = path_fixture()
    again, _ = load_hemln(write_hemln(h, tmp_path))
    assert again == h


def test_pearson_examples():
    layer = pearson_layer({1: [1, 2, 3], 2: [2, 4, 6], 3: [3, 2, 1], 4: [5, 5, 5]}, 0.9)
    assert layer.edges == {(1, 2)}


def test_pearson_length_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        pearson_layer({1: [1, 2, 3], 2: [1, 2]}, 0.9)


def test_pearson_matches_numpy_reference():
    rng = np.random.default_rng(3)
    data = rng.integers(0, 6, size=(40, 8)).astype(float)
    features = {i: list(row) for i, row in enumerate(data)}
    layer = pearson_layer(features, 0.6, block=7)
    expected = set()
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.corrcoef(data)
    for i in range(40):
        for j in range(i + 1, 40):
            if np.isfinite(corr[i, j]) and corr[i, j] >= 0.6 + 1e-12:
                expected.add((i, j))
            elif np.isfinite(corr[i, j]) and corr[i, j] >= 0.6 - 1e-12:
                pytest.skip("borderline correlation")
    assert layer.edges == expected


vectors = st.dictionaries(
    st.integers(0, 30), st.lists(st.integers(0, 5), min_size=4, max_size=4), min_size=2, max_size=15
)


@settings(max_examples=50, deadline=None)
@given(vectors, st.floats(-1, 1), st.floats(-1, 1))
def test_pearson_monotone_in_threshold(features, t1, t2):
    lo, hi = sorted((t1, t2))
    low = pearson_layer(features, lo)
    high = pearson_layer(features, hi)
    assert high.edges <= low.edges
    assert all(u < v for u, v in low.edges)


def test_cooccurrence_examples():
    inc = [(1, "p1"), (2, "p1"), (1, "p2"), (2, "p2"), (1, "p3"), (2, "p3"), (3, "p1"), (3, "p2")]
    layer = cooccurrence_layer(inc, 3)
    assert layer.edges == {(1, 2)}
    assert layer.nodes == {1, 2, 3}
    assert cooccurrence_layer([], 3).edges == frozenset()


@settings(max_examples=50)
@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 5)), max_size=40))
def test_cooccurrence_containment(inc):
    assert cooccurrence_layer(inc, 2).edges <= cooccurrence_layer(inc, 1).edges


def test_range_examples():
    bps = list(range(11))
    assert range_layer({1: 6.1, 2: 6.9, 3: 7.2}, bps).edges == {(1, 2)}
    assert range_layer({1: 3.1, 2: 3.5, 3: 3.9}, bps).edges == {(1, 2), (1, 3), (2, 3)}
    assert range_layer({1: 10.0, 2: 9.2}, bps).edges == {(1, 2)}
    with pytest.raises(ValueError, match="outside"):
        range_layer({1: 10.5}, bps)


def test_export_json_document(tmp_path):
    h, asg = path_fixture()
    result = detect_k_community(h, parse_spec("A @(A,B) B @(B,C) C ; we"), asg)
    (path,) = export_result(result, h, asg, tmp_path, "json")
    doc = json.loads(path.read_text())
    assert doc["spec"] == "A @(A,B) B @(B,C) C ; we"
    assert doc["k"] == 3
    assert len(doc["tuples"]) == 2
    first = doc["tuples"][0]
    assert first["total"] is True
    assert first["communities"] == [
        {"layer": "A", "id": 1}, {"layer": "B", "id": 1}, {"layer": "C", "id": 1}
    ]
    assert [len(c["edges"]) for c in first["couplings"]] == [2, 1]
    assert first["rank"]["size-sum"] == 9


def test_export_edge_lists(tmp_path):
    h, asg = path_fixture()
    result = detect_k_community(h, parse_spec("A @(A,B) B @(B,C) C ; we"), asg)
    paths = export_result(result, h, asg, tmp_path, "edge-lists")
    assert [p.parent.name for p in paths] == ["tuple_0001", "tuple_0002"]
    sub, _ = load_hemln(paths[0])
    assert set(sub.layers) == {"A", "B", "C"}


def test_export_empty_result(tmp_path):
    h, asg = path_fixture()
    result = detect_k_community(h, parse_spec("B @(B,C) C ; we"), asg)
    result = type(result)(result.spec, (), result.k)
    (path,) = export_result(result, h, asg, tmp_path, "json")
    assert json.loads(path.read_text())["tuples"] == []


def test_export_unwritable(tmp_path):
    h, asg = path_fixture()
    result = detect_k_community(h, parse_spec("A @(A,B) B ; we"), asg)
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        export_result(result, h, asg, blocker / "out", "json")
