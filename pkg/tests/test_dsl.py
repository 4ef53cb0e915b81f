import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hemln.coupling import WeightMetric
from hemln.dsl import KCommunitySpec, SpecSyntaxError, parse_spec, print_spec, validate_spec
from hemln.network import HeMLN, InterLayerGraph, Layer


def test_parse_imdb_cycle():
    spec = parse_spec("M @(M,A) A @(A,D) D @(D,M) M ; we")
    assert spec.start == "M"
    assert spec.steps == (("M", "A"), ("A", "D"), ("D", "M"))
    assert spec.metric is WeightMetric.EDGE_COUNT
    assert spec.layers == ["M", "A", "D"]


def test_parse_dblp_pair():
    spec = parse_spec("P @(P,Au) Au ; wd")
    assert (spec.start, spec.steps, spec.metric) == ("P", (("P", "Au"),), WeightMetric.DENSITY)


def test_parse_rejects_unprocessed_left():
    with pytest.raises(SpecSyntaxError) as info:
        parse_spec("P @(Au,Y) Y ; we")
    assert "step left layer Au not the written predecessor P and not previously processed" in str(
        info.value
    )
    assert info.value.position == 4


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("A @(A,B) C ; we", "does not match"),
        ("A @(A,B) B ; wx", "unknown metric"),
        ("A ; we", "at least one"),
        ("A @(A,A) A ; we", "itself"),
        ("A @(A,B) B ; we extra", "trailing"),
        ("A @(A,B B ; we", r"expected '\)'"),
        ("", "expected layer name"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(SpecSyntaxError, match=fragment):
        parse_spec(text)


def test_print_canonical():
    spec = KCommunitySpec("P", (("P", "Au"),), WeightMetric.DENSITY)
    assert print_spec(spec) == "P @(P,Au) Au ; wd"
    text = "M @(M,A) A @(A,D) D @(D,M) M ; we"
    assert print_spec(parse_spec(text)) == text


def test_whitespace_collapses():
    assert print_spec(parse_spec("  P@( P ,Au )\n\tAu;wd ")) == "P @(P,Au) Au ; wd"


def test_bytes_input():
    assert parse_spec(b"P @(P,Au) Au ; wd").start == "P"
    with pytest.raises(SpecSyntaxError) as info:
        parse_spec(b"P \xff")
    assert info.value.position == 2


def _imdb():
    layers = [Layer.build(n, [i], []) for i, n in enumerate("MAD")]
    pairs = [("M", "A"), ("A", "D"), ("D", "M")]
    return HeMLN.build(layers, [InterLayerGraph(a, b, frozenset()) for a, b in pairs])


def test_validate_ok():
    assert validate_spec(parse_spec("M @(M,A) A @(A,D) D @(D,M) M ; we"), _imdb()) == []


def test_validate_uncoupled():
    layers = [Layer.build(n, [i], []) for i, n in enumerate("ABC")]
    h = HeMLN.build(layers, [InterLayerGraph("A", "B", frozenset())])
    problems = validate_spec(parse_spec("A @(A,B) B @(B,C) C ; we"), h)
    assert any("layers not coupled" in p for p in problems)


def test_validate_unprocessed_left():
    spec = KCommunitySpec("M", (("M", "A"), ("D", "M")), WeightMetric.EDGE_COUNT)
    problems = validate_spec(spec, _imdb())
    assert any("left layer not in processed set" in p for p in problems)


def test_validate_repeated_pair_and_unknown_layer():
    spec = KCommunitySpec("M", (("M", "A"), ("A", "M")), WeightMetric.EDGE_COUNT)
    assert any("repeated" in p for p in validate_spec(spec, _imdb()))
    spec = KCommunitySpec("M", (("M", "Z"),), WeightMetric.EDGE_COUNT)
    assert any("unknown layer Z" in p for p in validate_spec(spec, _imdb()))


names = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,4}", fullmatch=True)


@st.composite
def valid_specs(draw):
    pool = draw(st.lists(names, min_size=2, max_size=6, unique=True))
    processed = [pool[0]]
    steps = []
    for _ in range(draw(st.integers(1, 6))):
        left = draw(st.sampled_from(processed))
        right = draw(st.sampled_from([p for p in pool if p != left]))
        steps.append((left, right))
        if right not in processed:
            processed.append(right)
    return KCommunitySpec(pool[0], tuple(steps), draw(st.sampled_from(list(WeightMetric))))


@settings(max_examples=300)
@given(valid_specs())
def test_round_trip(spec):
    text = print_spec(spec)
    assert parse_spec(text) == spec
    assert print_spec(parse_spec(text)) == text


@settings(max_examples=300)
@given(st.binary(max_size=64))
def test_fuzz_bytes_never_crash(data):
    try:
        parse_spec(data)
    except SpecSyntaxError as exc:
        assert 0 <= exc.position <= len(data)


@settings(max_examples=300)
@given(st.text(alphabet="AB@(),; \twedh_1", max_size=40))
def test_fuzz_near_miss_text(text):
    try:
        parse_spec(text)
    except SpecSyntaxError as exc:
        assert 0 <= exc.position <= len(text)
