"""Linearized k-community expressions.

Grammar (whitespace between tokens is ignored)::

    spec   := layer step+ ";" metric
    step   := "@(" layer "," layer ")" layer
    layer  := [A-Za-z_][A-Za-z0-9_]*
    metric := "we" | "wd" | "wh"

``@(i,j)`` composes layer ``i`` (already processed) with layer ``j``; the
layer written after it must be ``j``. Example: ``M @(M,A) A @(A,D) D ; we``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from hemln.coupling import WeightMetric
from hemln.network import HeMLN, layer_adjacency, pair_key


@dataclass(frozen=True)
class KCommunitySpec:
    start: str
    steps: tuple[tuple[str, str], ...]
    metric: WeightMetric

    @property
    def layers(self) -> list[str]:
        """Distinct layers in order of first appearance."""
        seen = [self.start]
        for a, b in self.steps:
            for name in (a, b):
                if name not in seen:
                    seen.append(name)
        return seen

    def __str__(self) -> str:
        return print_spec(self)


class SpecSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_SPACE = re.compile(r"\s*")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self) -> None:
        self.pos = _SPACE.match(self.text, self.pos).end()

    def expect(self, literal: str) -> None:
        self.skip()
        if not self.text.startswith(literal, self.pos):
            found = self.text[self.pos : self.pos + 1] or "end of input"
            raise SpecSyntaxError(f"expected {literal!r}, found {found!r}", self.pos)
        self.pos += len(literal)

    def ident(self, what: str = "layer name") -> tuple[str, int]:
        self.skip()
        m = _IDENT.match(self.text, self.pos)
        if m is None:
            found = self.text[self.pos : self.pos + 1] or "end of input"
            raise SpecSyntaxError(f"expected {what}, found {found!r}", self.pos)
        self.pos = m.end()
        return m.group(), m.start()

    def peek(self, literal: str) -> bool:
        self.skip()
        return self.text.startswith(literal, self.pos)

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)


def parse_spec(source: str | bytes) -> KCommunitySpec:
    """Parse a k-community expression; raises :class:`SpecSyntaxError`."""
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode("ascii")
        except UnicodeDecodeError as exc:
            raise SpecSyntaxError("non-ASCII byte in spec", exc.start) from None
    sc = _Scanner(source)
    start, _ = sc.ident()
    processed = [start]
    prev = start
    steps: list[tuple[str, str]] = []
    while sc.peek("@"):
        at = sc.pos
        sc.expect("@")
        sc.expect("(")
        left, left_pos = sc.ident()
        sc.expect(",")
        right, _ = sc.ident()
        sc.expect(")")
        operand, operand_pos = sc.ident()
        if left not in processed:
            raise SpecSyntaxError(
                f"step left layer {left} not the written predecessor {prev} "
                "and not previously processed",
                left_pos,
            )
        if left == right:
            raise SpecSyntaxError(f"step composes layer {left} with itself", at)
        if operand != right:
            raise SpecSyntaxError(
                f"operand {operand} does not match step subscript {right}", operand_pos
            )
        steps.append((left, right))
        if right not in processed:
            processed.append(right)
        prev = operand
    if not steps:
        raise SpecSyntaxError("expected at least one '@(left,right)' step", sc.pos)
    sc.expect(";")
    token, token_pos = sc.ident("metric")
    try:
        metric = WeightMetric.from_token(token)
    except ValueError as exc:
        raise SpecSyntaxError(str(exc), token_pos) from None
    if not sc.at_end():
        raise SpecSyntaxError("trailing input after metric", sc.pos)
    return KCommunitySpec(start, tuple(steps), metric)


def print_spec(spec: KCommunitySpec) -> str:
    parts = [spec.start]
    for a, b in spec.steps:
        parts.append(f"@({a},{b}) {b}")
    return " ".join(parts) + f" ; {spec.metric.value}"


def validate_spec(spec: KCommunitySpec, h: HeMLN) -> list[str]:
    """Check a parsed spec against a network; returns violations (empty if ok)."""
    problems: list[str] = []
    adjacency = layer_adjacency(h)
    for name in spec.layers:
        if name not in adjacency.nodes:
            problems.append(f"unknown layer {name}")
    if not spec.steps:
        problems.append("spec has no composition steps")
        return problems
    if spec.steps[0][0] != spec.start:
        problems.append(f"first step left layer {spec.steps[0][0]} is not the start layer {spec.start}")
    processed = {spec.start}
    seen_pairs: set[tuple[str, str]] = set()
    for i, (a, b) in enumerate(spec.steps):
        if a not in processed:
            problems.append(f"step {i} ({a},{b}): left layer not in processed set")
        if a == b:
            problems.append(f"step {i} ({a},{b}): layer composed with itself")
        key = pair_key(a, b)
        if key not in adjacency.edges:
            problems.append(f"step {i} ({a},{b}): layers not coupled")
        if key in seen_pairs:
            problems.append(f"step {i} ({a},{b}): layer pair repeated")
        seen_pairs.add(key)
        processed.update((a, b))

    # connectedness of the step-pair subgraph
    reach = {spec.start}
    frontier = True
    while frontier:
        frontier = False
        for a, b in spec.steps:
            if (a in reach) != (b in reach):
                reach.update((a, b))
                frontier = True
    stray = [name for name in spec.layers if name not in reach]
    if stray:
        problems.append(f"step pairs do not form a connected subgraph: {stray} unreachable")
    return problems
