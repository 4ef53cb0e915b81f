"""Small handcrafted HeMLNs shared by the unit and acceptance tests."""

from __future__ import annotations

import itertools

from hemln.community import CommunityAssignment
from hemln.network import HeMLN, InterLayerGraph, Layer, pair_key


def clique_hemln(layers, couplings, pairs=None):
    """HeMLN whose communities are cliques.

    ``layers``: {layer: {community id: [members]}}.
    ``couplings``: {(left layer, left id, right layer, right id): link count};
    links are drawn from the member product in order.
    ``pairs``: extra coupled layer pairs with no links.
    Returns ``(h, assignments)``.
    """
    built = {}
    for name, groups in layers.items():
        nodes = [v for members in groups.values() for v in members]
        edges = [e for members in groups.values() for e in itertools.combinations(members, 2)]
        built[name] = Layer.build(name, nodes, edges)
    links: dict[tuple[str, str], set] = {pair_key(a, b): set() for a, b in (pairs or [])}
    for (la, ca, lb, cb), count in couplings.items():
        key = pair_key(la, lb)
        product = list(itertools.product(layers[la][ca], layers[lb][cb]))
        if count > len(product):
            raise ValueError("too many links requested")
        chosen = product[:count]
        if key != (la, lb):
            chosen = [(b, a) for a, b in chosen]
        links.setdefault(key, set()).update(chosen)
    inter = [InterLayerGraph(a, b, frozenset(s)) for (a, b), s in links.items()]
    h = HeMLN.build(built.values(), inter)
    assignments = {
        name: CommunityAssignment.from_groups(built[name], groups) for name, groups in layers.items()
    }
    return h, assignments


def path_fixture(with_bc=True):
    """Layers A, B, C in a path.

    A = {a1, a2}, B = {b1}, C = {c1}; a1-b1 has 2 links, a2-b1 1 link and
    b1-c1 1 link (dropped when ``with_bc`` is false).
    """
    couplings = {("A", 1, "B", 1): 2, ("A", 2, "B", 1): 1}
    if with_bc:
        couplings[("B", 1, "C", 1)] = 1
    return clique_hemln(
        {"A": {1: [1, 2, 3], 2: [4, 5, 6]}, "B": {1: [10, 11, 12]}, "C": {1: [20, 21, 22]}},
        couplings,
        pairs=[("B", "C")],
    )


def cyclic_inconsistent_fixture():
    """Triangle HeMLN where C -> A prefers the other A community.

    Spec A @(A,B) B @(B,C) C @(C,A) A gives <a1,b1,c1> (inconsistent at the
    closing step) and <a2,b1,c1> (consistent).
    """
    return clique_hemln(
        {"A": {1: [1, 2, 3], 2: [4, 5, 6]}, "B": {1: [10, 11, 12]}, "C": {1: [20, 21, 22]}},
        {
            ("A", 1, "B", 1): 2,
            ("A", 2, "B", 1): 1,
            ("B", 1, "C", 1): 1,
            ("C", 1, "A", 2): 2,
            ("C", 1, "A", 1): 1,
        },
    )


def order_fixture():
    """A Θ B Θ C pairs a1 with b1; C Θ B Θ A pairs c1 with b2."""
    return clique_hemln(
        {"A": {1: [1, 2, 3]}, "B": {1: [10, 11, 12], 2: [13, 14, 15]}, "C": {1: [20, 21, 22]}},
        {
            ("A", 1, "B", 1): 3,
            ("A", 1, "B", 2): 1,
            ("C", 1, "B", 2): 3,
            ("C", 1, "B", 1): 1,
        },
    )
