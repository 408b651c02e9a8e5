import itertools
import random

import pytest

from abinitio import (
    Graph,
    OutsideK0,
    SizeCeilingExceeded,
    closure,
    delta,
    delta_rel,
    dimension,
    geometric_closure_bounded,
    is_in_k0,
    is_self_sufficient,
    orientation_witness,
    strong_embeddings,
)
from oracles import (
    brute_closed,
    brute_closure,
    brute_delta,
    brute_dimension,
    brute_in_k0,
)


def random_graph(rng, n, m=2, p=0.5, prefix="v"):
    names = [f"{prefix}{i}" for i in range(n)]
    edges = [e for e in itertools.combinations(names, 2) if rng.random() < p]
    return Graph(m, names, edges)


def k_complete(n, m=2, prefix="v"):
    names = [f"{prefix}{i}" for i in range(n)]
    return Graph(m, names, itertools.combinations(names, 2))


def test_delta_matches_direct_count():
    rng = random.Random(11)
    for _ in range(60):
        g = random_graph(rng, rng.randint(0, 8), m=rng.choice([2, 3]), p=rng.random())
        s = frozenset(v for v in g.vertices if rng.random() < 0.6)
        assert delta(g, s) == brute_delta(g, s)


def test_delta_rel_is_difference_of_counts():
    rng = random.Random(12)
    for _ in range(40):
        g = random_graph(rng, rng.randint(2, 8), p=0.5)
        verts = g.sorted_vertices()
        cut = rng.randint(1, len(verts) - 1)
        b, a = frozenset(verts[:cut]), frozenset(verts[cut:])
        assert delta_rel(g, b, a) == delta(g, a | b) - delta(g, a)
    with pytest.raises(ValueError):
        delta_rel(g, [verts[0]], [verts[0]])


def test_k0_membership_examples():
    assert is_in_k0(k_complete(5))          # 2*5 - 10 = 0
    assert not is_in_k0(k_complete(6))      # 2*6 - 15 < 0
    assert is_in_k0(k_complete(6, m=3))
    assert is_in_k0(Graph(2, [], []))


def test_k0_fast_path_agrees_with_subset_scan():
    rng = random.Random(13)
    for _ in range(150):
        g = random_graph(rng, rng.randint(0, 7), m=rng.choice([2, 3]), p=rng.random())
        assert is_in_k0(g) == brute_in_k0(g)


def test_orientation_witness_is_valid():
    rng = random.Random(14)
    seen = 0
    while seen < 30:
        g = random_graph(rng, rng.randint(1, 8), p=0.5)
        if not is_in_k0(g):
            continue
        seen += 1
        w = orientation_witness(g)
        outdeg = {}
        covered = set()
        for origin, other in w.orientation:
            assert g.has_edge(origin, other)
            outdeg[origin] = outdeg.get(origin, 0) + 1
            covered.add(tuple(sorted((origin, other))))
        assert covered == set(g.sorted_edges())
        assert all(d <= g.m for d in outdeg.values())
        assert w.max_outdegree == max(outdeg.values(), default=0)
    with pytest.raises(OutsideK0):
        orientation_witness(k_complete(6))


def test_self_sufficiency_against_subset_scan():
    rng = random.Random(15)
    for _ in range(120):
        g = random_graph(rng, rng.randint(1, 7), m=rng.choice([2, 3]), p=rng.random())
        s = frozenset(v for v in g.vertices if rng.random() < 0.5)
        assert is_self_sufficient(g, s) == brute_closed(g, s)


def test_whole_graph_and_empty_set_are_self_sufficient():
    g = k_complete(5)
    assert is_self_sufficient(g, g.vertices)
    assert is_self_sufficient(g, frozenset())


def test_closure_matches_brute_force():
    rng = random.Random(16)
    seen = 0
    while seen < 80:
        g = random_graph(rng, rng.randint(1, 7), p=rng.random() * 0.8)
        if not is_in_k0(g):
            continue
        seen += 1
        a = frozenset(v for v in g.vertices if rng.random() < 0.4)
        assert closure(g, a).closure == brute_closure(g, a)


def test_closure_chain_strictly_decreases_the_count():
    rng = random.Random(17)
    seen = 0
    while seen < 40:
        g = random_graph(rng, rng.randint(2, 8), p=0.6)
        if not is_in_k0(g):
            continue
        seen += 1
        a = frozenset(v for v in g.vertices if rng.random() < 0.3)
        res = closure(g, a)
        assert res.witness_chain[0] == a
        assert res.witness_chain[-1] == res.closure
        counts = [delta(g, step) for step in res.witness_chain]
        assert all(x > y for x, y in zip(counts, counts[1:]))
        assert is_self_sufficient(g, res.closure)


def test_closure_is_monotone_and_idempotent():
    rng = random.Random(18)
    seen = 0
    while seen < 30:
        g = random_graph(rng, rng.randint(2, 7), p=0.6)
        if not is_in_k0(g):
            continue
        seen += 1
        verts = g.sorted_vertices()
        a = frozenset(v for v in verts if rng.random() < 0.3)
        b = a | frozenset(v for v in verts if rng.random() < 0.3)
        ca, cb = closure(g, a).closure, closure(g, b).closure
        assert ca <= cb
        assert closure(g, ca).closure == ca


def test_single_vertex_in_k4_is_already_closed():
    # counts: point 2, pair 3, triple 3, whole 2; nothing goes below 2
    g = k_complete(4)
    assert closure(g, ["v0"]).closure == frozenset({"v0"})


def test_closure_absorbs_a_whole_block():
    g = k_complete(5)
    extra = Graph(2, list(g.vertices) + ["w"],
                  list(g.edges) + [("w", "v0"), ("w", "v1")])
    assert closure(extra, ["w"]).closure == extra.vertices


def test_closure_preconditions():
    with pytest.raises(OutsideK0):
        closure(k_complete(6), ["v0"])
    with pytest.raises(SizeCeilingExceeded):
        closure(k_complete(5), ["v0"], max_ambient=3)


def test_dimension_examples_and_brute_agreement():
    rng = random.Random(19)
    g = k_complete(5)
    assert dimension(g, g.vertices) == 0
    # a pair inside the block closes over the whole block
    assert dimension(g, ["v0", "v1"]) == 0
    assert dimension(k_complete(4), ["v0"]) == 2
    seen = 0
    while seen < 30:
        h = random_graph(rng, rng.randint(1, 7), p=0.5)
        if not is_in_k0(h):
            continue
        seen += 1
        a = frozenset(v for v in h.vertices if rng.random() < 0.5)
        assert dimension(h, a) == brute_dimension(h, a)


def test_geometric_closure_contains_tight_attachments():
    g = k_complete(5)
    h = Graph(2, list(g.vertices) + ["w"],
              list(g.edges) + [("w", "v0"), ("w", "v1")])
    # w adds two edges against weight two, so the block already spans it
    assert geometric_closure_bounded(h, g.vertices) == h.vertices
    assert "w" not in geometric_closure_bounded(
        Graph(2, list(g.vertices) + ["w"], list(g.edges) + [("w", "v0")]),
        g.vertices)


def test_strong_embeddings_filters_by_image_closure():
    five = k_complete(5, prefix="p")
    host = k_complete(5)
    assert len(strong_embeddings(five, host)) == 120
    point = Graph(2, ["p"], [])
    # inside the zero-count block no proper nonempty subset is closed
    assert len(strong_embeddings(point, host)) == 0
    assert len(strong_embeddings(point, k_complete(4))) == 4


def test_submodularity_of_the_count():
    rng = random.Random(20)
    for _ in range(60):
        g = random_graph(rng, rng.randint(0, 9), m=rng.choice([2, 3]), p=rng.random())
        verts = g.sorted_vertices()
        a = frozenset(v for v in verts if rng.random() < 0.5)
        b = frozenset(v for v in verts if rng.random() < 0.5)
        assert delta(g, a | b) <= delta(g, a) + delta(g, b) - delta(g, a & b)
