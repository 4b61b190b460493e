import random

import pytest
from hypothesis import given, settings, strategies as st

from cfi_forge.graphs import (ColoredGraph, brute_force_isomorphism,
                              color_class_profile, find_twins,
                              is_partial_isomorphism, twinned)

from oracles import permutation_isomorphism


def path(n, color=0):
    return ColoredGraph(n, [(i, i + 1) for i in range(n - 1)], [color] * n)


def random_graph(rng, n, n_colors=1, p=0.4):
    edges = [(a, b) for a in range(n) for b in range(a + 1, n)
             if rng.random() < p]
    colors = [rng.randrange(n_colors) for _ in range(n)]
    return ColoredGraph(n, edges, colors)


def test_basic_invariants():
    g = ColoredGraph(3, [(0, 1), (1, 2)], [0, 1, 0])
    assert g.degree(1) == 2 and g.has_edge(0, 1) and not g.has_edge(0, 2)
    with pytest.raises(ValueError):
        ColoredGraph(2, [(0, 0)], [0, 0])
    with pytest.raises(ValueError):
        ColoredGraph(2, [(0, 2)], [0, 0])
    with pytest.raises(ValueError):
        ColoredGraph(2, [], [0])


def test_color_class_profile():
    g = ColoredGraph(1, [], [7])
    assert color_class_profile(g) == ({7: 1}, 1)
    sizes, biggest = color_class_profile(path(5))
    assert sizes == {0: 5} and biggest == 5


def test_partial_isomorphism_basics():
    g = ColoredGraph(2, [(0, 1)], [0, 0])
    h = ColoredGraph(2, [], [0, 0])
    assert is_partial_isomorphism(g, h, {}, {})
    assert is_partial_isomorphism(g, h, {0: 0}, {0: 1})
    # pebbles on an edge vs a non-edge
    assert not is_partial_isomorphism(g, h, {0: 0, 1: 1}, {0: 0, 1: 1})
    with pytest.raises(ValueError):
        is_partial_isomorphism(g, h, {0: 0}, {1: 0})


def test_partial_isomorphism_respects_equivalence():
    g = ColoredGraph(3, [(0, 1)], [0, 0, 0], equivalence=[[1, 2]])
    h = ColoredGraph(3, [(0, 1)], [0, 0, 0])
    assert not is_partial_isomorphism(g, h, {0: 1, 1: 2}, {0: 1, 1: 2})
    h2 = ColoredGraph(3, [(0, 1)], [0, 0, 0], equivalence=[[1, 2]])
    assert is_partial_isomorphism(g, h2, {0: 1, 1: 2}, {0: 1, 1: 2})


def test_brute_force_identity_and_symmetry():
    rng = random.Random(0)
    for _ in range(25):
        g = random_graph(rng, rng.randrange(1, 7), n_colors=2)
        assert brute_force_isomorphism(g, g) is not None
        h = random_graph(rng, g.n, n_colors=2)
        assert ((brute_force_isomorphism(g, h) is None)
                == (brute_force_isomorphism(h, g) is None))


def test_brute_force_against_permutation_oracle():
    rng = random.Random(1)
    checked = 0
    for _ in range(60):
        n = rng.randrange(1, 7)
        g = random_graph(rng, n, n_colors=2)
        h = random_graph(rng, n, n_colors=2)
        got = brute_force_isomorphism(g, h)
        want = permutation_isomorphism(g, h)
        assert (got is None) == (want is None)
        if got is not None:
            alpha = {i: u for i, u in enumerate(sorted(got))}
            beta = {i: got[alpha[i]] for i in alpha}
            assert is_partial_isomorphism(g, h, alpha, beta)
            checked += 1
    assert checked >= 5


def test_find_twins_path_and_triangle():
    assert find_twins(path(3)) == [(0, 2, False)]
    tri = ColoredGraph(3, [(0, 1), (1, 2), (0, 2)], [0] * 3)
    assert find_twins(tri) == [(0, 1, True), (0, 2, True), (1, 2, True)]


def test_twinned_structure():
    g = ColoredGraph(1, [], [3])
    x = twinned(g)
    assert x.graph.n == 2 and x.graph.edges == ((0, 1),)
    assert x.graph.colors == (3, 3)

    g2 = ColoredGraph(2, [(0, 1)], [0, 1])
    x2 = twinned(g2).graph
    assert x2.n == 4 and len(x2.edges) == 2 + 4


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7), st.integers(0, 10_000))
def test_twinned_counts_by_enumeration(n, seed):
    rng = random.Random(seed)
    g = random_graph(rng, n)
    x = twinned(g)
    assert x.graph.n == 2 * n
    # twin edges plus four copies of every base edge, counted directly
    expect = {tuple(sorted((2 * u, 2 * u + 1))) for u in range(n)}
    for a, b in g.edges:
        for i in (0, 1):
            for j in (0, 1):
                expect.add(tuple(sorted((2 * a + i, 2 * b + j))))
    assert set(x.graph.edges) == expect
    assert len(x.graph.edges) == n + 4 * len(g.edges)


def test_twinned_twin_pairs_partition():
    rng = random.Random(5)
    found = 0
    while found < 20:
        g = random_graph(rng, rng.randrange(2, 9), p=0.5)
        if find_twins(g):
            continue
        found += 1
        x = twinned(g)
        pairs = find_twins(x.graph)
        connected = [(a, b) for a, b, conn in pairs if conn]
        assert len(connected) == g.n
        assert sorted(v for p in connected for v in p) == list(range(x.graph.n))
        for a, b, conn in pairs:
            assert conn  # twin-free base gives only the connected pairs


def test_document_round_trip():
    rng = random.Random(2)
    g = random_graph(rng, 6, n_colors=3)
    g2 = ColoredGraph.from_document(g.to_document())
    assert g == g2
    eqg = ColoredGraph(4, [(0, 1)], [0] * 4, equivalence=[[2, 3]])
    assert ColoredGraph.from_document(eqg.to_document()) == eqg
