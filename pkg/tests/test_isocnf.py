import io
import itertools
import random

import pytest

from cfi_forge.cfi import EdgeLabeling, OrderedBaseGraph, build_cfi
from cfi_forge.graphs import (ColoredGraph, brute_force_isomorphism,
                              color_class_profile, is_partial_isomorphism)
from cfi_forge.isocnf import (TooLarge, build_iso, decode_model, mini_sat,
                              read_dimacs, violated_clause, write_dimacs)

from oracles import brute_force_sat


def random_graph(rng, n, n_colors=2, p=0.4):
    edges = [(a, b) for a in range(n) for b in range(a + 1, n)
             if rng.random() < p]
    return ColoredGraph(n, edges, [rng.randrange(n_colors) for _ in range(n)])


def test_single_vertex():
    g = ColoredGraph(1, [], [0])
    f = build_iso(g, g)
    assert f.num_vars == 1
    assert f.family_counts() == {"color": 1}
    assert mini_sat(f) == {1: 1}


def test_disjoint_palettes_unsat():
    g = ColoredGraph(1, [], [0])
    h = ColoredGraph(1, [], [1])
    f = build_iso(g, h)
    assert any(len(c) == 0 for c in f.clauses)
    assert mini_sat(f) is None


def test_formula_counts_and_width():
    rng = random.Random(4)
    for _ in range(10):
        g = random_graph(rng, rng.randrange(1, 6))
        h = random_graph(rng, rng.randrange(1, 6))
        f = build_iso(g, h)
        assert f.num_vars == g.n * h.n
        _, wg = color_class_profile(g)
        _, wh = color_class_profile(h)
        assert f.width == max(wg, wh)
        color_lens = [len(c) for c, t in zip(f.clauses, f.tags)
                      if t == "color"]
        assert max(color_lens, default=0) == f.width


def test_sat_iff_isomorphic_small_suite():
    rng = random.Random(5)
    agree = 0
    for _ in range(40):
        n = rng.randrange(1, 6)
        g = random_graph(rng, n)
        h = random_graph(rng, n)
        f = build_iso(g, h)
        model = mini_sat(f)
        bij = brute_force_isomorphism(g, h)
        assert (model is not None) == (bij is not None)
        if model is not None:
            decoded = decode_model(f, model)
            alpha = {i: u for i, u in enumerate(sorted(decoded))}
            beta = {i: decoded[alpha[i]] for i in alpha}
            assert len(decoded) == g.n
            assert is_partial_isomorphism(g, h, alpha, beta)
            agree += 1
    assert agree >= 5


def test_mini_sat_against_truth_table():
    rng = random.Random(6)
    for _ in range(20):
        g = random_graph(rng, rng.randrange(1, 4))
        h = random_graph(rng, rng.randrange(1, 4))
        f = build_iso(g, h)
        if f.num_vars > 12:
            continue
        assert (mini_sat(f) is not None) == (brute_force_sat(f) is not None)


def test_mini_sat_cap():
    g = ColoredGraph(200, [], [0] * 200)
    with pytest.raises(TooLarge):
        mini_sat(build_iso(g, g))


def test_cfi_pair_formula():
    base = OrderedBaseGraph(3, [(0, 1), (1, 2), (0, 2)])
    f0 = EdgeLabeling.constant(base)
    g1 = EdgeLabeling.from_twisted_edges(base, [(0, 1)])
    g2 = EdgeLabeling.from_twisted_edges(base, [(0, 1), (1, 2)])
    a = build_cfi(base, f0).graph
    assert mini_sat(build_iso(a, build_cfi(base, g1).graph)) is None
    model = mini_sat(build_iso(a, build_cfi(base, g2).graph))
    assert model is not None


def test_violated_clause():
    g = ColoredGraph(2, [(0, 1)], [0, 0])
    f = build_iso(g, g)
    assert violated_clause(f, {}) is None
    # two sources mapped to one target hit the first bijection clause
    sigma = {f.var(0, 0): 1, f.var(1, 0): 1}
    cid = violated_clause(f, sigma)
    assert cid is not None and f.tags[cid] == "bijection"
    # smallest-id convention
    falsified = [i for i, c in enumerate(f.clauses)
                 if all(abs(l) in sigma and (sigma[abs(l)] == 1) != (l > 0)
                        for l in c)]
    assert cid == min(falsified)


def test_dimacs_round_trip_and_golden_shape():
    g = ColoredGraph(2, [(0, 1)], [0, 1])
    f = build_iso(g, g, comments=["cfi-forge k=3 t=1 w=4 seed=0 sha=deadbeef"])
    buf = io.StringIO()
    write_dimacs(f, buf)
    text = buf.getvalue()
    assert text.splitlines()[0].startswith("c cfi-forge")
    assert f"p cnf {f.num_vars} {len(f.clauses)}" in text
    assert text.splitlines()[-1].endswith(" 0")
    back = read_dimacs(io.StringIO(text))
    assert list(back.clauses) == list(f.clauses)
    assert back.num_vars == f.num_vars
    assert back.n_h == f.n_h
    # byte-identical regeneration
    buf2 = io.StringIO()
    write_dimacs(build_iso(g, g, comments=["cfi-forge k=3 t=1 w=4 seed=0 "
                                           "sha=deadbeef"]), buf2)
    assert buf2.getvalue() == text


def test_unit_clause_serialization():
    g = ColoredGraph(1, [], [0])
    f = build_iso(g, g)
    buf = io.StringIO()
    write_dimacs(f, buf)
    assert "1 0" in buf.getvalue().splitlines()[-1]


def test_read_dimacs_rejects_malformed():
    with pytest.raises(ValueError):
        read_dimacs(io.StringIO("p cnf x y\n"))
    with pytest.raises(ValueError):
        read_dimacs(io.StringIO("p cnf 1 1\n1\n"))
    with pytest.raises(ValueError):
        read_dimacs(io.StringIO("1 0\n"))
