import itertools
import random

import pytest

from cfi_forge.cfi import (CfiInstance, Compression, EdgeLabeling,
                           OrderedBaseGraph, Twisting, build_cfi,
                           cfi_parity_law, compress, even_tuples,
                           lifted_classes, precompress, retwist,
                           twist_distance, validate_compressible_labeling,
                           validate_compressible_twisting,
                           validate_compression, validate_twisting)
from cfi_forge.graphs import brute_force_isomorphism, color_class_profile


def cycle(n):
    return OrderedBaseGraph(n, [(i, (i + 1) % n) for i in range(n)])


def path_base(n):
    return OrderedBaseGraph(n, [(i, i + 1) for i in range(n - 1)])


def test_base_graph_requirements():
    with pytest.raises(ValueError):
        OrderedBaseGraph(4, [(0, 1), (2, 3)])  # disconnected
    b = cycle(3)
    assert b.slot(0, 1) == 0 and b.slot(0, 2) == 1
    assert b.neighbor_at(1, 0) == 0


def test_gadget_sizes():
    for d in range(1, 5):
        assert len(even_tuples(d)) == 2 ** (d - 1)
    star = OrderedBaseGraph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    inst = build_cfi(star, EdgeLabeling.constant(star))
    assert len(inst.gadget(0)) == 8
    assert inst.graph.n == 8 + 4


def test_single_edge_gadgets():
    e = OrderedBaseGraph(2, [(0, 1)])
    inst0 = build_cfi(e, EdgeLabeling.constant(e, 0))
    inst1 = build_cfi(e, EdgeLabeling.constant(e, 1))
    assert inst0.graph.n == 2 and inst0.graph.edges == ((0, 1),)
    assert inst1.graph.edges == ()


def test_adjacency_rule_by_enumeration():
    base = cycle(3)
    f = EdgeLabeling.constant(base)
    inst = build_cfi(base, f)
    assert inst.graph.n == 6
    for x in range(inst.graph.n):
        for y in range(x + 1, inst.graph.n):
            u, v = inst.origin[x], inst.origin[y]
            if u == v:
                assert not inst.graph.has_edge(x, y)
                continue
            if not base.has_edge(u, v):
                assert not inst.graph.has_edge(x, y)
                continue
            i = base.slot(u, v)
            j = base.slot(v, u)
            a_i = inst.tuples[x] >> i & 1
            b_j = inst.tuples[y] >> j & 1
            assert inst.graph.has_edge(x, y) == ((a_i + b_j) % 2 == f((u, v)))


def test_twist_distance_and_parity():
    base = cycle(3)
    f = EdgeLabeling.constant(base)
    g1 = EdgeLabeling.from_twisted_edges(base, [(0, 1)])
    g2 = EdgeLabeling.from_twisted_edges(base, [(0, 1), (1, 2)])
    assert twist_distance(f, f) == 0
    assert twist_distance(f, g1) == 1
    assert twist_distance(f, g2) == 2
    assert brute_force_isomorphism(build_cfi(base, f).graph,
                                   build_cfi(base, g1).graph) is None
    assert brute_force_isomorphism(build_cfi(base, f).graph,
                                   build_cfi(base, g2).graph) is not None


def test_parity_law_small_sample():
    rng = random.Random(9)
    bases = [cycle(3), path_base(4), cycle(4), cycle(5)]
    for base in bases:
        edges = base.edges
        for _ in range(6):
            f = EdgeLabeling(base, {e: rng.randrange(2) for e in edges})
            g = EdgeLabeling(base, {e: rng.randrange(2) for e in edges})
            assert cfi_parity_law(base, f, g)


def test_compression_validation():
    base = path_base(5)
    singles = Compression.singletons(5)
    assert validate_compression(base, singles)
    ends = Compression.from_pairs(5, [(0, 4)])
    assert validate_compression(base, ends)
    adjacent = Compression.from_pairs(5, [(0, 1)])
    assert not validate_compression(base, adjacent)
    mixed_degree = Compression.from_pairs(5, [(0, 2)])
    assert not validate_compression(base, mixed_degree)


def test_compressible_labeling():
    base = path_base(5)
    ends = Compression.from_pairs(5, [(0, 4)])
    assert validate_compressible_labeling(base, ends, EdgeLabeling.constant(base))
    # no two equivalent endpoints pair up, so every labeling passes here
    anyl = EdgeLabeling.from_twisted_edges(base, [(0, 1)])
    assert validate_compressible_labeling(base, ends, anyl)
    # a 4-cycle with both "sides" merged forces agreement
    sq = cycle(4)
    eq = Compression.from_pairs(4, [(0, 2)])
    bad = EdgeLabeling.from_twisted_edges(sq, [(0, 1)])
    assert not validate_compressible_labeling(sq, eq, bad)
    good = EdgeLabeling.from_twisted_edges(sq, [(0, 1), (1, 2)])
    assert validate_compressible_labeling(sq, eq, good)


def test_precompress_and_compress():
    base = path_base(5)
    inst = build_cfi(base, EdgeLabeling.constant(base))
    singles = Compression.singletons(5)
    pre = precompress(inst, singles)
    assert pre.equivalence == ()  # diagonal relation stored empty
    assert (pre.n, pre.edges, pre.colors) == (inst.graph.n, inst.graph.edges,
                                              inst.graph.colors)
    comp = compress(inst, singles)
    assert brute_force_isomorphism(comp, inst.graph) is not None

    ends = Compression.from_pairs(5, [(0, 4)])
    classes = lifted_classes(inst, ends)
    by_size = sorted(len(c) for c in classes)
    # one merged class per tuple of the identified degree-1 gadgets
    assert by_size.count(2) == 1
    pre2 = precompress(inst, ends)
    assert len(pre2.equivalence) == 1
    comp2 = compress(inst, ends)
    assert comp2.n == inst.graph.n - 1
    # class color is the minimal member color
    merged = [cls for cls in lifted_classes(inst, ends) if len(cls) == 2][0]
    assert min(inst.graph.colors[x] for x in merged) in comp2.colors
    _, width = color_class_profile(comp2)
    assert width <= 8


def test_compress_loop_free():
    sq = cycle(4)
    eq = Compression.from_pairs(4, [(0, 2), (1, 3)])
    assert validate_compression(sq, eq)
    inst = build_cfi(sq, EdgeLabeling.constant(sq))
    comp = compress(inst, eq)
    assert all(a != b for a, b in comp.edges)


def test_twisting_validation():
    base = cycle(4)
    assert validate_twisting(base, Twisting(()), fixed_vertices=range(4),
                             twisted_edges=[])
    both_ways = Twisting([(i, (i + 1) % 4) for i in range(4)]
                         + [((i + 1) % 4, i) for i in range(4)])
    assert validate_twisting(base, both_ways, twisted_edges=[])
    one_arc = Twisting([(0, 1)])
    assert not validate_twisting(base, one_arc)
    corner = Twisting([(0, 1), (0, 3), (1, 0), (1, 2), (2, 1), (2, 3),
                       (3, 0), (3, 2)])
    assert validate_twisting(base, corner, twisted_edges=[])


def test_compressible_twisting():
    sq = cycle(4)
    eq = Compression.from_pairs(4, [(0, 2)])
    assert validate_compressible_twisting(sq, eq, Twisting(()))
    # both members of the class use the same neighbor slots
    t = Twisting([(1, 0), (1, 2), (0, 1), (0, 3), (2, 1), (2, 3)])
    assert validate_twisting(sq, t, twisted_edges=[(0, 3), (2, 3)])
    assert t.trace(0, sq) == t.trace(2, sq)
    assert validate_compressible_twisting(sq, eq, t)
    # dropping one member's arcs breaks the classwise agreement
    t2 = Twisting([(1, 0), (1, 2), (0, 1), (0, 3)])
    assert validate_twisting(sq, t2)
    assert not validate_compressible_twisting(sq, eq, t2)


def test_retwist_involution_and_isomorphism():
    rng = random.Random(3)
    for base in (cycle(3), path_base(4), cycle(5)):
        f = EdgeLabeling(base, {e: rng.randrange(2) for e in base.edges})
        # twisting along the whole cycle/path through vertex arcs
        arcs = []
        verts = list(range(base.n))
        for u in verts:
            nbrs = base.neighbor_lists[u]
            if len(nbrs) >= 2:
                arcs += [(u, nbrs[0]), (u, nbrs[1])]
        t = Twisting(arcs)
        if not validate_twisting(base, t):
            continue
        g, vmap = retwist(f, t)
        assert twist_distance(f, g) == len(t.twisted_edges(base))
        g2, _ = retwist(g, t)
        assert g2 == f
        assert sorted(vmap.values()) == list(range(build_cfi(base, g).graph.n))


def test_retwist_identity():
    base = cycle(3)
    f = EdgeLabeling.constant(base)
    g, vmap = retwist(f, Twisting(()))
    assert g == f
    assert all(vmap[x] == x for x in vmap)


def test_instance_document():
    base = cycle(3)
    inst = build_cfi(base, EdgeLabeling.constant(base))
    doc = inst.to_document()
    assert doc["origin"] == list(inst.origin)
    rebuilt = build_cfi(OrderedBaseGraph.from_document(doc["base"]),
                        EdgeLabeling(base, {(a, b): v
                                            for a, b, v in doc["labeling"]}))
    assert rebuilt.graph == inst.graph
