import math
import random

import pytest

from cfi_forge.cfi import validate_compressible_twisting, validate_compression
from cfi_forge.grids import (NoCoprimeSet, Roadblock, build_equiv_t,
                             build_grid, end_to_end_twisting_search,
                             find_coprimes, find_periodic_path,
                             induced_twisting, is_periodic_path,
                             is_separating, is_t_critical,
                             is_t_semi_separator, is_vertical_separator,
                             minimal_t_semi_separators, roadblock_avoided)


def micro_grid(q=5, f=2, p=(1, 1, 1)):
    grid = build_grid(3, p, q_cols=q, end_width=f)
    return grid, build_equiv_t(grid, 1)


def test_find_coprimes():
    assert find_coprimes(4, 2) == (3, 4)
    assert find_coprimes(5, 3) == (3, 4, 5)
    assert find_coprimes(6, 3) == (3, 4, 5)
    with pytest.raises(NoCoprimeSet):
        find_coprimes(2, 3)
    for w, k in ((5, 3), (8, 3), (10, 4)):
        ps = find_coprimes(w, k)
        assert len(ps) == k
        assert all((w + 1) // 2 <= x <= w for x in ps)
        assert all(math.gcd(a, b) == 1
                   for i, a in enumerate(ps) for b in ps[i + 1:])


def test_full_grid_shape():
    grid = build_grid(3, (3, 4, 5))
    assert grid.J == 12 * 60 and grid.base.n == 2160
    # wrap-around rows and degree profile
    assert grid.base.has_edge(grid.vid(2, 7), grid.vid(0, 7))
    degs = {grid.base.degree(v) for v in range(grid.base.n)}
    assert degs == {3, 4}
    for v in range(grid.base.n):
        i, j = grid.pos(v)
        assert grid.base.degree(v) == (3 if j in (0, grid.J - 1) else 4)


def test_row_class_count_formula_full_scale():
    grid = build_grid(3, (3, 4, 5))
    eq = build_equiv_t(grid, 1)
    assert validate_compression(grid.base, eq.compression)
    for i in range(3):
        assert eq.row_class_count(i) == eq.periods[i] + 2 * grid.end_width
    # ends are singletons
    for j in list(range(grid.end_width)) \
            + list(range(grid.J - grid.end_width, grid.J)):
        for i in range(3):
            c = eq.class_of(grid.vid(i, j))
            assert len(eq.class_members(c)) == 1


def test_desk_grid_class_counts():
    grid, eq = micro_grid(q=5, f=2)
    assert grid.J == 10 and eq.periods == (2, 2, 2)
    for i in range(3):
        assert eq.row_class_count(i) == eq.periods[i] + 2 * grid.end_width


def test_periodic_path_predicate():
    grid, eq = micro_grid()
    row = [grid.vid(0, j) for j in range(grid.J)]
    assert is_periodic_path(grid, row, 2)
    assert is_periodic_path(grid, row, 5)
    detour = row[:4] + [grid.vid(1, 3)]
    assert not is_periodic_path(grid, detour, 2)
    # single unrepeated detour breaks translation closure
    zig = row[:5] + [grid.vid(1, 4), grid.vid(1, 5)] \
        + [grid.vid(1, j) for j in range(6, grid.J)]
    assert not is_periodic_path(grid, zig, 2)


def test_induced_twisting_straight_row():
    grid, eq = micro_grid()
    row = [grid.vid(0, j) for j in range(grid.J)]
    tw = induced_twisting(grid, eq, row, [0])
    twisted = tw.twisted_edges(grid.base)
    assert sorted(twisted) == [(grid.vid(0, 0), grid.vid(0, 1)),
                               (grid.vid(0, grid.J - 2), grid.vid(0, grid.J - 1))]
    assert validate_compressible_twisting(grid.base, eq.compression, tw)
    # interior vertices carry two arcs each
    for v in row[1:-1]:
        assert len([a for a in tw.arcs if a[0] == v]) == 2
    assert tw.fixes(row[0]) and tw.fixes(row[-1])


def test_find_periodic_path_zigzag():
    grid, eq = micro_grid()
    fam = find_periodic_path(grid, eq, [0, 1])
    assert fam is not None
    assert is_periodic_path(grid, fam.path, fam.period)


def test_vertical_separator():
    grid, eq = micro_grid()
    col = [grid.vid(i, 4) for i in range(3)]
    assert is_vertical_separator(grid, col)
    assert not is_vertical_separator(grid, col[:2])
    assert not is_vertical_separator(grid, [])


def test_semi_separator_conditions():
    grid, eq = micro_grid()
    w = {eq.class_of(grid.vid(i, 4)) for i in range(3)}
    col = [grid.vid(i, 4) for i in range(3)]
    assert is_t_semi_separator(grid, eq, col, w)
    # two vertices in a row where w touches one class
    bad = col + [grid.vid(0, 6)]
    assert not is_t_semi_separator(grid, eq, bad, w)
    # vertex outside the single class of its row
    off = [grid.vid(0, 5), grid.vid(1, 4), grid.vid(2, 4)]
    assert not is_t_semi_separator(grid, eq, off, w)


def test_separating_and_critical():
    grid, eq = micro_grid()
    assert not is_separating(grid, eq, [], [0])
    row0 = [v for c in range(len(eq.compression.classes))
            if eq.row_of_class(c) == 0
            for v in eq.class_members(c)]
    assert is_separating(grid, eq, row0, [0])
    w = {eq.class_of(grid.vid(i, 4)) for i in range(3)}
    assert is_t_critical(grid, eq, w)
    assert not is_t_critical(grid, eq, set())
    seps = minimal_t_semi_separators(grid, eq, w, 3)
    assert seps and all(is_vertical_separator(grid, s) for s in seps)
    for s in seps:
        for v in s:
            assert not is_t_semi_separator(grid, eq, s - {v}, w)


def test_end_to_end_search_no_cops():
    grid, eq = micro_grid()
    tw = end_to_end_twisting_search(grid, eq)
    assert tw is not None
    twisted = tw.twisted_edges(grid.base)
    cols = sorted(min(v % grid.J for v in e) for e in twisted)
    assert cols[0] == 0 and cols[1] >= grid.J - 2
    assert validate_compressible_twisting(grid.base, eq.compression, tw)


def test_end_to_end_search_blocked_by_critical_w():
    grid, eq = micro_grid()
    w = {eq.class_of(grid.vid(i, 4)) for i in range(3)}
    assert end_to_end_twisting_search(grid, eq, cop_classes=w) is None


def test_roadblock_semantics():
    grid, eq = micro_grid()
    tw = end_to_end_twisting_search(grid, eq)
    rows = {grid.pos(a)[0] for arc in tw.arcs for a in arc}
    row = rows.pop()
    cls = next(c for c in range(len(eq.compression.classes))
               if eq.row_of_class(c) == row
               and len(eq.class_members(c)) > 1)
    u = eq.class_members(cls)[0]
    trace = tw.trace(u, grid.base)
    if len(trace) % 2 == 0 and trace:
        exact = Roadblock(cls, frozenset(trace))
        assert not roadblock_avoided(grid, eq, tw, exact)
    empty_vs_nonempty = Roadblock(cls, frozenset({0, 1}))
    if trace != {0, 1}:
        assert roadblock_avoided(grid, eq, tw, empty_vs_nonempty)
    with pytest.raises(ValueError):
        Roadblock(cls, frozenset({0}))


def test_roadblock_strict_superset_allowed():
    grid, eq = micro_grid()
    # a twisting through row 0 traces two horizontal slots at interior
    # vertices; a roadblock on a strict subset of size zero is forbidden,
    # so test against a 4-slot block at a degree-4 class instead
    row = [grid.vid(0, j) for j in range(grid.J)]
    tw = induced_twisting(grid, eq, row, [0])
    cls = eq.class_of(grid.vid(0, 4))
    deg = grid.base.degree(grid.vid(0, 4))
    assert deg == 4
    full = Roadblock(cls, frozenset(range(4)))
    # trace at the class is the two horizontal slots: a strict subset of full
    assert roadblock_avoided(grid, eq, tw, full)


def test_randomized_roadblock_futility_smoke():
    grid, eq = micro_grid()
    rng = random.Random(11)
    classes = list(range(len(eq.compression.classes)))
    for _ in range(120):
        rbs = []
        for _ in range(rng.randint(1, 4)):
            c = rng.choice(classes)
            d = grid.base.degree(eq.class_members(c)[0])
            size = 2 if d < 4 or rng.random() < 0.7 else 4
            rbs.append(Roadblock(c, frozenset(rng.sample(range(d), size))))
        tw = end_to_end_twisting_search(grid, eq, roadblocks=rbs)
        assert tw is not None
        assert all(roadblock_avoided(grid, eq, tw, rb) for rb in rbs)
