"""Cylindrical grids, their row compressions, periodic paths, separators,
and the end-to-end twisting search.

The k x J cylindrical grid has wrap-around rows and open column ends. The
first/last `end_width` columns are the left/right ends; interior vertices of
row i are identified when their column difference is divisible by the row
period end_width * p_i * ... * p_{i+t} (row indices wrap modulo k).

Desk scale: the full construction uses end_width = 4k and J = 4k * p_1...p_k,
which explodes quickly; grids here optionally take a small column multiplier
q (J = end_width * q) and a small end_width override so that every predicate
stays exercisable at toy size. Full-scale parameters remain available.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .cfi import (Compression, OrderedBaseGraph, Twisting,
                  validate_compressible_twisting)

Edge = tuple[int, int]


class NoCoprimeSet(ValueError):
    pass


def find_coprimes(w: int, k: int) -> tuple[int, ...]:
    """k pairwise coprime numbers in [ceil(w/2), w], or NoCoprimeSet.

    Deterministic: DFS over candidates in descending order, first complete
    set wins; the result is therefore the lexicographically smallest set when
    read in descending order.
    """
    if w < 2 or k < 1:
        raise ValueError("need w >= 2 and k >= 1")
    lo = (w + 1) // 2
    candidates = list(range(w, lo - 1, -1))

    chosen: list[int] = []

    def dfs(start: int) -> bool:
        if len(chosen) == k:
            return True
        for idx in range(start, len(candidates)):
            c = candidates[idx]
            if all(math.gcd(c, x) == 1 for x in chosen):
                chosen.append(c)
                if dfs(idx + 1):
                    return True
                chosen.pop()
        return False

    if not dfs(0):
        raise NoCoprimeSet(f"no {k} pairwise coprime values in [{lo}, {w}]")
    return tuple(sorted(chosen))


class CylindricalGrid:
    """k x J cylindrical grid as an ordered base graph.

    Vertices are (row, col) with id row*J + col (lexicographic order). Rows
    wrap (row k-1 adjacent to row 0); columns do not. Requires k >= 3 so the
    row cycle is simple.
    """

    def __init__(self, k: int, coprimes: Sequence[int],
                 q_cols: Optional[int] = None,
                 end_width: Optional[int] = None):
        if k < 3:
            raise ValueError("need at least 3 rows")
        if len(coprimes) != k:
            raise ValueError("need one period factor per row")
        for a, b in itertools.combinations(coprimes, 2):
            if math.gcd(a, b) != 1:
                raise ValueError("period factors must be pairwise coprime")
        f = 4 * k if end_width is None else end_width
        if f < 1:
            raise ValueError("end width must be positive")
        q = q_cols if q_cols is not None else _prod(coprimes)
        J = f * q
        if J < 2 * f + 1:
            raise ValueError("grid needs at least one interior column")
        self.k = k
        self.J = J
        self.coprimes = tuple(coprimes)
        self.end_width = f
        self.q_cols = q
        self.desk_scale = q_cols is not None or end_width is not None

        edges = []
        for i in range(k):
            for j in range(J):
                if j + 1 < J:
                    edges.append((self.vid(i, j), self.vid(i, j + 1)))
                edges.append((self.vid(i, j), self.vid((i + 1) % k, j)))
        labels = [f"({i},{j})" for i in range(k) for j in range(J)]
        self.base = OrderedBaseGraph(k * J, edges, labels=labels)

    def vid(self, i: int, j: int) -> int:
        return i % self.k * self.J + j

    def pos(self, v: int) -> tuple[int, int]:
        return divmod(v, self.J)

    def is_interior_col(self, j: int) -> bool:
        return self.end_width <= j < self.J - self.end_width

    def in_left_end(self, v: int) -> bool:
        return v % self.J < self.end_width

    def in_right_end(self, v: int) -> bool:
        return v % self.J >= self.J - self.end_width

    def in_end(self, v: int) -> bool:
        return self.in_left_end(v) or self.in_right_end(v)

    def end_edges(self, side: str) -> list[Edge]:
        """Edges with both endpoints in the named end ('left'/'right')."""
        inside = self.in_left_end if side == "left" else self.in_right_end
        return [e for e in self.base.edges if inside(e[0]) and inside(e[1])]

    def row_period(self, i: int, t: int) -> int:
        p = self.end_width
        for s in range(t + 1):
            p *= self.coprimes[(i + s) % self.k]
        return p

    def descriptor(self, t: Optional[int] = None,
                   w: Optional[int] = None) -> dict:
        doc = {
            "k": self.k,
            "t": t,
            "w": w,
            "coprimes": list(self.coprimes),
            "J": self.J,
        }
        if self.desk_scale:
            doc["desk_scale_q"] = self.q_cols
            doc["desk_f"] = self.end_width
        return doc


def _prod(xs: Iterable[int]) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


def build_grid(k: int, coprimes: Sequence[int],
               q_cols: Optional[int] = None,
               end_width: Optional[int] = None) -> CylindricalGrid:
    return CylindricalGrid(k, coprimes, q_cols=q_cols, end_width=end_width)


class RowCompression:
    """The row equivalence with parameter t, realized as a Compression."""

    def __init__(self, grid: CylindricalGrid, t: int):
        if not (1 <= t <= grid.k - 1):
            raise ValueError("t must be in [1, k-1]")
        self.grid = grid
        self.t = t
        self.periods = tuple(grid.row_period(i, t) for i in range(grid.k))
        for i, period in enumerate(self.periods):
            if period < 2:
                raise ValueError(f"row {i} period {period} would merge "
                                 "adjacent columns")
        groups: dict[tuple[int, int], list[int]] = {}
        for i in range(grid.k):
            for j in range(grid.J):
                v = grid.vid(i, j)
                if grid.is_interior_col(j):
                    key = (i, j % self.periods[i])
                else:
                    key = (i, -1 - j)  # ends stay singletons
                groups.setdefault(key, []).append(v)
        self.compression = Compression(grid.base.n, groups.values())

    def class_of(self, v: int) -> int:
        return self.compression.class_of[v]

    def class_members(self, c: int) -> tuple[int, ...]:
        return self.compression.classes[c]

    def row_of_class(self, c: int) -> int:
        return self.grid.pos(self.compression.classes[c][0])[0]

    def row_class_count(self, i: int) -> int:
        return sum(1 for cls in self.compression.classes
                   if self.grid.pos(cls[0])[0] == i)

    def classes_touching(self, vertices: Iterable[int]) -> set[int]:
        return {self.compression.class_of[v] for v in vertices}


def build_equiv_t(grid: CylindricalGrid, t: int) -> RowCompression:
    return RowCompression(grid, t)


# -- periodic paths -------------------------------------------------------


def is_grid_path(grid: CylindricalGrid, path: Sequence[int]) -> bool:
    if len(path) < 2 or len(set(path)) != len(path):
        return False
    return all(grid.base.has_edge(a, b) for a, b in zip(path, path[1:]))


def is_periodic_path(grid: CylindricalGrid, path: Sequence[int],
                     ell: int) -> bool:
    """Literal translation-closure test for a given path and period."""
    if not is_grid_path(grid, path):
        return False
    if not (grid.in_left_end(path[0]) and grid.in_right_end(path[-1])):
        return False
    index = {v: i for i, v in enumerate(path)}
    for i, u in enumerate(path[:-1]):
        ru, cu = grid.pos(u)
        if grid.in_end(u):
            continue
        for cv in range(cu % ell, grid.J, ell):
            v = grid.vid(ru, cv)
            if v == u or grid.in_end(v):
                continue
            j = index.get(v)
            if j is None or j == len(path) - 1:
                return False
            rn1, cn1 = grid.pos(path[i + 1])
            rn2, cn2 = grid.pos(path[j + 1])
            if rn1 != rn2 or (cn1 - cn2) % ell != 0:
                return False
    return True


def induced_twisting(grid: CylindricalGrid, eq_t: RowCompression,
                     path: Sequence[int], rows: Iterable[int]) -> Twisting:
    """Twisting induced by a periodic path over the given row set."""
    rows = sorted(set(rows))
    ell = math.gcd(*[eq_t.periods[i] for i in rows]) if rows else 0
    used_rows = {grid.pos(v)[0] for v in path}
    if not used_rows <= set(rows):
        raise ValueError("path leaves the declared row set")
    if not is_periodic_path(grid, path, ell):
        raise ValueError("not a periodic path for the row-set period")
    arcs = []
    for i in range(1, len(path) - 1):
        arcs.append((path[i], path[i - 1]))
        arcs.append((path[i], path[i + 1]))
    t = Twisting(arcs)
    if not validate_compressible_twisting(grid.base, eq_t.compression, t):
        raise ValueError("induced twisting is not compressible")
    return t


# -- separators -----------------------------------------------------------


def is_vertical_separator(grid: CylindricalGrid, s: Iterable[int]) -> bool:
    """True iff removing s disconnects the left end from the right end."""
    blocked = set(s)
    frontier = [v for v in range(grid.base.n)
                if grid.in_left_end(v) and v not in blocked]
    seen = set(frontier)
    while frontier:
        u = frontier.pop()
        if grid.in_right_end(u):
            return False
        for v in grid.base.neighbor_lists[u]:
            if v not in seen and v not in blocked:
                seen.add(v)
                frontier.append(v)
    return True


def is_t_semi_separator(grid: CylindricalGrid, eq_t: RowCompression,
                        s: Iterable[int], w_classes: Iterable[int]) -> bool:
    """Vertical separator compatible with the class profile of w_classes."""
    s = set(s)
    w_classes = set(w_classes)
    if not is_vertical_separator(grid, s):
        return False
    by_row_w: dict[int, set[int]] = {}
    for c in w_classes:
        by_row_w.setdefault(eq_t.row_of_class(c), set()).add(c)
    by_row_s: dict[int, list[int]] = {}
    for v in s:
        by_row_s.setdefault(grid.pos(v)[0], []).append(v)
    for i, verts in by_row_s.items():
        allowed = by_row_w.get(i, set())
        if len(verts) > len(allowed):
            return False
        if len(allowed) == 1:
            (ci,) = allowed
            members = set(eq_t.class_members(ci))
            if not set(verts) <= members:
                return False
    return True


def minimal_t_semi_separators(grid: CylindricalGrid, eq_t: RowCompression,
                              w_classes: Iterable[int],
                              max_size: int) -> list[frozenset[int]]:
    """Exhaustive enumeration of inclusion-minimal t-semi-separators.

    Candidate vertices per row are capped by the semi-separator counting
    condition, which keeps this feasible on toy grids only.
    """
    w_classes = set(w_classes)
    by_row_w: dict[int, set[int]] = {}
    for c in w_classes:
        by_row_w.setdefault(eq_t.row_of_class(c), set()).add(c)
    per_row_choices = []
    for i in range(grid.k):
        allowed = by_row_w.get(i, set())
        cap = len(allowed)
        if cap == 0:
            per_row_choices.append([()])
            continue
        if cap == 1:
            (ci,) = allowed
            pool = list(eq_t.class_members(ci))
        else:
            pool = [grid.vid(i, j) for j in range(grid.J)]
        opts = [()]
        for size in range(1, cap + 1):
            opts.extend(itertools.combinations(pool, size))
        per_row_choices.append(opts)

    found = []
    for combo in itertools.product(*per_row_choices):
        s = frozenset(v for part in combo for v in part)
        if not s or len(s) > max_size:
            continue
        if is_t_semi_separator(grid, eq_t, s, w_classes):
            found.append(s)
    minimal = []
    for s in found:
        if all(not is_t_semi_separator(grid, eq_t, s - {v}, w_classes)
               for v in s):
            minimal.append(s)
    return sorted(set(minimal), key=sorted)


# -- periodic path search -------------------------------------------------


@dataclass(frozen=True)
class PeriodicPathFamily:
    """A found monotone periodic path with its metadata."""
    rows: tuple[int, ...]
    period: int
    path: tuple[int, ...]
    twisting: Twisting


def _iter_automaton_paths(grid: CylindricalGrid, eq_t: RowCompression,
                          rows: Sequence[int],
                          blocked_state, blocked_vertex):
    """Yield monotone q-periodic paths over `rows`.

    The interior part follows a residue automaton: a cyclic step assignment
    on states (row, col mod q) with exactly q rightward steps and otherwise
    vertical steps, entered at column end_width and exited at the first
    arrival in the right end. Ends are crossed by straight runs. blocked_state
    (row, residue) and blocked_vertex (vertex id) veto states/vertices.
    Enumeration is deterministic: entry rows ascending, rightward step tried
    before vertical ones.
    """
    k, J, f = grid.k, grid.J, grid.end_width
    q = math.gcd(*[eq_t.periods[i] for i in rows])
    rowset = set(rows)

    def vertical_moves(i: int) -> list[int]:
        out = set()
        for d in (1, k - 1):
            i2 = (i + d) % k
            if i2 in rowset and i2 != i:
                out.add(i2)
        return sorted(out)

    entry_res = f % q

    def materialize(i_entry: int, assign) -> Optional[tuple[int, ...]]:
        path = [grid.vid(i_entry, j) for j in range(f)]
        i, j = i_entry, f
        while j < J - f:
            path.append(grid.vid(i, j))
            step = assign[(i, j % q)]
            if step == "R":
                j += 1
            else:
                i = step
        path.extend(grid.vid(i, jj) for jj in range(J - f, J))
        # endpoints carry no twisting arcs, so only interior path vertices
        # are subject to avoidance
        if any(blocked_vertex(v) for v in path[1:-1]):
            return None
        if len(set(path)) != len(path):
            return None
        return tuple(path)

    for i_entry in sorted(rows):
        if blocked_state(i_entry, entry_res):
            continue
        assign: dict[tuple[int, int], object] = {}

        def dfs(state: tuple[int, int], disp: int):
            if disp == q:
                if state == (i_entry, entry_res):
                    path = materialize(i_entry, assign)
                    if path is not None:
                        yield path
                return
            if state in assign or blocked_state(*state):
                return
            i, r = state
            for step in ["R"] + vertical_moves(i):
                if step == "R":
                    nxt, ndisp = (i, (r + 1) % q), disp + 1
                else:
                    nxt, ndisp = (step, r), disp
                assign[state] = step
                yield from dfs(nxt, ndisp)
            del assign[state]

        yield from dfs((i_entry, entry_res), 0)


def _row_subsets(grid: CylindricalGrid, max_rows: int) -> list[tuple[int, ...]]:
    subsets = []
    for size in range(1, max_rows + 1):
        subsets.extend(itertools.combinations(range(grid.k), size))
    return subsets


def iter_periodic_paths(grid: CylindricalGrid, eq_t: RowCompression,
                        rows: Sequence[int],
                        avoid_vertices: Iterable[int] = (),
                        avoid_states: Iterable[tuple[int, int]] = ()):
    """Yield PeriodicPathFamily candidates over `rows`, deterministic order."""
    rows = tuple(sorted(set(rows)))
    q = math.gcd(*[eq_t.periods[i] for i in rows])
    avoid_vertices = set(avoid_vertices)
    states = {(i, r % q) for (i, r) in avoid_states}
    # an interior avoided vertex is hit exactly when its residue state is
    # visited, so it blocks at state level; end vertices block pointwise
    for v in avoid_vertices:
        i, j = grid.pos(v)
        if grid.is_interior_col(j):
            states.add((i, j % q))

    def blocked_state(i: int, r: int) -> bool:
        return (i, r % q) in states

    def blocked_vertex(v: int) -> bool:
        if v in avoid_vertices:
            return True
        i, j = grid.pos(v)
        return (i, j % q) in states

    for path in _iter_automaton_paths(grid, eq_t, rows,
                                      blocked_state, blocked_vertex):
        tw = induced_twisting(grid, eq_t, path, rows)
        yield PeriodicPathFamily(rows, q, path, tw)


def find_periodic_path(grid: CylindricalGrid, eq_t: RowCompression,
                       rows: Sequence[int],
                       avoid_vertices: Iterable[int] = (),
                       avoid_states: Iterable[tuple[int, int]] = ()
                       ) -> Optional[PeriodicPathFamily]:
    for fam in iter_periodic_paths(grid, eq_t, rows,
                                   avoid_vertices, avoid_states):
        return fam
    return None


def is_separating(grid: CylindricalGrid, eq_t: RowCompression,
                  w_vertices: Iterable[int], rows: Sequence[int]) -> bool:
    """No monotone q-periodic path over `rows` induces a twisting avoiding
    the q-periodized closure of w_vertices."""
    rows = tuple(sorted(set(rows)))
    q = math.gcd(*[eq_t.periods[i] for i in rows])
    states = set()
    for v in w_vertices:
        i, j = grid.pos(v)
        states.add((i, j % q))
    fam = find_periodic_path(grid, eq_t, rows, avoid_states=states)
    return fam is None


def is_t_critical(grid: CylindricalGrid, eq_t: RowCompression,
                  w_classes: Iterable[int],
                  separator_size_cap: Optional[int] = None) -> bool:
    """A semi-separator exists and w separates every row set of size <= t+1."""
    w_classes = set(w_classes)
    w_vertices = [v for c in w_classes for v in eq_t.class_members(c)]
    cap = separator_size_cap
    if cap is None:
        cap = len(w_classes)
    if not minimal_t_semi_separators(grid, eq_t, w_classes, cap):
        return False
    for rows in _row_subsets(grid, min(eq_t.t + 1, grid.k)):
        if not is_separating(grid, eq_t, w_vertices, rows):
            return False
    return True


# -- roadblocks -----------------------------------------------------------


@dataclass(frozen=True)
class Roadblock:
    """Even-size set of neighbor slots at one equivalence class."""
    class_id: int
    slots: frozenset[int]

    def __post_init__(self):
        if len(self.slots) % 2 != 0:
            raise ValueError("roadblock must block an even number of slots")


def roadblock_avoided(grid: CylindricalGrid, eq_t: RowCompression,
                      t: Twisting, block: Roadblock) -> bool:
    """The twisting's slot trace differs from the blocked slots at every
    member of the class (strict super/subsets are allowed)."""
    members = eq_t.class_members(block.class_id)
    for u in members:
        if any(s >= grid.base.degree(u) for s in block.slots):
            raise ValueError("roadblock slot out of range for class degree")
        if t.trace(u, grid.base) == block.slots:
            return False
    return True


def end_to_end_twisting_search(grid: CylindricalGrid, eq_t: RowCompression,
                               cop_classes: Iterable[int] = (),
                               roadblocks: Iterable[Roadblock] = (),
                               max_rows: Optional[int] = None
                               ) -> Optional[Twisting]:
    """Search a compressible twisting that twists one first-column and one
    last-column edge, fixes all cop vertices, and avoids all roadblocks.

    Row subsets are tried smallest first (straight rows first); within a
    subset the monotone periodic-path automaton search runs per entry row.
    """
    cop_classes = sorted(set(cop_classes))
    roadblocks = list(roadblocks)
    cop_vertices = {v for c in cop_classes for v in eq_t.class_members(c)}
    if max_rows is None:
        max_rows = grid.k
    for rows in _row_subsets(grid, max_rows):
        for fam in iter_periodic_paths(grid, eq_t, rows,
                                       avoid_vertices=cop_vertices):
            tw = fam.twisting
            if any(not tw.fixes(v) for v in cop_vertices):
                continue
            if all(roadblock_avoided(grid, eq_t, tw, rb) for rb in roadblocks):
                return tw
    return None
