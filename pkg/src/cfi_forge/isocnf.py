"""CNF encodings of graph isomorphism, DIMACS I/O, and a tiny exact solver.

Variables x[u][v] (one per vertex pair, row-major over ids, DIMACS index
u*|V(H)| + v + 1) mean "u maps to v". Clause families: color (each vertex maps
somewhere / is mapped from somewhere within its color class), bijection
(injective + functional), edge (edges map to edges, non-edges to non-edges).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, TextIO

from .graphs import ColoredGraph, color_class_profile

MINI_SAT_VAR_CAP = 20_000


class TooLarge(ValueError):
    pass


class SatisfiableFormula(ValueError):
    pass


@dataclass
class IsoFormula:
    """ISO CNF for a pair of colored graphs.

    Clauses are stored as sorted tuples of DIMACS literals, deduplicated, in
    family blocks (color, then bijection, then edge); ids are positions in
    that order. `width` is the maximal color class size of the two graphs.
    """

    n_g: int
    n_h: int
    clauses: list[tuple[int, ...]]
    tags: list[str]
    width: int
    comments: list[str] = field(default_factory=list)

    @property
    def num_vars(self) -> int:
        return self.n_g * self.n_h

    def var(self, u: int, v: int) -> int:
        """DIMACS variable index for 'u maps to v' (1-based)."""
        return u * self.n_h + v + 1

    def pair(self, var: int) -> tuple[int, int]:
        return divmod(var - 1, self.n_h)

    def family_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for t in self.tags:
            out[t] = out.get(t, 0) + 1
        return out

    def color_clauses(self) -> list[tuple[int, ...]]:
        return [c for c, t in zip(self.clauses, self.tags) if t == "color"]


def build_iso(g: ColoredGraph, h: ColoredGraph,
              comments: Iterable[str] = ()) -> IsoFormula:
    nh = h.n
    clauses: list[tuple[int, ...]] = []
    tags: list[str] = []
    seen: set[tuple[int, ...]] = set()

    def add(lits: Iterable[int], tag: str) -> None:
        key = tuple(sorted(set(lits)))
        if key not in seen:
            seen.add(key)
            clauses.append(key)
            tags.append(tag)

    def var(u: int, v: int) -> int:
        return u * nh + v + 1

    h_by_color: dict[int, list[int]] = {}
    for v in range(h.n):
        h_by_color.setdefault(h.colors[v], []).append(v)
    g_by_color: dict[int, list[int]] = {}
    for u in range(g.n):
        g_by_color.setdefault(g.colors[u], []).append(u)

    for u in range(g.n):
        add((var(u, v) for v in h_by_color.get(g.colors[u], [])), "color")
    for v in range(h.n):
        add((var(u, v) for u in g_by_color.get(h.colors[v], [])), "color")

    for w in range(h.n):
        for u, u2 in itertools.combinations(range(g.n), 2):
            add((-var(u, w), -var(u2, w)), "bijection")
    for u in range(g.n):
        for v, w in itertools.combinations(range(h.n), 2):
            add((-var(u, v), -var(u, w)), "bijection")

    for u, u2 in itertools.combinations(range(g.n), 2):
        ge = g.has_edge(u, u2)
        for v in range(h.n):
            for w in range(h.n):
                if v == w:
                    continue
                if ge != h.has_edge(v, w):
                    add((-var(u, v), -var(u2, w)), "edge")

    _, wg = color_class_profile(g)
    _, wh = color_class_profile(h)
    return IsoFormula(g.n, h.n, clauses, tags, max(wg, wh), list(comments))


def violated_clause(formula: IsoFormula,
                    sigma: Mapping[int, int]) -> Optional[int]:
    """Smallest id of a clause all of whose literals sigma falsifies."""
    for cid, clause in enumerate(formula.clauses):
        falsified = True
        for lit in clause:
            val = sigma.get(abs(lit))
            if val is None or (val == 1) == (lit > 0):
                falsified = False
                break
        if falsified:
            return cid
    return None


def mini_sat(formula: IsoFormula) -> Optional[dict[int, int]]:
    """Unit propagation + chronological backtracking; no learning.

    Returns a model as {var: 0/1} or None if unsatisfiable. Exact, capped by
    variable count so it stays an auditable desk-scale oracle.
    """
    if formula.num_vars > MINI_SAT_VAR_CAP:
        raise TooLarge(f"{formula.num_vars} variables exceed the solver cap")
    clauses = [list(c) for c in formula.clauses]
    if any(not c for c in clauses):
        return None

    assign: dict[int, int] = {}
    trail: list[int] = []

    def value(lit: int) -> Optional[bool]:
        v = assign.get(abs(lit))
        if v is None:
            return None
        return (v == 1) == (lit > 0)

    def propagate() -> bool:
        changed = True
        while changed:
            changed = False
            for c in clauses:
                unassigned = None
                sat = False
                count = 0
                for lit in c:
                    val = value(lit)
                    if val is True:
                        sat = True
                        break
                    if val is None:
                        unassigned = lit
                        count += 1
                if sat:
                    continue
                if count == 0:
                    return False
                if count == 1:
                    var = abs(unassigned)
                    assign[var] = 1 if unassigned > 0 else 0
                    trail.append(var)
                    changed = True
        return True

    def solve() -> bool:
        mark = len(trail)
        if not propagate():
            _rollback(assign, trail, mark)
            return False
        var = next((v for v in range(1, formula.num_vars + 1)
                    if v not in assign), None)
        if var is None:
            return True
        for val in (1, 0):
            assign[var] = val
            trail.append(var)
            if solve():
                return True
            _rollback(assign, trail, len(trail) - 1)
        _rollback(assign, trail, mark)
        return False

    if solve():
        model = {v: assign.get(v, 0) for v in range(1, formula.num_vars + 1)}
        return model
    return None


def _rollback(assign: dict[int, int], trail: list[int], mark: int) -> None:
    while len(trail) > mark:
        assign.pop(trail.pop(), None)


def decode_model(formula: IsoFormula,
                 model: Mapping[int, int]) -> dict[int, int]:
    """Vertex bijection from a satisfying assignment."""
    out = {}
    for var, val in model.items():
        if val == 1:
            u, v = formula.pair(var)
            out[u] = v
    return out


def write_dimacs(formula: IsoFormula, sink: TextIO) -> None:
    for line in formula.comments:
        sink.write(f"c {line}\n")
    sink.write(f"c vars are row-major pairs: x(u,v) = u*{formula.n_h}+v+1\n")
    sink.write(f"p cnf {formula.num_vars} {len(formula.clauses)}\n")
    for clause in formula.clauses:
        sink.write(" ".join(str(lit) for lit in clause) + " 0\n")


def read_dimacs(source: TextIO) -> IsoFormula:
    """Read a DIMACS file produced by write_dimacs.

    The pair dimensions are recovered from the row-major comment line; plain
    foreign DIMACS is accepted with n_g=1.
    """
    comments: list[str] = []
    n_vars = n_clauses = None
    n_h = None
    clauses: list[tuple[int, ...]] = []
    for raw in source:
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            body = line[1:].strip()
            if body.startswith("vars are row-major pairs"):
                n_h = int(body.split("u*")[1].split("+")[0])
            else:
                comments.append(body)
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"malformed header: {line!r}")
            n_vars, n_clauses = int(parts[2]), int(parts[3])
            continue
        lits = [int(x) for x in line.split()]
        if lits[-1] != 0:
            raise ValueError(f"clause not zero-terminated: {line!r}")
        clauses.append(tuple(lits[:-1]))
    if n_vars is None:
        raise ValueError("missing problem header")
    if len(clauses) != n_clauses:
        raise ValueError("clause count does not match header")
    if n_h is None or n_vars % max(n_h, 1) != 0:
        n_h = n_vars
    tags = ["unknown"] * len(clauses)
    width = max((len(c) for c in clauses), default=0)
    return IsoFormula(n_vars // n_h if n_h else 1, n_h,
                      clauses, tags, width, comments)
