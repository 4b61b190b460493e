"""Independent oracles used by the test suite.

Everything here recomputes results by brute force, separately from the
library code paths it checks.
"""

from __future__ import annotations

import heapq
import itertools
from typing import Iterable, Optional

from cfi_forge.graphs import ColoredGraph
from cfi_forge.isocnf import IsoFormula


def permutation_isomorphism(g: ColoredGraph,
                            h: ColoredGraph) -> Optional[dict[int, int]]:
    """Try every color-respecting permutation; n <= 8 only."""
    if g.n != h.n:
        return None
    if g.n > 8:
        raise ValueError("permutation oracle capped at 8 vertices")
    for perm in itertools.permutations(range(h.n)):
        if any(g.colors[u] != h.colors[perm[u]] for u in range(g.n)):
            continue
        ok = True
        for u in range(g.n):
            for v in range(u + 1, g.n):
                if g.has_edge(u, v) != h.has_edge(perm[u], perm[v]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return {u: perm[u] for u in range(g.n)}
    return None


def connected_graphs(n: int, max_degree: int) -> Iterable[tuple]:
    """All labeled connected graphs on n vertices within the degree cap,
    as sorted edge tuples."""
    all_edges = list(itertools.combinations(range(n), 2))
    for bits in range(1 << len(all_edges)):
        edges = tuple(e for i, e in enumerate(all_edges) if bits >> i & 1)
        deg = [0] * n
        for a, b in edges:
            deg[a] += 1
            deg[b] += 1
        if any(d > max_degree for d in deg):
            continue
        if n > 1 and not _connected(n, edges):
            continue
        yield edges


def _connected(n: int, edges: tuple) -> bool:
    adj = {v: [] for v in range(n)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    todo = [0]
    while todo:
        u = todo.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return len(seen) == n


def min_treelike_refutation_size(formula: IsoFormula,
                                 width: int) -> Optional[int]:
    """Size of the smallest tree-like resolution refutation using only
    clauses of at most `width` literals, or None if none exists.

    Size counts all clause occurrences in the tree (leaves and resolvents).
    Variables with no positive occurrence can never be resolved away, so
    clauses containing them are unusable and are dropped up front; this
    loses no refutations because a negative literal survives into every
    descendant until resolved on its variable.
    """
    positive = set()
    for clause in formula.clauses:
        for lit in clause:
            if lit > 0:
                positive.add(lit)
    usable = []
    for clause in formula.clauses:
        if len(clause) > width:
            continue
        if any(lit < 0 and -lit not in positive for lit in clause):
            continue
        usable.append(tuple(sorted(clause)))
    if not usable:
        return None

    cost: dict[tuple, int] = {}
    heap: list[tuple[int, tuple]] = []
    for c in usable:
        if cost.get(c, 1 << 60) > 1:
            cost[c] = 1
            heapq.heappush(heap, (1, c))
    done: list[tuple] = []
    finalized: set[tuple] = set()

    def resolvents(c1: tuple, c2: tuple):
        s1, s2 = set(c1), set(c2)
        for lit in c1:
            if -lit in s2:
                merged = (s1 - {lit}) | (s2 - {-lit})
                if len(merged) > width:
                    continue
                if any(-m in merged for m in merged):
                    continue  # tautology
                yield tuple(sorted(merged))

    while heap:
        c_cost, clause = heapq.heappop(heap)
        if clause in finalized or c_cost > cost.get(clause, 1 << 60):
            continue
        finalized.add(clause)
        if clause == ():
            return c_cost
        done.append(clause)
        for other in done:
            for res in itertools.chain(resolvents(clause, other),
                                       resolvents(other, clause)):
                new_cost = c_cost + cost[other] + 1
                if new_cost < cost.get(res, 1 << 60):
                    cost[res] = new_cost
                    heapq.heappush(heap, (new_cost, res))
    return None


def assignment_satisfies(formula: IsoFormula, model: dict[int, int]) -> bool:
    for clause in formula.clauses:
        if not any((model.get(abs(lit), 0) == 1) == (lit > 0)
                   for lit in clause):
            return False
    return True


def brute_force_sat(formula: IsoFormula,
                    var_cap: int = 22) -> Optional[dict[int, int]]:
    """Truth-table satisfiability check for tiny formulas."""
    n = formula.num_vars
    if n > var_cap:
        raise ValueError("truth-table oracle capped")
    for bits in range(1 << n):
        model = {v: bits >> (v - 1) & 1 for v in range(1, n + 1)}
        if assignment_satisfies(formula, model):
            return model
    return None
