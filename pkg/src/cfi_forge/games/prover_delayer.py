"""Exact solver for the k-narrow Prover-Delayer game on ISO formulas, plus
an exhaustive-Prover verifier for fixed Delayer strategies.

Each round Prover restricts the assignment to at most k-1 variables and
either queries a variable (Delayer commits a value or concedes the choice
for a point) or names a color clause (Delayer commits some non-falsified
variable of it to 1, or names two and concedes the choice for a point).
Prover wins when the assignment falsifies a clause; the value is the number
of points an optimal Delayer scores before that.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Mapping, Optional

from ..isocnf import IsoFormula, SatisfiableFormula, mini_sat
from . import attractor
from .attractor import MIN, MAX, GameGraph

INFINITY = math.inf

Assignment = tuple[tuple[int, int], ...]  # sorted ((var, value), ...)


class _Rules:
    """Shared move/violation machinery bound to one formula."""

    def __init__(self, formula: IsoFormula):
        self.formula = formula
        self.num_vars = formula.num_vars
        self.color_ids = [i for i, t in enumerate(formula.tags)
                          if t == "color"]
        self.by_var: dict[int, list[int]] = {}
        for cid, clause in enumerate(formula.clauses):
            for lit in clause:
                self.by_var.setdefault(abs(lit), []).append(cid)

    def violates(self, sigma: Mapping[int, int]) -> bool:
        cand: set[int] = set()
        for v in sigma:
            cand.update(self.by_var.get(v, ()))
        for cid in cand:
            ok = False
            for lit in self.formula.clauses[cid]:
                val = sigma.get(abs(lit))
                if val is None or (val == 1) == (lit > 0):
                    ok = True
                    break
            if not ok:
                return True
        return False

    def clause_options(self, cid: int, sigma: Mapping[int, int]) -> list[int]:
        """Variables of the clause not set to 0 (the narrow-move choices)."""
        return [abs(lit) for lit in self.formula.clauses[cid]
                if sigma.get(abs(lit)) != 0]

    @staticmethod
    def restrictions(sigma: Assignment, k: int):
        entries = list(sigma)
        cap = min(len(entries), k - 1)
        for size in range(cap + 1):
            for combo in itertools.combinations(entries, size):
                yield combo


def _set(sigma: Assignment, var: int, val: int) -> Assignment:
    out = [(v, b) for (v, b) in sigma if v != var]
    out.append((var, val))
    return tuple(sorted(out))


def prover_delayer_value(formula: IsoFormula, k: int,
                         sigma0: Assignment = (),
                         max_nodes: int = 5_000_000,
                         check_unsat: bool = True):
    """Optimal Delayer points before Prover violates a clause, or INFINITY
    when Prover cannot force a violation with width k."""
    if k < 1:
        raise ValueError("k must be positive")
    if check_unsat and mini_sat(formula) is not None:
        raise SatisfiableFormula("the isomorphism formula is satisfiable; "
                                 "the game need not terminate")
    rules = _Rules(formula)
    graph = GameGraph()
    sigma0 = tuple(sorted(sigma0))

    def p_node(sigma: Assignment) -> int:
        key = ("P", sigma)
        if key in graph.ids:
            return graph.ids[key]
        terminal = 0 if rules.violates(dict(sigma)) else None
        nid = graph.node(key, MIN, terminal=terminal)
        if terminal is None:
            todo.append(key)
        return nid

    start_key = ("P", sigma0)
    todo: list[tuple] = []
    start_id = p_node(sigma0)

    while todo:
        key = todo.pop()
        nid = graph.ids[key]
        if len(graph) > max_nodes:
            raise MemoryError(f"game graph exceeded {max_nodes} nodes")
        kind = key[0]
        if kind == "P":
            sigma = key[1]
            for restricted in rules.restrictions(sigma, k):
                qkey = ("Q", restricted)
                fresh = qkey not in graph.ids
                qid = graph.node(qkey, MIN)
                graph.edge(nid, 0, qid)
                if fresh:
                    todo.append(qkey)
        elif kind == "Q":
            sigma = key[1]
            dom = {v for v, _ in sigma}
            for x in range(1, rules.num_vars + 1):
                if x in dom:
                    continue
                dkey = ("R", sigma, x)
                fresh = dkey not in graph.ids
                did = graph.node(dkey, MAX)
                graph.edge(nid, 0, did)
                if fresh:
                    todo.append(dkey)
            for cid in rules.color_ids:
                dkey = ("N", sigma, cid)
                fresh = dkey not in graph.ids
                did = graph.node(dkey, MAX)
                graph.edge(nid, 0, did)
                if fresh:
                    todo.append(dkey)
        elif kind == "R":
            _, sigma, x = key
            for val in (0, 1):
                graph.edge(nid, 0, p_node(_set(sigma, x, val)))
            mkey = ("r", sigma, x)
            fresh = mkey not in graph.ids
            mid = graph.node(mkey, MIN)
            graph.edge(nid, 1, mid)
            if fresh:
                for val in (0, 1):
                    graph.edge(mid, 0, p_node(_set(sigma, x, val)))
        elif kind == "N":
            _, sigma, cid = key
            options = rules.clause_options(cid, dict(sigma))
            if not options:
                # the restricted assignment already falsifies the clause
                graph.edge(nid, 0, graph.node(("T0",), MAX, terminal=0))
                continue
            for x in options:
                graph.edge(nid, 0, p_node(_set(sigma, x, 1)))
            for x, y in itertools.combinations(sorted(options), 2):
                mkey = ("n", sigma, x, y)
                fresh = mkey not in graph.ids
                mid = graph.node(mkey, MIN)
                graph.edge(nid, 1, mid)
                if fresh:
                    graph.edge(mid, 0, p_node(_set(sigma, x, 1)))
                    graph.edge(mid, 0, p_node(_set(sigma, y, 1)))

    values = attractor.solve(graph)
    val = values[start_id]
    return INFINITY if val == attractor.INF else int(val)


def verify_delayer_floor(formula: IsoFormula, k: int, delayer,
                         points_floor: int,
                         sigma0: Assignment = (),
                         max_states: int = 2_000_000) -> dict:
    """Exhaustive Prover search against a fixed (Markov) Delayer strategy.

    Fails iff some Prover line reaches a violated assignment while Delayer
    has scored fewer than points_floor points. The Delayer must implement
    respond_resolution(sigma_dict, x) -> ("commit", val) | ("point",)
    and respond_narrow(sigma_dict, clause_id, options)
    -> ("commit", var) | ("point", var, var).
    """
    rules = _Rules(formula)
    sigma0 = tuple(sorted(sigma0))
    seen: set[tuple[Assignment, int]] = set()
    stack: list[tuple[Assignment, int]] = [(sigma0, 0)]
    explored = 0
    while stack:
        sigma, points = stack.pop()
        if (sigma, points) in seen:
            continue
        seen.add((sigma, points))
        explored += 1
        if explored > max_states:
            raise MemoryError("exhaustive Prover search exceeded its budget")
        if rules.violates(dict(sigma)):
            if points < points_floor:
                return {"ok": False, "points": points, "sigma": sigma,
                        "states": explored}
            continue

        def push(nsigma: Assignment, npoints: int) -> Optional[dict]:
            if npoints >= points_floor:
                # Delayer already met the floor on this line
                return None
            if rules.violates(dict(nsigma)):
                return {"ok": False, "points": npoints, "sigma": nsigma,
                        "states": explored}
            stack.append((nsigma, npoints))
            return None

        for restricted in rules.restrictions(sigma, k):
            rdict = dict(restricted)
            dom = set(rdict)
            for x in range(1, rules.num_vars + 1):
                if x in dom:
                    continue
                resp = delayer.respond_resolution(rdict, x)
                if resp[0] == "commit":
                    bad = push(_set(restricted, x, resp[1]), points)
                    if bad:
                        return bad
                else:
                    for val in (0, 1):
                        bad = push(_set(restricted, x, val), points + 1)
                        if bad:
                            return bad
            for cid in rules.color_ids:
                options = rules.clause_options(cid, rdict)
                if not options:
                    if points < points_floor:
                        return {"ok": False, "points": points,
                                "sigma": restricted, "states": explored}
                    continue
                resp = delayer.respond_narrow(rdict, cid, tuple(options))
                if resp[0] == "commit":
                    bad = push(_set(restricted, resp[1], 1), points)
                    if bad:
                        return bad
                else:
                    for z in resp[1:]:
                        bad = push(_set(restricted, z, 1), points + 1)
                        if bad:
                            return bad
    return {"ok": True, "states": explored}
