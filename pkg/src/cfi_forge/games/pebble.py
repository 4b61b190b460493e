"""Exact solvers for the r-round k-pebble game.

Two independent implementations back every value: a forward-materialized
game graph solved by backward induction (the fast default), and a plain
fixed-point sweep over the full canonical position space (the oracle).
Values are the minimum number of rounds the distinguishing player needs from
the start position, or infinity.
"""

from __future__ import annotations

import math
from typing import Mapping, Optional

from ..graphs import ColoredGraph, is_partial_isomorphism
from . import attractor
from .attractor import MIN, MAX, GameGraph
from .positions import PairTable, insert_sorted, remove_once

INFINITY = math.inf


def _canonical_start(table: PairTable, alpha: Optional[Mapping[int, int]],
                     beta: Optional[Mapping[int, int]]) -> tuple[int, ...]:
    alpha = dict(alpha or {})
    beta = dict(beta or {})
    if set(alpha) != set(beta):
        raise ValueError("pebble maps must have equal domains")
    return tuple(sorted(table.pid(alpha[i], beta[i]) for i in alpha))


def _move_bases(pos: tuple[int, ...], k: int):
    """Positions after Spoiler picks up a pebble (or takes a fresh one)."""
    if len(pos) < k:
        yield pos
    for p in sorted(set(pos)):
        yield remove_once(pos, p)


def pebble_value(g: ColoredGraph, h: ColoredGraph, k: int,
                 alpha: Optional[Mapping[int, int]] = None,
                 beta: Optional[Mapping[int, int]] = None,
                 canonical: bool = True):
    """Minimum rounds the distinguishing player needs, or INFINITY.

    canonical=False keeps pebble identities as explicit slots (no symmetry
    reduction); used only for oracle cross-checks.
    """
    if k < 1:
        raise ValueError("need at least one pebble")
    table = PairTable(g, h)
    if canonical:
        start = _canonical_start(table, alpha, beta)
        if len(start) > k:
            raise ValueError("start position uses more than k pebbles")
        if not table.regular_ok(start):
            return 0
        graph, start_id = _build_canonical(table, k, start)
    else:
        alpha = dict(alpha or {})
        beta = dict(beta or {})
        start_slots = [None] * k
        for i in alpha:
            start_slots[i] = table.pid(alpha[i], beta[i])
        start = tuple(start_slots)
        if not table.regular_ok(p for p in start if p is not None):
            return 0
        graph, start_id = _build_slotted(table, k, start)
    values = attractor.solve(graph)
    val = values[start_id]
    return INFINITY if val == attractor.INF else int(val)


def _build_canonical(table: PairTable, k: int,
                     start: tuple[int, ...]) -> tuple[GameGraph, int]:
    g, h = table.g, table.h
    graph = GameGraph()
    term = graph.node(("T",), MAX, terminal=0)
    start_id = graph.node(("S", start), MIN)
    todo = [start]
    seen = {start}
    while todo:
        pos = todo.pop()
        sid = graph.ids[("S", pos)]
        for base in _move_bases(pos, k):
            for side in (0, 1):
                n_place = g.n if side == 0 else h.n
                for u in range(n_place):
                    dkey = ("D", base, side, u)
                    known = dkey in graph.ids
                    did = graph.node(dkey, MAX)
                    graph.edge(sid, 0, did)
                    if known:
                        continue
                    n_resp = h.n if side == 0 else g.n
                    any_valid = False
                    for w in range(n_resp):
                        pid = table.pid(u, w) if side == 0 else table.pid(w, u)
                        if not table.extend_ok(base, pid):
                            continue
                        newpos = insert_sorted(base, pid)
                        any_valid = True
                        skey = ("S", newpos)
                        fresh = skey not in graph.ids
                        tid = graph.node(skey, MIN)
                        graph.edge(did, 1, tid)
                        if fresh and newpos not in seen:
                            seen.add(newpos)
                            todo.append(newpos)
                    if not any_valid:
                        graph.edge(did, 1, term)
    return graph, start_id


def _build_slotted(table: PairTable, k: int,
                   start: tuple) -> tuple[GameGraph, int]:
    """Pebble slots kept distinct; exponentially larger, oracle use only."""
    g, h = table.g, table.h
    graph = GameGraph()
    term = graph.node(("T",), MAX, terminal=0)
    start_id = graph.node(("S", start), MIN)
    todo = [start]
    while todo:
        pos = todo.pop()
        sid = graph.ids[("S", pos)]
        occupied = [p for p in pos if p is not None]
        for slot in range(k):
            base = list(pos)
            base[slot] = None
            rest = [p for p in base if p is not None]
            for side in (0, 1):
                n_place = g.n if side == 0 else h.n
                for u in range(n_place):
                    dkey = ("D", tuple(base), slot, side, u)
                    known = dkey in graph.ids
                    did = graph.node(dkey, MAX)
                    graph.edge(sid, 0, did)
                    if known:
                        continue
                    n_resp = h.n if side == 0 else g.n
                    any_valid = False
                    for w in range(n_resp):
                        pid = table.pid(u, w) if side == 0 else table.pid(w, u)
                        if not table.extend_ok(tuple(rest), pid):
                            continue
                        nxt = list(base)
                        nxt[slot] = pid
                        newpos = tuple(nxt)
                        any_valid = True
                        skey = ("S", newpos)
                        fresh = skey not in graph.ids
                        tid = graph.node(skey, MIN)
                        graph.edge(did, 1, tid)
                        if fresh:
                            todo.append(newpos)
                    if not any_valid:
                        graph.edge(did, 1, term)
    return graph, start_id


def _all_valid_positions(table: PairTable, k: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []

    def extend(pos: tuple[int, ...], lo: int) -> None:
        out.append(pos)
        if len(pos) == k:
            return
        for pid in range(lo, table.n_pairs):
            if table.extend_ok(pos, pid):
                extend(insert_sorted(pos, pid), pid)

    extend((), 0)
    return out


def pebble_value_fixed_point(g: ColoredGraph, h: ColoredGraph, k: int,
                             alpha: Optional[Mapping[int, int]] = None,
                             beta: Optional[Mapping[int, int]] = None):
    """Oracle solver: sweep the full canonical position space until stable.

    Round r marks exactly the positions from which the distinguishing player
    wins the r-round game; sweeping stops at the first fixed point and
    everything unmarked is a survivable position (INFINITY).
    """
    if k < 1:
        raise ValueError("need at least one pebble")
    table = PairTable(g, h)
    start = _canonical_start(table, alpha, beta)
    if len(start) > k:
        raise ValueError("start position uses more than k pebbles")
    if not table.regular_ok(start):
        return 0

    space = _all_valid_positions(table, k)
    decided: dict[tuple[int, ...], int] = {}
    undecided = set(space)
    g_n, h_n = table.g.n, table.h.n
    round_no = 0
    while undecided:
        round_no += 1
        newly = []
        for pos in undecided:
            if _spoiler_forces(table, k, pos, decided, g_n, h_n):
                newly.append(pos)
        if not newly:
            break
        for pos in newly:
            decided[pos] = round_no
            undecided.discard(pos)
    if start in decided:
        return decided[start]
    return INFINITY


def _spoiler_forces(table: PairTable, k: int, pos: tuple[int, ...],
                    decided: Mapping, g_n: int, h_n: int) -> bool:
    """Some placement exists that every response loses within one round."""
    for base in _move_bases(pos, k):
        for side in (0, 1):
            n_place = g_n if side == 0 else h_n
            n_resp = h_n if side == 0 else g_n
            for u in range(n_place):
                refuted = False
                for w in range(n_resp):
                    pid = table.pid(u, w) if side == 0 else table.pid(w, u)
                    if not table.extend_ok(base, pid):
                        continue
                    if insert_sorted(base, pid) not in decided:
                        refuted = True
                        break
                if not refuted:
                    return True
    return False


def spoiler_certificate(g: ColoredGraph, h: ColoredGraph, k: int,
                        max_nodes: int = 20000) -> Optional[dict]:
    """Depth-r strategy tree witnessing a finite game value, None if the
    game value is infinite."""
    table = PairTable(g, h)
    start = ()
    graph, start_id = _build_canonical(table, k, start)
    values = attractor.solve(graph)
    if values[start_id] == attractor.INF:
        return None
    rev: dict[int, object] = {v: key for key, v in graph.ids.items()}
    budget = [max_nodes]

    def best_move(sid: int) -> Optional[int]:
        want = values[sid]
        for cost, did in graph.succ[sid]:
            if values[did] + cost == want:
                return did
        return None

    def build(sid: int) -> dict:
        key = rev[sid]
        node = {"position": list(key[1]), "value": values[sid]}
        if budget[0] <= 0:
            node["truncated"] = True
            return node
        budget[0] -= 1
        did = best_move(sid)
        _, base, side, u = rev[did]
        node["move"] = {"side": "left" if side == 0 else "right",
                        "keep": list(base), "vertex": u}
        responses = {}
        n_resp = table.h.n if side == 0 else table.g.n
        for w in range(n_resp):
            pid = table.pid(u, w) if side == 0 else table.pid(w, u)
            if not table.extend_ok(base, pid):
                responses[str(w)] = "falsified"
            else:
                tid = graph.ids[("S", insert_sorted(base, pid))]
                responses[str(w)] = build(tid)
        node["responses"] = responses
        return node

    return build(start_id)


def verify_partial_isomorphism_consistency(g: ColoredGraph, h: ColoredGraph,
                                           pos) -> bool:
    """Cross-check the fast pair-table validity against the direct check."""
    table = PairTable(g, h)
    alpha = {i: divmod(p, h.n)[0] for i, p in enumerate(pos)}
    beta = {i: divmod(p, h.n)[1] for i, p in enumerate(pos)}
    return table.regular_ok(pos) == is_partial_isomorphism(g, h, alpha, beta)
