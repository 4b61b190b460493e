"""Exact solver for the k-pebble game with blocking.

Positions are multisets of (pair, mark) pebbles. Spoiler either makes a
regular move (place one side, Duplicator answers, pair marked regular, round
ends) or a blocking move (place both sides, Duplicator chooses the mark; a
blocking mark keeps the round open). A position falsifies when the regular
part stops being a partial isomorphism or a regular pebble coincides with a
blocking one. Values count completed-or-open charged rounds until Spoiler
wins: a falsification inside an open round charges that round.
"""

from __future__ import annotations

import math
from typing import Iterable, Optional

from ..graphs import ColoredGraph
from . import attractor
from .attractor import MIN, MAX, GameGraph
from .positions import (BLOCKING, REGULAR, PairTable, blocking_valid,
                        insert_sorted, remove_once)

INFINITY = math.inf


class StateSpaceTooLarge(RuntimeError):
    pass


def _valid(table: PairTable, pos: tuple[int, ...]) -> bool:
    return blocking_valid(table, ((it >> 1, it & 1) for it in pos))


def _extend_valid(table: PairTable, pos: tuple[int, ...], item: int) -> bool:
    """pos valid; is pos + item still valid? Incremental version."""
    pid, mark = item >> 1, item & 1
    if mark == REGULAR:
        if (pid << 1 | BLOCKING) in pos:
            return False
        return table.extend_ok(tuple(it >> 1 for it in pos
                                     if it & 1 == REGULAR), pid)
    return (pid << 1 | REGULAR) not in pos


def _move_bases(pos: tuple[int, ...], k: int):
    if len(pos) < k:
        yield pos
    for it in sorted(set(pos)):
        yield remove_once(pos, it)


class BlockingGame:
    """Materialized blocking-game graph with solved values."""

    def __init__(self, g: ColoredGraph, h: ColoredGraph, k: int,
                 full_space: bool = True,
                 start: tuple[int, ...] = (),
                 max_nodes: int = 3_000_000):
        if k < 1:
            raise ValueError("need at least one pebble")
        self.g, self.h, self.k = g, h, k
        self.table = PairTable(g, h)
        self.graph = GameGraph()
        self.term = self.graph.node(("T",), MAX, terminal=0)
        self.max_nodes = max_nodes

        seeds = [start]
        if full_space:
            seeds = self._all_positions()
        elif not _valid(self.table, start):
            seeds = []
        for pos in seeds:
            self.graph.node(("S", pos), MIN)
        todo = list(seeds)
        done = set(seeds)
        while todo:
            pos = todo.pop()
            for newpos in self._expand(pos):
                if newpos not in done:
                    done.add(newpos)
                    todo.append(newpos)
        self.values = attractor.solve(self.graph)

    def _check_budget(self) -> None:
        if len(self.graph) > self.max_nodes:
            raise StateSpaceTooLarge(
                f"blocking game exceeded {self.max_nodes} nodes")

    def _all_positions(self) -> list[tuple[int, ...]]:
        out: list[tuple[int, ...]] = []
        n_items = self.table.n_pairs * 2

        def extend(pos: tuple[int, ...], lo: int) -> None:
            out.append(pos)
            if len(pos) == self.k:
                return
            for item in range(lo, n_items):
                if _extend_valid(self.table, pos, item):
                    extend(insert_sorted(pos, item), item)

        extend((), 0)
        return out

    def _expand(self, pos: tuple[int, ...]):
        table, graph = self.table, self.graph
        g_n, h_n = self.g.n, self.h.n
        sid = graph.node(("S", pos), MIN)
        self._check_budget()
        new_positions = []

        def s_target(newpos: tuple[int, ...]) -> int:
            fresh = ("S", newpos) not in graph.ids
            tid = graph.node(("S", newpos), MIN)
            if fresh:
                new_positions.append(newpos)
            return tid

        for base in _move_bases(pos, self.k):
            # regular moves: Spoiler places one side, Duplicator answers
            for side in (0, 1):
                n_place = g_n if side == 0 else h_n
                for u in range(n_place):
                    dkey = ("R", base, side, u)
                    known = dkey in graph.ids
                    did = graph.node(dkey, MAX)
                    graph.edge(sid, 0, did)
                    if known:
                        continue
                    n_resp = h_n if side == 0 else g_n
                    any_valid = False
                    for w in range(n_resp):
                        pid = (table.pid(u, w) if side == 0
                               else table.pid(w, u))
                        item = pid << 1 | REGULAR
                        if not _extend_valid(table, base, item):
                            continue
                        any_valid = True
                        graph.edge(did, 1, s_target(insert_sorted(base, item)))
                    if not any_valid:
                        graph.edge(did, 1, self.term)
            # blocking moves: Spoiler places both sides, Duplicator marks
            for pid in range(table.n_pairs):
                dkey = ("B", base, pid)
                known = dkey in graph.ids
                did = graph.node(dkey, MAX)
                graph.edge(sid, 0, did)
                if known:
                    continue
                for mark, cost in ((REGULAR, 1), (BLOCKING, 0)):
                    item = pid << 1 | mark
                    if _extend_valid(table, base, item):
                        graph.edge(did, cost,
                                   s_target(insert_sorted(base, item)))
                    else:
                        # falsified inside the round still charges it
                        graph.edge(did, 1, self.term)
        return new_positions

    def value(self, pos: tuple[int, ...] = ()):
        sid = self.graph.ids.get(("S", pos))
        if sid is None:
            if not _valid(self.table, pos):
                return 0
            raise KeyError("position outside the materialized space")
        val = self.values[sid]
        return INFINITY if val == attractor.INF else int(val)


def blocking_value(g: ColoredGraph, h: ColoredGraph, k: int,
                   start: tuple[int, ...] = (),
                   max_nodes: int = 3_000_000):
    """Minimum rounds Spoiler needs in the blocking game, or INFINITY."""
    if start and not _valid(PairTable(g, h), start):
        return 0
    game = BlockingGame(g, h, k, full_space=False, start=start,
                        max_nodes=max_nodes)
    return game.value(start)


def position_items(pairs_with_marks: Iterable[tuple[int, int, int, str]],
                   h_n: int) -> tuple[int, ...]:
    """Encode [(u, v, mark)] triples; mark 'regular'/'blocking'."""
    items = []
    for u, v, mark in pairs_with_marks:  # type: ignore[misc]
        m = REGULAR if mark == "regular" else BLOCKING
        items.append(((u * h_n + v) << 1) | m)
    return tuple(sorted(items))


class DuplicatorBlockingStrategy:
    """Optimal Duplicator play backed by a full-space solved game.

    Markov: decisions depend only on the canonical current position, so the
    strategy is total on every valid position of the game.
    """

    def __init__(self, game: BlockingGame):
        self.game = game
        self.table = game.table

    def value(self, pos: tuple[int, ...]):
        """Rounds Spoiler still needs from pos (0 when pos is falsified)."""
        if not _valid(self.table, pos):
            return 0
        return self.game.value(pos)

    def survival(self, pos: tuple[int, ...] = ()):
        """Rounds Duplicator survives from pos against optimal play."""
        v = self.value(pos)
        return v if v == INFINITY else max(0, v - 1)

    def respond_regular(self, pos: tuple[int, ...], base: tuple[int, ...],
                        side: int, u: int) -> Optional[int]:
        """Best response vertex to a regular move, None if every response
        falsifies."""
        table = self.table
        n_resp = self.game.h.n if side == 0 else self.game.g.n
        best_w, best_val = None, -1
        for w in range(n_resp):
            pid = table.pid(u, w) if side == 0 else table.pid(w, u)
            item = pid << 1 | REGULAR
            if not _extend_valid(table, base, item):
                continue
            val = self.value(insert_sorted(base, item))
            if val > best_val:
                best_w, best_val = w, val
        return best_w

    def choose_mark(self, base: tuple[int, ...], pid: int) -> int:
        """Mark for a blocking-move placement, maximizing rounds Spoiler
        still needs (ties prefer blocking)."""
        best_mark, best_total = BLOCKING, -1.0
        for mark, cost in ((BLOCKING, 0), (REGULAR, 1)):
            item = pid << 1 | mark
            if _extend_valid(self.table, base, item):
                total = self.value(insert_sorted(base, item)) + cost
            else:
                total = 1
            if total > best_total:
                best_mark, best_total = mark, total
        return best_mark
