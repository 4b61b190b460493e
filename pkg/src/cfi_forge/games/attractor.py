"""Backward induction over materialized two-player game graphs.

Nodes belong to a minimizer or maximizer; edges carry cost 0 or 1; terminals
have fixed values. Values solve the least fixed point of
    min nodes: min over edges of cost + value(successor)
    max nodes: max over edges of cost + value(successor)
with unreachable-from-terminal cycles valued infinity (the maximizer
survives forever). Dijkstra-style: minimizer nodes finalize by relaxation,
maximizer nodes once every successor is finalized.
"""

from __future__ import annotations

import heapq
from typing import Optional

MIN, MAX = 0, 1
INF = float("inf")


class GameGraph:
    """Materialized game graph built incrementally by key."""

    def __init__(self):
        self.ids: dict = {}
        self.owner: list[int] = []
        self.terminal: list[Optional[int]] = []
        self.succ: list[list[tuple[int, int]]] = []

    def node(self, key, owner: int, terminal: Optional[int] = None) -> int:
        nid = self.ids.get(key)
        if nid is None:
            nid = len(self.owner)
            self.ids[key] = nid
            self.owner.append(owner)
            self.terminal.append(terminal)
            self.succ.append([])
        return nid

    def edge(self, src: int, cost: int, dst: int) -> None:
        self.succ[src].append((cost, dst))

    def __len__(self) -> int:
        return len(self.owner)


def solve(graph: GameGraph) -> list[float]:
    n = len(graph)
    pred: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    remaining = [0] * n
    for src in range(n):
        remaining[src] = len(graph.succ[src])
        for cost, dst in graph.succ[src]:
            pred[dst].append((cost, src))

    value = [INF] * n
    best = [-1] * n  # running max for maximizer nodes
    done = [False] * n
    heap: list[tuple[int, int]] = []

    for v in range(n):
        if graph.terminal[v] is not None:
            value[v] = graph.terminal[v]
            heapq.heappush(heap, (graph.terminal[v], v))

    while heap:
        val, v = heapq.heappop(heap)
        if done[v] or val > value[v]:
            continue
        done[v] = True
        for cost, p in pred[v]:
            if done[p] or graph.terminal[p] is not None:
                continue
            cand = val + cost
            if graph.owner[p] == MIN:
                if cand < value[p]:
                    value[p] = cand
                    heapq.heappush(heap, (cand, p))
            else:
                if cand > best[p]:
                    best[p] = cand
                remaining[p] -= 1
                if remaining[p] == 0:
                    value[p] = best[p]
                    heapq.heappush(heap, (best[p], p))
    return value
