"""Position encodings shared by the game solvers.

A pebble pair is encoded as pid = u * |V(H)| + v. Canonical positions are
sorted tuples of pids (multisets — pebble indices are interchangeable up to
renaming); the non-canonical encoding keeps one slot per pebble index for
oracle cross-checks. Blocking positions carry a mark bit per pair:
item = pid * 2 + mark (mark 1 = blocking).
"""

from __future__ import annotations

from typing import Iterable, Optional

from ..graphs import ColoredGraph

REGULAR = 0
BLOCKING = 1


class PairTable:
    """Pairwise compatibility data for positions over a graph pair."""

    def __init__(self, g: ColoredGraph, h: ColoredGraph):
        self.g = g
        self.h = h
        self.n_pairs = g.n * h.n
        self.color_ok = bytearray(self.n_pairs)
        for u in range(g.n):
            for v in range(h.n):
                if g.colors[u] == h.colors[v]:
                    self.color_ok[u * h.n + v] = 1
        # comp[p] bit q set iff pairs p, q can coexist as regular pebbles
        self.comp = [0] * self.n_pairs
        for p in range(self.n_pairs):
            u, v = divmod(p, h.n)
            mask = 0
            for q in range(self.n_pairs):
                u2, v2 = divmod(q, h.n)
                if (u == u2) != (v == v2):
                    continue
                if u != u2:
                    if g.has_edge(u, u2) != h.has_edge(v, v2):
                        continue
                    if g.same_class(u, u2) != h.same_class(v, v2):
                        continue
                mask |= 1 << q
            self.comp[p] = mask

    def pid(self, u: int, v: int) -> int:
        return u * self.h.n + v

    def pair(self, pid: int) -> tuple[int, int]:
        return divmod(pid, self.h.n)

    def regular_ok(self, pids: Iterable[int]) -> bool:
        """The pids can coexist as regular pebbles (partial isomorphism)."""
        pids = list(pids)
        for i, p in enumerate(pids):
            if not self.color_ok[p]:
                return False
            comp = self.comp[p]
            for q in pids[i + 1:]:
                if not (comp >> q) & 1:
                    return False
        return True

    def extend_ok(self, pos: tuple[int, ...], p: int) -> bool:
        """pos is a valid regular position; is pos + (p,) still one?"""
        if not self.color_ok[p]:
            return False
        comp = self.comp[p]
        return all((comp >> q) & 1 for q in pos)


def insert_sorted(pos: tuple[int, ...], item: int) -> tuple[int, ...]:
    out = list(pos)
    lo, hi = 0, len(out)
    while lo < hi:
        mid = (lo + hi) // 2
        if out[mid] < item:
            lo = mid + 1
        else:
            hi = mid
    out.insert(lo, item)
    return tuple(out)


def remove_once(pos: tuple[int, ...], item: int) -> tuple[int, ...]:
    out = list(pos)
    out.remove(item)
    return tuple(out)


def blocking_valid(table: PairTable, pos: Iterable[tuple[int, int]]) -> bool:
    """Partial isomorphism with blocking: the regular part is a partial
    isomorphism and no blocking pair equals a regular pair."""
    regular = [p for p, m in pos if m == REGULAR]
    blocked = {p for p, m in pos if m == BLOCKING}
    if any(p in blocked for p in regular):
        return False
    return table.regular_ok(regular)
