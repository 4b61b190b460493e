"""Strategy transfer between the games.

Three adapters: Duplicator-in-blocking-game -> Delayer on the twinned pair,
robber-in-Cops-and-Robber -> Duplicator on the precompressed pair, and the
Spoiler side of the twinned construction (value comparison).
"""

from __future__ import annotations

import math
from typing import Iterable, Optional

from ..cfi import CfiInstance, Twisting, twist_distance
from ..graphs import ColoredGraph, TwinnedGraph, find_twins, is_partial_isomorphism
from ..isocnf import IsoFormula
from .blocking import (BLOCKING, REGULAR, BlockingGame,
                       DuplicatorBlockingStrategy)
from .pebble import INFINITY, pebble_value

__all__ = ["delayer_from_duplicator_blocking", "spoiler_transfer_twinned",
           "duplicator_from_robber", "DuplicatorFromRobber",
           "verify_duplicator_survival"]


_MATCHINGS = (frozenset(((0, 0), (1, 1))), frozenset(((0, 1), (1, 0))))


class TwinDelayer:
    """Delayer for the k-narrow game on twinned graphs, guided by the value
    table of the blocking game on the base pair.

    Simulation: assignments between the copies of base vertices u and v pin
    down one of the two twin matchings. A pair with a 1-entry is a regular
    pebble; a pair whose entries kill both matchings is a blocking pebble; a
    pair with only partial exclusions is scored under its best consistent
    interpretation (Duplicator still owns that mark choice). Delayer concedes
    a point exactly when all offered continuations keep the simulated value
    at its best ("it does not matter" moves, e.g. the two twins of a fresh
    image).
    """

    def __init__(self, dup: DuplicatorBlockingStrategy, formula: IsoFormula,
                 base_g: ColoredGraph, base_h: ColoredGraph):
        self.dup = dup
        self.formula = formula
        self.base_g = base_g
        self.base_h = base_h
        from .prover_delayer import _Rules
        self._rules = _Rules(formula)

    # -- simulation -------------------------------------------------------

    def _pair_states(self, sigma: dict[int, int]):
        cells: dict[tuple[int, int], dict[tuple[int, int], int]] = {}
        for var, val in sigma.items():
            xg, yh = self.formula.pair(var)
            key = (xg // 2, yh // 2)
            cells.setdefault(key, {})[(xg & 1, yh & 1)] = val
        fixed: list[int] = []
        pending: list[int] = []
        for (u, v), cc in sorted(cells.items()):
            pid = u * self.base_h.n + v
            alive = [m for m in _MATCHINGS
                     if all(c in m for c, val in cc.items() if val == 1)
                     and all(c not in m for c, val in cc.items() if val == 0)]
            if any(val == 1 for val in cc.values()):
                if not alive:
                    return None  # internally contradictory mapping
                fixed.append(pid << 1 | REGULAR)
            elif not alive:
                fixed.append(pid << 1 | BLOCKING)
            else:
                # only exclusions so far: mapping or refusing both possible
                pending.append(pid)
        return fixed, pending

    def quality(self, sigma: dict[int, int]) -> float:
        """Value of the simulated blocking position under Delayer's best
        consistent reading; -1 once the assignment violates a clause."""
        if self._rules.violates(sigma):
            return -1
        parts = self._pair_states(sigma)
        if parts is None:
            return 0
        fixed, pending = parts
        best = 0.0
        for mask in range(1 << len(pending)):
            items = list(fixed)
            for i, pid in enumerate(pending):
                mark = REGULAR if mask >> i & 1 else BLOCKING
                items.append(pid << 1 | mark)
            best = max(best, self.dup.value(tuple(sorted(set(items)))))
        return best

    # -- Delayer protocol ---------------------------------------------------

    def respond_resolution(self, sigma: dict[int, int], x: int):
        q = []
        for val in (0, 1):
            nxt = dict(sigma)
            nxt[x] = val
            q.append(self.quality(nxt))
        if q[0] == q[1] and q[0] >= 1:
            return ("point",)
        return ("commit", 0 if q[0] >= q[1] else 1)

    def respond_narrow(self, sigma: dict[int, int], clause_id: int,
                       options: tuple[int, ...]):
        scored = []
        for x in sorted(options):
            nxt = dict(sigma)
            nxt[x] = 1
            scored.append((x, self.quality(nxt)))
        best = max(s for _, s in scored)
        winners = [x for x, s in scored if s == best]
        if len(winners) >= 2 and best >= 1:
            x, y = self._prefer_twins(winners)
            return ("point", x, y)
        return ("commit", winners[0])

    def _prefer_twins(self, winners: list[int]) -> tuple[int, int]:
        """Pick two equal-best variables, preferring a twin pair (same
        source copy, the two image twins, or vice versa)."""
        wset = set(winners)
        for x in winners:
            xg, yh = self.formula.pair(x)
            for other in (self._var(xg, yh ^ 1), self._var(xg ^ 1, yh)):
                if other in wset and other != x:
                    a, b = sorted((x, other))
                    return a, b
        return winners[0], winners[1]

    def _var(self, xg: int, yh: int) -> int:
        return xg * self.formula.n_h + yh + 1


def delayer_from_duplicator_blocking(dup: DuplicatorBlockingStrategy,
                                     formula: IsoFormula,
                                     base_g: ColoredGraph,
                                     base_h: ColoredGraph) -> TwinDelayer:
    """Playable Delayer for the k-narrow game on the twinned pair whose ISO
    formula is given; dup is a solved strategy for the blocking game on the
    base pair with the same k."""
    return TwinDelayer(dup, formula, base_g, base_h)


def spoiler_transfer_twinned(g: ColoredGraph, h: ColoredGraph, k: int) -> dict:
    """Compare game values on a pair and its twinned pair.

    Requires k >= 3 and no connected twins in either graph. Reports whether
    the twinned value stays within one extra round of the original.
    """
    if k < 3:
        raise ValueError("the twinned transfer needs k >= 3")
    for name, graph in (("g", g), ("h", h)):
        if any(conn for _, _, conn in find_twins(graph)):
            raise ValueError(f"graph {name} has connected twins")
    value = pebble_value(g, h, k)
    report = {"k": k, "original_value": value}
    if value == INFINITY:
        report["status"] = "vacuous"
        return report
    xg = TwinnedGraph(g).graph
    xh = TwinnedGraph(h).graph
    tw_value = pebble_value(xg, xh, k)
    report["twinned_value"] = tw_value
    report["bound_holds"] = tw_value <= value + 1
    report["spoiler_still_wins"] = tw_value != INFINITY
    report["status"] = "checked"
    return report


# -- robber -> Duplicator ---------------------------------------------------


class TransferError(RuntimeError):
    """The supplied strategy produced an untranslatable move."""


class DuplicatorFromRobber:
    """Duplicator for the blocking game on a precompressed CFI pair, driven
    by a robber strategy for the compressed-and-blocking game.

    Regular pebbles are answered through the twisting-induced vertex
    correspondence; Spoiler's blocking placements become roadblocks whose
    slot sets are rebased by the current cumulative twisting before every
    robber move, which keeps the pebble-level blocking constraints exact.
    """

    def __init__(self, grid, eq_t, robber, k: int,
                 inst_f: CfiInstance, inst_g: CfiInstance):
        from ..cops_robber import GameState
        if twist_distance(inst_f.labeling, inst_g.labeling) != 1:
            raise ValueError("labelings must twist exactly one edge")
        (edge,) = (e for e in inst_f.base.edges
                   if inst_f.labeling(e) != inst_g.labeling(e))
        if not (grid.in_end(edge[0]) and grid.in_end(edge[1])):
            raise ValueError("the twisted edge must lie in a grid end")
        self.grid, self.eq, self.robber, self.k = grid, eq_t, robber, k
        self.inst_f, self.inst_g = inst_f, inst_g
        start = tuple(sorted(robber.start_edge()))
        if start != edge:
            raise ValueError("robber must start on the twisted edge")
        self.twist = Twisting(())
        self.robber_edge = start
        self.slots: list[Optional[tuple]] = [None] * k
        self.lost = False
        self._GameState = GameState

    def clone(self) -> "DuplicatorFromRobber":
        dup = object.__new__(DuplicatorFromRobber)
        dup.__dict__.update(self.__dict__)
        dup.slots = list(self.slots)
        return dup

    # -- internals ---------------------------------------------------------

    def _chi_slots(self, u: int) -> frozenset[int]:
        return self.twist.trace(u, self.grid.base)

    def _chi_mask(self, u: int) -> int:
        mask = 0
        for s in self._chi_slots(u):
            mask |= 1 << s
        return mask

    def _phi(self, x: int, forward: bool) -> int:
        src = self.inst_f if forward else self.inst_g
        dst = self.inst_g if forward else self.inst_f
        u = src.origin[x]
        return dst.vertex(u, src.tuples[x] ^ self._chi_mask(u))

    def _board(self, exclude_slot: int):
        """Engine state handed to the robber, roadblocks rebased."""
        state = self._GameState(self.grid, self.eq, self.k)
        for i, tok in enumerate(self.slots):
            if tok is None or i == exclude_slot:
                continue
            if tok[0] == "cop":
                state.tokens[i] = ("cop", tok[1])
            else:
                _, class_id, target = tok
                member = self.eq.class_members(class_id)[0]
                rebased = frozenset(target ^ self._chi_slots(member))
                if not rebased:
                    raise TransferError("roadblock target collided with the "
                                        "cumulative twisting")
                state.tokens[i] = ("roadblock", class_id, rebased)
        state.robber_edge = self.robber_edge
        return state

    def _run_robber(self, slot: int, ann) -> None:
        from ..cops_robber import validate_robber_move
        state = self._board(exclude_slot=slot)
        state.pending = ann
        move = self.robber.move(state)
        e_new, _ = validate_robber_move(state, move, slot)
        if move is not None:
            self.twist = self.twist.compose(move)
        self.robber_edge = e_new

    def _caught(self) -> bool:
        cops = {tok[1] for tok in self.slots if tok and tok[0] == "cop"}
        a, b = self.robber_edge
        return (self.eq.class_of(a) in cops and self.eq.class_of(b) in cops)

    # -- Duplicator protocol -------------------------------------------------

    def respond_regular(self, slot: int, side: int, x: int) -> int:
        """Spoiler places pebble `slot` on vertex x of the given side (0 =
        first graph); returns Duplicator's partner vertex."""
        from ..cops_robber import Announcement
        src = self.inst_f if side == 0 else self.inst_g
        u = src.origin[x]
        class_id = self.eq.class_of(u)
        self.slots[slot] = None
        self._run_robber(slot, Announcement(slot, "regular", class_id))
        self.slots[slot] = ("cop", class_id)
        if self._caught():
            self.lost = True
        return self._phi(x, forward=(side == 0))

    def choose_mark(self, slot: int, xg: int, yh: int) -> str:
        """Spoiler blocking-places pebble `slot` on (xg, yh); returns the
        mark Duplicator picks."""
        from ..cops_robber import Announcement
        u = self.inst_f.origin[xg]
        v = self.inst_g.origin[yh]
        self.slots[slot] = None
        if u != v:
            # the pair can never coincide with a twisting image; no token
            return "blocking"
        class_id = self.eq.class_of(u)
        target_mask = self.inst_f.tuples[xg] ^ self.inst_g.tuples[yh]
        target = frozenset(i for i in range(self.grid.base.degree(u))
                           if target_mask >> i & 1)
        chi = self._chi_slots(u)
        if target == chi:
            # the pair currently agrees with the correspondence: take it as
            # a regular pebble, backing it with a cop
            self._run_robber(slot, Announcement(slot, "regular", class_id))
            self.slots[slot] = ("cop", class_id)
            if self._caught():
                self.lost = True
            if self._chi_slots(u) == target:
                return "regular"
            return "blocking"
        handed = frozenset(target ^ chi)
        self._run_robber(slot, Announcement(slot, "blocking", class_id,
                                            slots=handed))
        self.slots[slot] = ("roadblock", class_id, target)
        return "blocking"


def duplicator_from_robber(grid, eq_t, robber_factory, k: int,
                           inst_f: CfiInstance,
                           inst_g: CfiInstance):
    """Factory of fresh Duplicator strategies for the blocking game on the
    precompressed pair of inst_f, inst_g."""

    def make() -> DuplicatorFromRobber:
        return DuplicatorFromRobber(grid, eq_t, robber_factory(), k,
                                    inst_f, inst_g)

    return make


def blocking_position_valid(pre_f: ColoredGraph, pre_g: ColoredGraph,
                            pebbles: dict[int, tuple[int, int, str]]) -> bool:
    """Direct partial-isomorphism-with-blocking check on slotted pebbles."""
    alpha = {}
    beta = {}
    regular_pairs = set()
    for slot, (x, y, mark) in pebbles.items():
        if mark == "regular":
            alpha[slot] = x
            beta[slot] = y
            regular_pairs.add((x, y))
    for slot, (x, y, mark) in pebbles.items():
        if mark == "blocking" and (x, y) in regular_pairs:
            return False
    try:
        return is_partial_isomorphism(pre_f, pre_g, alpha, beta)
    except ValueError:
        return False


def verify_duplicator_survival(pre_f: ColoredGraph, pre_g: ColoredGraph,
                               strategy_factory, spoiler, k: int,
                               max_rounds: int) -> dict:
    """Play one match: the scripted Spoiler against a fresh Duplicator.

    Returns rounds survived (completed rounds before the first invalid
    position) plus the final pebbles. The Spoiler is a callable
    spoiler(pebbles, dup) -> move with move either
    ("regular", slot, side, vertex) or ("blocking", slot, xg, yh) or None.
    """
    dup = strategy_factory()
    pebbles: dict[int, tuple[int, int, str]] = {}
    rounds = 0
    moves = 0
    while rounds < max_rounds:
        moves += 1
        if moves > 40 * max_rounds + 100:
            break
        mv = spoiler(pebbles, dup)
        if mv is None:
            break
        advanced = False
        if mv[0] == "regular":
            _, slot, side, x = mv
            try:
                y = dup.respond_regular(slot, side, x)
            except TransferError as exc:
                return {"rounds": rounds, "error": str(exc),
                        "pebbles": dict(pebbles)}
            pair = (x, y) if side == 0 else (y, x)
            pebbles[slot] = (pair[0], pair[1], "regular")
            rounds += 1
            advanced = True
        else:
            _, slot, xg, yh = mv
            try:
                mark = dup.choose_mark(slot, xg, yh)
            except TransferError as exc:
                return {"rounds": rounds, "error": str(exc),
                        "pebbles": dict(pebbles)}
            pebbles[slot] = (xg, yh, mark)
            if mark == "regular":
                rounds += 1
                advanced = True
        if not blocking_position_valid(pre_f, pre_g, pebbles):
            # surviving "the first r rounds" excludes the round in progress
            survived = rounds - 1 if advanced else rounds
            return {"rounds": max(0, survived), "falsified": True,
                    "pebbles": dict(pebbles)}
    return {"rounds": rounds, "falsified": False, "pebbles": dict(pebbles)}
