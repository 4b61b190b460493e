"""Engines for the compressed k-Cops-and-Robber game and its blocking
extension with roadblocks, the grid robber strategy, and an exact minimax
cop oracle for toy grids.

The Cops Player owns k tokens, each either a cop or a roadblock once placed.
A round: a token is picked up and its new destination announced (regular:
a class; blocking: a class plus a roadblock); the robber may move by
providing a compressible twisting that twists exactly its current and target
edges, fixes every cop-occupied vertex, and avoids every placed roadblock;
the token is placed. Blocking placements do not advance the round counter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .cfi import Twisting, validate_compressible_twisting
from .games import attractor
from .games.attractor import MIN, MAX, GameGraph
from .grids import (CylindricalGrid, Roadblock, RowCompression,
                    end_to_end_twisting_search, is_t_critical,
                    minimal_t_semi_separators, roadblock_avoided)

Edge = tuple[int, int]
INFINITY = math.inf


class InvalidMove(RuntimeError):
    """A strategy produced a move that violates the game rules."""


class StateSpaceTooLarge(RuntimeError):
    pass


@dataclass
class Announcement:
    token: int
    kind: str                      # "regular" | "blocking"
    class_id: int
    slots: Optional[frozenset[int]] = None

    def __post_init__(self):
        if self.kind not in ("regular", "blocking"):
            raise ValueError(f"unknown announcement kind {self.kind!r}")
        if self.kind == "blocking":
            if self.slots is None or len(self.slots) % 2 != 0 or not self.slots:
                raise ValueError("blocking announcement needs a nonempty "
                                 "even roadblock")


@dataclass
class GameState:
    """Engine-side view of the match."""
    grid: CylindricalGrid
    eq: RowCompression
    k: int
    tokens: list[Optional[tuple]] = field(default_factory=list)
    robber_edge: Optional[Edge] = None
    rounds: int = 0
    pending: Optional[Announcement] = None

    def __post_init__(self):
        if not self.tokens:
            self.tokens = [None] * self.k

    def cop_classes(self, exclude_token: Optional[int] = None) -> set[int]:
        out = set()
        for i, tok in enumerate(self.tokens):
            if tok and tok[0] == "cop" and i != exclude_token:
                out.add(tok[1])
        return out

    def roadblocks(self, exclude_token: Optional[int] = None) -> list[Roadblock]:
        out = []
        for i, tok in enumerate(self.tokens):
            if tok and tok[0] == "roadblock" and i != exclude_token:
                out.append(Roadblock(tok[1], tok[2]))
        return out

    def cop_vertices(self, exclude_token: Optional[int] = None) -> set[int]:
        verts = set()
        for c in self.cop_classes(exclude_token):
            verts.update(self.eq.class_members(c))
        return verts

    def caught(self) -> bool:
        if self.robber_edge is None:
            return False
        a, b = self.robber_edge
        cops = self.cop_classes()
        return self.eq.class_of(a) in cops and self.eq.class_of(b) in cops


def _edge_key(e: Edge) -> Edge:
    return (e[0], e[1]) if e[0] < e[1] else (e[1], e[0])


def validate_robber_move(state: GameState, twisting: Optional[Twisting],
                         picked_token: Optional[int]) -> tuple[Edge, dict]:
    """Check a robber move against the rules; returns (new edge, report)."""
    grid, eq = state.grid, state.eq
    e_cur = _edge_key(state.robber_edge)
    report = {"stay": twisting is None}
    if twisting is None:
        return e_cur, report
    twisted = sorted(_edge_key(e) for e in twisting.twisted_edges(grid.base))
    report["twisted_edges"] = twisted
    if len(twisted) != 2 or e_cur not in twisted:
        raise InvalidMove("twisting must twist exactly the current edge "
                          "and one other edge")
    e_new = twisted[0] if twisted[1] == e_cur else twisted[1]
    if not validate_compressible_twisting(grid.base, eq.compression, twisting):
        raise InvalidMove("twisting is not compressible")
    for v in state.cop_vertices(exclude_token=picked_token):
        if not twisting.fixes(v):
            raise InvalidMove(f"twisting moves cop-occupied vertex {v}")
    for rb in state.roadblocks(exclude_token=picked_token):
        if not roadblock_avoided(grid, eq, twisting, rb):
            raise InvalidMove(f"twisting hits roadblock at class {rb.class_id}")
    report["valid"] = True
    return e_new, report


def _play(state: GameState, cop_strategy, robber_strategy, max_rounds: int,
          blocking: bool) -> dict:
    grid, eq = state.grid, state.eq
    transcript = {
        "grid": grid.descriptor(eq.t),
        "k": state.k,
        "blocking": blocking,
        "moves": [],
        "rounds_survived": 0,
        "caught": False,
    }
    state.robber_edge = _edge_key(robber_strategy.start_edge())
    transcript["start_edge"] = list(state.robber_edge)
    steps_guard = 0
    while state.rounds < max_rounds:
        steps_guard += 1
        if steps_guard > 50 * max_rounds + 200:
            transcript["stalled"] = True  # cop strategy never places a cop
            break
        ann = cop_strategy.announce(state)
        if ann is None:
            break
        if not (0 <= ann.token < state.k):
            raise InvalidMove("announcement names a missing token")
        if not blocking and ann.kind != "regular":
            raise InvalidMove("roadblocks are only allowed in the "
                              "blocking game")
        state.pending = ann
        move = robber_strategy.move(state)
        e_new, report = validate_robber_move(state, move, ann.token)
        state.robber_edge = e_new
        if ann.kind == "regular":
            state.tokens[ann.token] = ("cop", ann.class_id)
            state.rounds += 1
        else:
            state.tokens[ann.token] = ("roadblock", ann.class_id, ann.slots)
        state.pending = None
        entry = {
            "round": state.rounds,
            "actor": "cops",
            "kind": ann.kind,
            "token": ann.token,
            "class": ann.class_id,
            "slots": sorted(ann.slots) if ann.slots else None,
            "twisting": move.to_list() if move is not None else None,
            "edge": list(state.robber_edge),
            "validation": report,
        }
        transcript["moves"].append(entry)
        if state.caught():
            transcript["caught"] = True
            break
    transcript["rounds_survived"] = (state.rounds - 1 if transcript["caught"]
                                     else state.rounds)
    transcript["rounds_played"] = state.rounds
    return transcript


def play_compressed(grid: CylindricalGrid, eq: RowCompression, k: int,
                    cop_strategy, robber_strategy,
                    max_rounds: int) -> dict:
    state = GameState(grid, eq, k)
    return _play(state, cop_strategy, robber_strategy, max_rounds,
                 blocking=False)


def play_blocking(grid: CylindricalGrid, eq: RowCompression, k: int,
                  cop_strategy, robber_strategy, max_rounds: int) -> dict:
    state = GameState(grid, eq, k)
    return _play(state, cop_strategy, robber_strategy, max_rounds,
                 blocking=True)


# -- robber move machinery -------------------------------------------------


def local_end_move(grid: CylindricalGrid, eq: RowCompression,
                   e_cur: Edge, e_tgt: Edge,
                   forbidden: Iterable[int]) -> Optional[Twisting]:
    """Twisting relocating the robber between two edges through vertices in
    singleton classes only (typically within one grid end)."""
    e_cur, e_tgt = _edge_key(e_cur), _edge_key(e_tgt)
    if e_cur == e_tgt:
        return None
    forbidden = set(forbidden)
    singleton = {v for cls in eq.compression.classes if len(cls) == 1
                 for v in cls}
    allowed = singleton - forbidden

    def bfs(src: int, dst: int, banned: set[int]) -> Optional[list[int]]:
        if src in banned or dst in banned:
            return None
        if src == dst:
            return [src] if src in allowed else None
        prev = {src: None}
        queue = [src]
        while queue:
            nxt = []
            for u in queue:
                for v in grid.base.neighbor_lists[u]:
                    if v in prev or v in banned or v not in allowed:
                        continue
                    prev[v] = u
                    if v == dst:
                        path = [v]
                        while path[-1] is not None:
                            path.append(prev[path[-1]])
                        path.pop()
                        return path[::-1]
                    nxt.append(v)
            queue = nxt
        return None

    for s0, s1 in (e_cur, e_cur[::-1]):
        for t0, t1 in (e_tgt, e_tgt[::-1]):
            if s0 in (t0, t1) or s1 == t1:
                continue
            mid = bfs(s1, t0, banned={s0, t1})
            if mid is None:
                continue
            path = [s0] + mid + [t1]
            if len(set(path)) != len(path):
                continue
            arcs = []
            for i in range(1, len(path) - 1):
                arcs.append((path[i], path[i - 1]))
                arcs.append((path[i], path[i + 1]))
            tw = Twisting(arcs)
            if validate_compressible_twisting(grid.base, eq.compression, tw):
                return tw
    return None


def escape_moves(grid: CylindricalGrid, eq: RowCompression, e_cur: Edge,
                 cop_classes: Iterable[int], roadblocks: Iterable[Roadblock],
                 local_targets: int = 4) -> list[Twisting]:
    """Candidate robber twistings: end switches first, then local end moves.

    Deterministic and intentionally small; the minimax oracle and the
    scripted strategy both draw from this set.
    """
    cop_classes = sorted(set(cop_classes))
    roadblocks = list(roadblocks)
    cop_vertices = {v for c in cop_classes for v in eq.class_members(c)}
    out: list[Twisting] = []

    e2e = end_to_end_twisting_search(grid, eq, cop_classes, roadblocks)
    if e2e is not None:
        t1, t2 = sorted(_edge_key(e) for e in e2e.twisted_edges(grid.base))
        near = t1 if grid.in_left_end(e_cur[0]) else t2
        if _edge_key(near) == _edge_key(e_cur):
            out.append(e2e)
        else:
            link = local_end_move(grid, eq, e_cur, near, cop_vertices)
            if link is not None:
                combo = link.compose(e2e)
                out.append(combo)

    side = "left" if grid.in_left_end(e_cur[0]) else "right"
    count = 0
    for e_tgt in grid.end_edges(side):
        if count >= local_targets:
            break
        if _edge_key(e_tgt) == _edge_key(e_cur):
            continue
        tw = local_end_move(grid, eq, e_cur, e_tgt, cop_vertices)
        if tw is not None:
            out.append(tw)
            count += 1

    # keep only rule-abiding candidates
    valid = []
    for tw in out:
        twisted = [e for e in tw.twisted_edges(grid.base)]
        if len(twisted) != 2 or _edge_key(e_cur) not in map(_edge_key, twisted):
            continue
        if any(not tw.fixes(v) for v in cop_vertices):
            continue
        if not all(roadblock_avoided(grid, eq, tw, rb) for rb in roadblocks):
            continue
        valid.append(tw)
    return valid


# -- scripted robber --------------------------------------------------------


class ScriptedRobber:
    """The end-hopping robber: stay while the cop position is not critical,
    switch ends (avoiding roadblocks) when it is about to become critical.

    Roadblocks are treated as cops for the criticality analysis. Total: when
    no legal twisting is available the robber stays and the engine decides
    whether it is caught.
    """

    def __init__(self, grid: CylindricalGrid, eq: RowCompression, t: int,
                 start_side: str = "left", separator_cap: int = 8):
        if not (1 <= t <= max(1, int(2 * grid.k / 5) - 1)):
            self.outside_guarantee = True  # recipe still plays, no bound claim
        else:
            self.outside_guarantee = False
        self.grid, self.eq, self.t = grid, eq, t
        self.start_side = start_side
        self.separator_cap = separator_cap
        self._sep_cache: dict[frozenset[int], list[frozenset[int]]] = {}

    def start_edge(self) -> Edge:
        col = 0 if self.start_side == "left" else self.grid.J - 1
        return _edge_key((self.grid.vid(0, col), self.grid.vid(1, col)))

    def _separators(self, classes: frozenset[int]) -> list[frozenset[int]]:
        if classes not in self._sep_cache:
            self._sep_cache[classes] = minimal_t_semi_separators(
                self.grid, self.eq, classes, self.separator_cap)
        return self._sep_cache[classes]

    def _end_distances(self, seps: Sequence[frozenset[int]]) -> tuple[float, float]:
        if not seps:
            return INFINITY, INFINITY
        d_left = min(self.grid.pos(v)[1] for s in seps for v in s)
        d_right = min(self.grid.J - 1 - self.grid.pos(v)[1]
                      for s in seps for v in s)
        return d_left, d_right

    def _critical(self, w_classes: set[int], **_ignored) -> bool:
        key = frozenset(w_classes)
        if not hasattr(self, "_crit_cache"):
            self._crit_cache: dict[frozenset[int], bool] = {}
        if key not in self._crit_cache:
            self._crit_cache[key] = is_t_critical(
                self.grid, self.eq, key,
                separator_size_cap=self.separator_cap)
        return self._crit_cache[key]

    def move(self, state: GameState) -> Optional[Twisting]:
        grid, eq = self.grid, self.eq
        ann = state.pending
        picked = ann.token if ann else None
        w_hat = set(state.cop_classes(exclude_token=picked))
        w_hat.update(rb.class_id
                     for rb in state.roadblocks(exclude_token=picked))
        if ann is not None:
            w_hat.add(ann.class_id)
        e_cur = _edge_key(state.robber_edge)
        on_left = grid.in_left_end(e_cur[0])

        critical = self._critical(w_hat)
        seps = self._separators(frozenset(w_hat))
        d_left, d_right = self._end_distances(seps)
        here, there = (d_left, d_right) if on_left else (d_right, d_left)

        cop_classes = state.cop_classes(exclude_token=picked)
        roadblocks = state.roadblocks(exclude_token=picked)
        threat_classes = set(cop_classes)
        if ann is not None:
            threat_classes.add(ann.class_id)

        def safe_landing(tw: Twisting) -> Optional[Edge]:
            twisted = sorted(_edge_key(e) for e in tw.twisted_edges(grid.base))
            e_new = twisted[0] if twisted[1] == e_cur else twisted[1]
            if (eq.class_of(e_new[0]) in threat_classes
                    or eq.class_of(e_new[1]) in threat_classes):
                return None
            return e_new

        def try_switch() -> Optional[Twisting]:
            cands = escape_moves(grid, eq, e_cur, cop_classes, roadblocks)
            for tw in cands:
                e_new = safe_landing(tw)
                if e_new is not None and grid.in_left_end(e_new[0]) != on_left:
                    return tw
            return None

        def local_dodge() -> Optional[Twisting]:
            cop_vertices = {v for c in cop_classes
                            for v in eq.class_members(c)}
            side = "left" if on_left else "right"
            for e_tgt in grid.end_edges(side):
                e_tgt = _edge_key(e_tgt)
                if e_tgt == e_cur:
                    continue
                if (eq.class_of(e_tgt[0]) in threat_classes
                        or eq.class_of(e_tgt[1]) in threat_classes):
                    continue
                tw = local_end_move(grid, eq, e_cur, e_tgt, cop_vertices)
                if tw is None:
                    continue
                if any(not tw.fixes(v) for v in cop_vertices):
                    continue
                if not all(roadblock_avoided(grid, eq, tw, rb)
                           for rb in roadblocks):
                    continue
                return tw
            return None

        threatened = (eq.class_of(e_cur[0]) in threat_classes
                      or eq.class_of(e_cur[1]) in threat_classes)

        if not critical:
            if there > here:
                tw = try_switch()
                if tw is not None:
                    return tw
            if threatened:
                tw = local_dodge()
                if tw is not None:
                    return tw
                return try_switch()
            return None
        cop_rows = {eq.row_of_class(c) for c in cop_classes}
        if ann is not None and ann.kind == "regular":
            cop_rows.add(eq.row_of_class(ann.class_id))
        if len(cop_rows) <= max(0, int(2 * grid.k / 5) - 1):
            tw = try_switch()
            if tw is not None:
                return tw
        # hold the current end, dodging inside it if the edge is threatened
        if threatened:
            tw = local_dodge()
            if tw is not None:
                return tw
            return try_switch()
        return None


class StaticCops:
    """Cop strategy replaying a fixed list of announcements."""

    def __init__(self, announcements: Sequence[Announcement]):
        self.queue = list(announcements)
        self.i = 0

    def announce(self, state: GameState) -> Optional[Announcement]:
        if self.i >= len(self.queue):
            return None
        ann = self.queue[self.i]
        self.i += 1
        return ann


# -- exact minimax oracle ---------------------------------------------------


def _token_key(tokens: Iterable[Optional[tuple]]) -> tuple:
    return tuple(sorted(t for t in tokens if t is not None))


def minimax_cops(grid: CylindricalGrid, eq: RowCompression, k: int,
                 blocking: bool, round_cap: int,
                 start_edge: Optional[Edge] = None,
                 max_nodes: int = 4_000_000,
                 allow_robber_moves: bool = True) -> dict:
    """Exact minimum rounds to capture (robber playing the restricted move
    set from escape_moves), or survival at the round cap.

    Cops minimize rounds; the robber maximizes. Robber moves are restricted
    to the deterministic escape set plus staying, which can only shorten
    survival, so capture values are lower bounds on the unrestricted game.
    allow_robber_moves=False pins the robber entirely (a unit-test device
    for the capture bookkeeping).
    """
    if start_edge is None:
        start_edge = (grid.vid(0, 0), grid.vid(1, 0))
    start_edge = _edge_key(start_edge)
    n_classes = len(eq.compression.classes)

    slot_sets: dict[int, list[frozenset[int]]] = {}

    def roadblock_options(class_id: int) -> list[frozenset[int]]:
        deg = grid.base.degree(eq.class_members(class_id)[0])
        if deg not in slot_sets:
            import itertools as it
            opts = []
            for size in range(2, deg + 1, 2):
                opts.extend(frozenset(c)
                            for c in it.combinations(range(deg), size))
            slot_sets[deg] = opts
        return slot_sets[deg]

    graph = GameGraph()
    caught_term = graph.node(("caught",), MAX, terminal=0)
    # accumulated cost at the cap equals round_cap, so +1 flags survival
    survive_term = graph.node(("survive",), MIN, terminal=1)

    def caught_at(tokens: tuple, edge: Edge) -> bool:
        cops = {t[1] for t in tokens if t[0] == "cop"}
        return (eq.class_of(edge[0]) in cops and eq.class_of(edge[1]) in cops)

    move_cache: dict[tuple, list] = {}

    def robber_moves(base: tuple, edge: Edge) -> list:
        if not allow_robber_moves:
            return []
        key = (base, edge)
        if key not in move_cache:
            cop_classes = {t[1] for t in base if t[0] == "cop"}
            roadblocks = [Roadblock(t[1], frozenset(t[2])) for t in base
                          if t[0] == "roadblock"]
            move_cache[key] = escape_moves(grid, eq, edge, cop_classes,
                                           roadblocks)
        return move_cache[key]

    start_key = ("C", (), start_edge, 0)
    start_id = graph.node(start_key, MIN)
    todo = [start_key]

    while todo:
        key = todo.pop()
        nid = graph.ids[key]
        if len(graph) > max_nodes:
            raise StateSpaceTooLarge(f"minimax exceeded {max_nodes} nodes")
        if key[0] == "C":
            _, tokens, edge, rounds = key
            if rounds >= round_cap:
                graph.edge(nid, 0, survive_term)
                continue
            bases = set()
            if len(tokens) < k:
                bases.add(tokens)  # a spare token is picked up
            for i in range(len(tokens)):
                bases.add(tuple(t for j, t in enumerate(tokens) if j != i))
            for base in sorted(bases):
                for c in range(n_classes):
                    anns = [("cop", c)]
                    if blocking:
                        anns += [("roadblock", c, slots)
                                 for slots in roadblock_options(c)]
                    for ann in anns:
                        rkey = ("R", base, edge, rounds, ann)
                        fresh = rkey not in graph.ids
                        rid = graph.node(rkey, MAX)
                        graph.edge(nid, 0, rid)
                        if fresh:
                            todo.append(rkey)
        else:
            _, base, edge, rounds, ann = key
            moves: list[Optional[Twisting]] = [None]
            moves.extend(robber_moves(base, edge))
            cost = 1 if ann[0] == "cop" else 0
            tok = (ann if ann[0] == "cop"
                   else ("roadblock", ann[1], tuple(sorted(ann[2]))))
            new_tokens = _token_key(list(base) + [tok])
            for mv in moves:
                if mv is None:
                    e_new = edge
                else:
                    twisted = sorted(_edge_key(e)
                                     for e in mv.twisted_edges(grid.base))
                    e_new = twisted[0] if twisted[1] == edge else twisted[1]
                if caught_at(new_tokens, e_new):
                    graph.edge(nid, cost, caught_term)
                    continue
                ckey = ("C", new_tokens, e_new, rounds + cost)
                fresh = ckey not in graph.ids
                cid = graph.node(ckey, MIN)
                graph.edge(nid, cost, cid)
                if fresh:
                    todo.append(ckey)

    values = attractor.solve(graph)
    val = values[start_id]
    if val == attractor.INF or val > round_cap:
        return {"value": None, "survives_cap": True, "round_cap": round_cap,
                "nodes": len(graph)}
    return {"value": int(val), "survives_cap": False, "round_cap": round_cap,
            "nodes": len(graph)}
