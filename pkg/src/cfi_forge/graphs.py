"""Colored graphs, twin detection, the twinned-graph construction, and a
brute-force isomorphism oracle.

Vertices are dense integers 0..n-1. Colors are integers shared across graphs
(two vertices in different graphs "have the same color" iff the color ids are
equal). Serialization carries an explicit id -> label table so constructions
rebuild bit-for-bit.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping, Optional, Sequence


class ColoredGraph:
    """Immutable vertex-colored graph, optionally with a second edge relation.

    The second relation (``equivalence``) is stored as a partition of a subset
    of the vertices; it behaves like a second edge color: a partial map must
    preserve "same class" between pebbled vertices. Plain graphs leave it
    empty.
    """

    __slots__ = ("n", "colors", "edges", "labels", "equivalence",
                 "adj", "_eq_id", "_edge_set")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]],
                 colors: Sequence[int],
                 labels: Optional[Sequence[str]] = None,
                 equivalence: Iterable[Iterable[int]] = ()):
        if len(colors) != n:
            raise ValueError("coloring must be total")
        norm = set()
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop at {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a},{b}) endpoint not a vertex")
            norm.add((a, b) if a < b else (b, a))
        self.n = n
        self.colors = tuple(colors)
        self.edges = tuple(sorted(norm))
        self._edge_set = frozenset(self.edges)
        self.labels = tuple(labels) if labels is not None else None
        if self.labels is not None and len(self.labels) != n:
            raise ValueError("label table must cover all vertices")

        classes = []
        seen: set[int] = set()
        for cls in equivalence:
            cls = tuple(sorted(cls))
            if len(cls) < 2:
                continue  # singletons carry no information
            if any(v in seen for v in cls):
                raise ValueError("equivalence classes must be disjoint")
            seen.update(cls)
            classes.append(cls)
        self.equivalence = tuple(sorted(classes))
        eq_id = [-1] * n
        for i, cls in enumerate(self.equivalence):
            for v in cls:
                eq_id[v] = i
        self._eq_id = tuple(eq_id)

        adj = [0] * n
        for a, b in self.edges:
            adj[a] |= 1 << b
            adj[b] |= 1 << a
        self.adj = tuple(adj)

    # -- basic queries -------------------------------------------------

    def has_edge(self, a: int, b: int) -> bool:
        return (self.adj[a] >> b) & 1 == 1

    def neighbors(self, v: int) -> list[int]:
        return _bits(self.adj[v])

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def same_class(self, a: int, b: int) -> bool:
        """True iff a and b are distinct members of one equivalence class."""
        return a != b and self._eq_id[a] >= 0 and self._eq_id[a] == self._eq_id[b]

    def class_index(self, v: int) -> int:
        return self._eq_id[v]

    def color_classes(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for v, c in enumerate(self.colors):
            out.setdefault(c, []).append(v)
        return out

    def __eq__(self, other) -> bool:
        return (isinstance(other, ColoredGraph)
                and self.n == other.n
                and self.colors == other.colors
                and self.edges == other.edges
                and self.equivalence == other.equivalence)

    def __hash__(self) -> int:
        return hash((self.n, self.colors, self.edges, self.equivalence))

    def __repr__(self) -> str:
        return (f"ColoredGraph(n={self.n}, edges={len(self.edges)}, "
                f"colors={len(set(self.colors))})")

    # -- serialization ---------------------------------------------------

    def to_document(self) -> dict:
        doc = {
            "vertices": [
                {"id": v, "color": self.colors[v],
                 "label": self.labels[v] if self.labels else str(v)}
                for v in range(self.n)
            ],
            "edges": [list(e) for e in self.edges],
        }
        if self.equivalence:
            doc["equivalence"] = [list(c) for c in self.equivalence]
        return doc

    @classmethod
    def from_document(cls, doc: Mapping) -> "ColoredGraph":
        verts = sorted(doc["vertices"], key=lambda r: r["id"])
        ids = [r["id"] for r in verts]
        if ids != list(range(len(ids))):
            raise ValueError("vertex ids must be dense 0..n-1")
        return cls(
            n=len(ids),
            edges=[tuple(e) for e in doc["edges"]],
            colors=[r["color"] for r in verts],
            labels=[r.get("label", str(r["id"])) for r in verts],
            equivalence=doc.get("equivalence", ()),
        )

    def to_json(self) -> str:
        return canonical_json(self.to_document())


def canonical_json(obj) -> str:
    """Canonical single-form JSON used for every serialized artifact."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


# -- operations ----------------------------------------------------------


def color_class_profile(g: ColoredGraph) -> tuple[dict[int, int], int]:
    """Sizes of all color classes plus the maximum class size."""
    sizes: dict[int, int] = {}
    for c in g.colors:
        sizes[c] = sizes.get(c, 0) + 1
    return sizes, (max(sizes.values()) if sizes else 0)


def is_partial_isomorphism(g: ColoredGraph, h: ColoredGraph,
                           alpha: Mapping[int, int],
                           beta: Mapping[int, int]) -> bool:
    """Decide whether pebble maps alpha/beta induce a partial isomorphism.

    alpha maps pebble indices to vertices of g, beta to vertices of h; the
    domains must agree. The induced vertex map must be a bijection between
    the pebbled sets that preserves colors, edges, and (when present) the
    second edge relation.
    """
    if set(alpha) != set(beta):
        raise ValueError("pebble maps must have equal domains")
    items = sorted(alpha.items())
    pairs = [(u, beta[p]) for p, u in items]
    for i, (u, v) in enumerate(pairs):
        if g.colors[u] != h.colors[v]:
            return False
        for u2, v2 in pairs[i + 1:]:
            if (u == u2) != (v == v2):
                return False
            if u == u2:
                continue
            if g.has_edge(u, u2) != h.has_edge(v, v2):
                return False
            if g.same_class(u, u2) != h.same_class(v, v2):
                return False
    return True


def brute_force_isomorphism(g: ColoredGraph,
                            h: ColoredGraph) -> Optional[dict[int, int]]:
    """Exhaustive search for a color/edge-preserving bijection g -> h.

    Deterministic: vertices are matched in id order, candidates tried in id
    order, so the returned map is the lexicographically first isomorphism.
    Prunes by color class sizes and degree before backtracking.
    """
    if g.n != h.n:
        return None
    gp, _ = color_class_profile(g)
    hp, _ = color_class_profile(h)
    if gp != hp:
        return None
    if len(g.edges) != len(h.edges):
        return None
    if bool(g.equivalence) or bool(h.equivalence):
        gcls = sorted(len(c) for c in g.equivalence)
        hcls = sorted(len(c) for c in h.equivalence)
        if gcls != hcls:
            return None

    n = g.n
    # candidate masks: same color and degree
    cand = [
        cand_mask(v for v in range(n)
                  if h.colors[v] == g.colors[u] and h.degree(v) == g.degree(u))
        for u in range(n)
    ]
    gadj = g.adj
    hadj = h.adj
    image = [-1] * n

    def extend(u: int, used: int) -> bool:
        if u == n:
            return True
        avail = cand[u] & ~used
        while avail:
            low = avail & -avail
            avail ^= low
            v = low.bit_length() - 1
            ok = True
            gmask = gadj[u]
            for u2 in range(u):
                v2 = image[u2]
                if ((gmask >> u2) & 1) != ((hadj[v] >> v2) & 1):
                    ok = False
                    break
                if g.same_class(u, u2) != h.same_class(v, v2):
                    ok = False
                    break
            if ok:
                image[u] = v
                if extend(u + 1, used | low):
                    return True
                image[u] = -1
        return False

    if extend(0, 0):
        return {u: image[u] for u in range(n)}
    return None


def cand_mask(vals: Iterable[int]) -> int:
    m = 0
    for v in vals:
        m |= 1 << v
    return m


def find_twins(g: ColoredGraph) -> list[tuple[int, int, bool]]:
    """All unordered twin pairs (u, v, connected).

    Twins have identical neighborhoods outside {u, v}; connected twins are
    additionally adjacent. Plain O(n^2) adjacency-set comparison.
    """
    out = []
    for u in range(g.n):
        for v in range(u + 1, g.n):
            strip = ~((1 << u) | (1 << v))
            if g.adj[u] & strip == g.adj[v] & strip:
                out.append((u, v, g.has_edge(u, v)))
    return out


class TwinnedGraph:
    """Result of duplicating every vertex into an adjacent same-colored pair.

    Vertex u of the base becomes {2u, 2u+1}; all four cross edges are present
    for each base edge, plus the twin edge inside each pair.
    """

    __slots__ = ("base", "graph")

    def __init__(self, base: ColoredGraph):
        edges = [(2 * u, 2 * u + 1) for u in range(base.n)]
        for a, b in base.edges:
            for i in (0, 1):
                for j in (0, 1):
                    edges.append((2 * a + i, 2 * b + j))
        colors = []
        labels = []
        for u in range(base.n):
            colors += [base.colors[u], base.colors[u]]
            lu = base.labels[u] if base.labels else str(u)
            labels += [f"{lu}.0", f"{lu}.1"]
        self.base = base
        self.graph = ColoredGraph(2 * base.n, edges, colors, labels)

    def forward(self, u: int) -> tuple[int, int]:
        """The pair of copies of base vertex u."""
        return (2 * u, 2 * u + 1)

    def inverse(self, x: int) -> int:
        """Base vertex a copy originated from."""
        return x // 2

    def partner(self, x: int) -> int:
        """The other copy of the same base vertex."""
        return x ^ 1


def twinned(g: ColoredGraph) -> TwinnedGraph:
    return TwinnedGraph(g)
