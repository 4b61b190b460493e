"""CFI gadget construction over ordered base graphs, graph compressions,
precompressed/compressed CFI graphs, and twistings.

A degree-d base vertex is replaced by the 2^(d-1) even-parity tuples over its
neighbor slots; gadget vertices (u, a) and (v, b) are adjacent iff
a[slot of v in u] + b[slot of u in v] equals the edge label in F2.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Optional, Sequence

from .graphs import ColoredGraph, brute_force_isomorphism

Edge = tuple[int, int]


def _norm_edge(e: Edge) -> Edge:
    a, b = e
    return (a, b) if a < b else (b, a)


class OrderedBaseGraph:
    """Connected graph with a total vertex order giving stable neighbor slots.

    Every vertex gets its own color (= its id), so gadgets of a CFI graph
    built on top form color classes.
    """

    __slots__ = ("graph", "neighbor_lists", "_slot")

    def __init__(self, n: int, edges: Iterable[Edge],
                 labels: Optional[Sequence[str]] = None):
        g = ColoredGraph(n, edges, colors=list(range(n)), labels=labels)
        if n == 0:
            raise ValueError("base graph must be nonempty")
        if not _connected(g):
            raise ValueError("base graph must be connected")
        self.graph = g
        self.neighbor_lists = tuple(tuple(g.neighbors(u)) for u in range(n))
        self._slot = {}
        for u in range(n):
            for i, v in enumerate(self.neighbor_lists[u]):
                self._slot[(u, v)] = i

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self.graph.edges

    def degree(self, u: int) -> int:
        return len(self.neighbor_lists[u])

    def slot(self, u: int, v: int) -> int:
        """Index of v in u's ordered neighbor list."""
        return self._slot[(u, v)]

    def neighbor_at(self, u: int, i: int) -> int:
        return self.neighbor_lists[u][i]

    def has_edge(self, a: int, b: int) -> bool:
        return self.graph.has_edge(a, b)

    def to_document(self) -> dict:
        return self.graph.to_document()

    @classmethod
    def from_document(cls, doc: Mapping) -> "OrderedBaseGraph":
        g = ColoredGraph.from_document(doc)
        return cls(g.n, g.edges, labels=g.labels)


def _connected(g: ColoredGraph) -> bool:
    if g.n == 0:
        return False
    seen = 1
    frontier = [0]
    while frontier:
        u = frontier.pop()
        m = g.adj[u] & ~seen
        seen |= m
        while m:
            low = m & -m
            m ^= low
            frontier.append(low.bit_length() - 1)
    return seen == (1 << g.n) - 1


class EdgeLabeling:
    """Total map from base edges to F2."""

    __slots__ = ("base", "values")

    def __init__(self, base: OrderedBaseGraph, values: Mapping[Edge, int]):
        vals = {_norm_edge(e): int(b) & 1 for e, b in values.items()}
        if set(vals) != set(base.edges):
            raise ValueError("labeling domain must equal the base edge set")
        self.base = base
        self.values = vals

    @classmethod
    def constant(cls, base: OrderedBaseGraph, bit: int = 0) -> "EdgeLabeling":
        return cls(base, {e: bit for e in base.edges})

    @classmethod
    def from_twisted_edges(cls, base: OrderedBaseGraph,
                           twisted: Iterable[Edge]) -> "EdgeLabeling":
        vals = {e: 0 for e in base.edges}
        for e in twisted:
            vals[_norm_edge(e)] ^= 1
        return cls(base, vals)

    def __call__(self, e: Edge) -> int:
        return self.values[_norm_edge(e)]

    def __eq__(self, other) -> bool:
        return (isinstance(other, EdgeLabeling)
                and self.base.edges == other.base.edges
                and self.values == other.values)

    def __hash__(self):
        return hash(tuple(sorted(self.values.items())))

    def to_table(self) -> list[list[int]]:
        return [[a, b, self.values[(a, b)]] for a, b in self.base.edges]


def twist_distance(f: EdgeLabeling, g: EdgeLabeling) -> int:
    if f.base.edges != g.base.edges:
        raise ValueError("labelings live on different base graphs")
    return sum(1 for e in f.base.edges if f.values[e] != g.values[e])


def even_tuples(d: int) -> list[int]:
    """Bitmasks of length d with even popcount, ascending."""
    return [a for a in range(1 << d) if a.bit_count() % 2 == 0]


class CfiInstance:
    """A CFI graph together with its origin bookkeeping.

    Gadget vertex ids are dense, assigned base-vertex by base-vertex in vertex
    order, tuples in ascending bitmask order (bit i = entry for the i-th
    neighbor).
    """

    __slots__ = ("base", "labeling", "graph", "origin", "tuples", "_index")

    def __init__(self, base: OrderedBaseGraph, labeling: EdgeLabeling):
        if labeling.base.edges != base.edges:
            raise ValueError("labeling domain must equal the base edge set")
        origin: list[int] = []
        tuples: list[int] = []
        index: dict[tuple[int, int], int] = {}
        for u in range(base.n):
            for a in even_tuples(base.degree(u)):
                index[(u, a)] = len(origin)
                origin.append(u)
                tuples.append(a)
        edges = []
        for (u, v) in base.edges:
            i = base.slot(u, v)   # slot for v inside u's tuple
            j = base.slot(v, u)   # slot for u inside v's tuple
            bit = labeling((u, v))
            for a in even_tuples(base.degree(u)):
                for b in even_tuples(base.degree(v)):
                    if (((a >> i) & 1) + ((b >> j) & 1)) % 2 == bit:
                        edges.append((index[(u, a)], index[(v, b)]))
        colors = [base.graph.colors[u] for u in origin]
        labels = [f"{u}:{t:0{max(1, base.degree(u))}b}"
                  for u, t in zip(origin, tuples)]
        self.base = base
        self.labeling = labeling
        self.graph = ColoredGraph(len(origin), edges, colors, labels)
        self.origin = tuple(origin)
        self.tuples = tuple(tuples)
        self._index = index

    def vertex(self, u: int, a: int) -> int:
        """Id of gadget vertex (u, a)."""
        return self._index[(u, a)]

    def gadget(self, u: int) -> list[int]:
        return [self._index[(u, a)] for a in even_tuples(self.base.degree(u))]

    def to_document(self) -> dict:
        return {
            "base": self.base.to_document(),
            "labeling": self.labeling.to_table(),
            "graph": self.graph.to_document(),
            "origin": list(self.origin),
        }


def build_cfi(base: OrderedBaseGraph, f: EdgeLabeling) -> CfiInstance:
    return CfiInstance(base, f)


class Compression:
    """Partition of the base vertices; classes must be independent sets of
    equal-degree vertices for validity."""

    __slots__ = ("classes", "class_of")

    def __init__(self, n: int, classes: Iterable[Iterable[int]]):
        cls = [tuple(sorted(c)) for c in classes]
        flat = [v for c in cls for v in c]
        if sorted(flat) != list(range(n)):
            raise ValueError("classes must partition the vertex set")
        self.classes = tuple(sorted(cls))
        class_of = [0] * n
        for i, c in enumerate(self.classes):
            for v in c:
                class_of[v] = i
        self.class_of = tuple(class_of)

    @classmethod
    def singletons(cls, n: int) -> "Compression":
        return cls(n, [[v] for v in range(n)])

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Compression":
        """Union-find over identified pairs."""
        parent = list(range(n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in pairs:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        groups: dict[int, list[int]] = {}
        for v in range(n):
            groups.setdefault(find(v), []).append(v)
        return cls(n, groups.values())

    def __len__(self) -> int:
        return len(self.classes)

    def same(self, a: int, b: int) -> bool:
        return self.class_of[a] == self.class_of[b]

    def to_class_arrays(self) -> list[list[int]]:
        return [list(c) for c in self.classes]


def validate_compression(base: OrderedBaseGraph, eq: Compression) -> bool:
    """Every class independent and degree-uniform."""
    for cls in eq.classes:
        degs = {base.degree(v) for v in cls}
        if len(degs) > 1:
            return False
        for i, a in enumerate(cls):
            for b in cls[i + 1:]:
                if base.has_edge(a, b):
                    return False
    return True


def validate_compressible_labeling(base: OrderedBaseGraph, eq: Compression,
                                   f: EdgeLabeling) -> bool:
    """f must agree on edges whose endpoints are classwise equivalent."""
    by_class: dict[tuple[int, int], int] = {}
    for (u, v) in base.edges:
        key = tuple(sorted((eq.class_of[u], eq.class_of[v])))
        bit = f((u, v))
        if by_class.setdefault(key, bit) != bit:
            return False
    return True


def lifted_classes(inst: CfiInstance, eq: Compression) -> list[tuple[int, ...]]:
    """Classes of the induced equivalence on gadget vertices:
    (u, a) ~ (v, b) iff u ~ v and a = b."""
    groups: dict[tuple[int, int], list[int]] = {}
    for x in range(inst.graph.n):
        key = (eq.class_of[inst.origin[x]], inst.tuples[x])
        groups.setdefault(key, []).append(x)
    return [tuple(sorted(g)) for _, g in sorted(groups.items())]


def precompress(inst: CfiInstance, eq: Compression) -> ColoredGraph:
    """CFI graph annotated with the lifted equivalence as a second relation."""
    _require_compatible(inst, eq)
    g = inst.graph
    return ColoredGraph(g.n, g.edges, g.colors, g.labels,
                        equivalence=lifted_classes(inst, eq))


def compress(inst: CfiInstance, eq: Compression) -> ColoredGraph:
    """Quotient of the CFI graph by the lifted equivalence.

    Class color is the minimal member color; adjacency is existence of
    adjacent representatives. Independence of base classes keeps the result
    loop-free.
    """
    _require_compatible(inst, eq)
    classes = lifted_classes(inst, eq)
    rep = {}
    for i, cls in enumerate(classes):
        for x in cls:
            rep[x] = i
    edges = set()
    for a, b in inst.graph.edges:
        ca, cb = rep[a], rep[b]
        if ca != cb:
            edges.add((min(ca, cb), max(ca, cb)))
    colors = [min(inst.graph.colors[x] for x in cls) for cls in classes]
    labels = ["|".join(inst.graph.labels[x] for x in cls) for cls in classes]
    return ColoredGraph(len(classes), edges, colors, labels)


def _require_compatible(inst: CfiInstance, eq: Compression) -> None:
    if not validate_compression(inst.base, eq):
        raise ValueError("not a valid compression of the base graph")
    if not validate_compressible_labeling(inst.base, eq, inst.labeling):
        raise ValueError("labeling is not compressible under the equivalence")


class Twisting:
    """Set of directed base edges with even out-degree at every vertex."""

    __slots__ = ("arcs",)

    def __init__(self, arcs: Iterable[tuple[int, int]]):
        self.arcs = frozenset((int(a), int(b)) for a, b in arcs)

    def out_arcs(self, u: int) -> frozenset[tuple[int, int]]:
        return frozenset(arc for arc in self.arcs if arc[0] == u)

    def trace(self, u: int, base: OrderedBaseGraph) -> frozenset[int]:
        """Neighbor slots of u used by outgoing arcs."""
        return frozenset(base.slot(u, v) for (a, v) in self.arcs if a == u)

    def twists(self, e: Edge) -> bool:
        u, v = e
        return ((u, v) in self.arcs) != ((v, u) in self.arcs)

    def twisted_edges(self, base: OrderedBaseGraph) -> list[Edge]:
        return [e for e in base.edges if self.twists(e)]

    def fixes(self, u: int) -> bool:
        return not any(a == u for (a, _) in self.arcs)

    def compose(self, other: "Twisting") -> "Twisting":
        """Symmetric difference; traces add in F2."""
        return Twisting(self.arcs ^ other.arcs)

    def __eq__(self, other):
        return isinstance(other, Twisting) and self.arcs == other.arcs

    def __hash__(self):
        return hash(self.arcs)

    def __repr__(self):
        return f"Twisting({sorted(self.arcs)})"

    def to_list(self) -> list[list[int]]:
        return [list(a) for a in sorted(self.arcs)]


def validate_twisting(base: OrderedBaseGraph, t: Twisting,
                      fixed_vertices: Iterable[int] = (),
                      twisted_edges: Optional[Iterable[Edge]] = None) -> bool:
    """Even out-degree everywhere, arcs along edges, optional fix/twist demands."""
    counts: dict[int, int] = {}
    for (a, b) in t.arcs:
        if not base.has_edge(a, b):
            return False
        counts[a] = counts.get(a, 0) + 1
    if any(c % 2 for c in counts.values()):
        return False
    for u in fixed_vertices:
        if counts.get(u, 0):
            return False
    if twisted_edges is not None:
        want = {_norm_edge(e) for e in twisted_edges}
        if set(t.twisted_edges(base)) != want:
            return False
    return True


def validate_compressible_twisting(base: OrderedBaseGraph, eq: Compression,
                                   t: Twisting) -> bool:
    """Equivalent vertices must use the same neighbor slots."""
    if not validate_twisting(base, t):
        return False
    for cls in eq.classes:
        if len(cls) < 2:
            continue
        traces = {t.trace(u, base) for u in cls}
        if len(traces) > 1:
            return False
    return True


def retwist(f: EdgeLabeling, t: Twisting) -> tuple[EdgeLabeling, dict[int, int]]:
    """Labeling g twisted from f by t, plus the gadget-level isomorphism
    CFI(base,f) -> CFI(base,g) as a vertex map (verified edge-by-edge)."""
    base = f.base
    if not validate_twisting(base, t):
        raise ValueError("invalid twisting")
    g_vals = dict(f.values)
    for e in t.twisted_edges(base):
        g_vals[e] ^= 1
    g = EdgeLabeling(base, g_vals)
    inst_f = CfiInstance(base, f)
    inst_g = CfiInstance(base, g)

    chi = [0] * base.n
    for (a, b) in t.arcs:
        chi[a] |= 1 << base.slot(a, b)
    # even out-degree keeps tuple parity, so the image vertex exists
    vmap = {x: inst_g.vertex(inst_f.origin[x], inst_f.tuples[x] ^ chi[inst_f.origin[x]])
            for x in range(inst_f.graph.n)}
    _verify_isomorphism(inst_f.graph, inst_g.graph, vmap)
    return g, vmap


def _verify_isomorphism(g: ColoredGraph, h: ColoredGraph,
                        vmap: Mapping[int, int]) -> None:
    if sorted(vmap) != list(range(g.n)) or sorted(vmap.values()) != list(range(h.n)):
        raise AssertionError("vertex map is not a bijection")
    for x in range(g.n):
        if g.colors[x] != h.colors[vmap[x]]:
            raise AssertionError("vertex map breaks colors")
    mapped = {(min(vmap[a], vmap[b]), max(vmap[a], vmap[b])) for a, b in g.edges}
    if mapped != set(h.edges):
        raise AssertionError("vertex map breaks edges")


def cfi_parity_law(base: OrderedBaseGraph, f: EdgeLabeling,
                   g: EdgeLabeling) -> bool:
    """True iff non-isomorphism of the two CFI graphs matches odd twist count
    (decided by the brute-force oracle)."""
    iso = brute_force_isomorphism(CfiInstance(base, f).graph,
                                  CfiInstance(base, g).graph)
    odd = twist_distance(f, g) % 2 == 1
    return (iso is None) == odd
