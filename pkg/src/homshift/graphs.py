"""Finite undirected graphs, walks and their elementary algebra.

Vertices are referred to by string names externally and by dense integer
ids internally (assigned in name-insertion order).  Walks are immutable
sequences of vertex ids attached to a graph.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field

from .errors import (
    CompositionError,
    CycleBudgetError,
    EmptyGraphError,
    ParseError,
    PreconditionError,
    Unreachable,
)

NAME_RE = re.compile(r"^[A-Za-z0-9_.]+$")


class Graph:
    """Undirected simple graph, self-loops allowed.

    Adjacency is stored symmetrically with set semantics; vertex ids are
    dense 0..|V|-1 in name-insertion order.
    """

    __slots__ = ("vertices", "adj", "adj_sets", "_ids", "has_loops", "name", "cache")

    def __init__(self, edges, vertices=(), name=""):
        self._ids: dict[str, int] = {}
        self.vertices: list[str] = []
        for v in vertices:
            self._intern(v)
        pairs = []
        for a, b in edges:
            pairs.append((self._intern(a), self._intern(b)))
        if not self.vertices:
            raise EmptyGraphError("graph has no vertices")
        nbrs = [set() for _ in self.vertices]
        for i, j in pairs:
            nbrs[i].add(j)
            nbrs[j].add(i)
        self.adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(s)) for s in nbrs)
        self.adj_sets: tuple[frozenset, ...] = tuple(frozenset(s) for s in nbrs)
        self.has_loops = any(i in self.adj_sets[i] for i in range(len(self.vertices)))
        self.name = name
        self.cache: dict = {}

    def _intern(self, name: str) -> int:
        if not NAME_RE.match(name):
            raise ParseError(f"bad vertex name {name!r}")
        if name not in self._ids:
            self._ids[name] = len(self.vertices)
            self.vertices.append(name)
        return self._ids[name]

    def id_of(self, name: str) -> int:
        try:
            return self._ids[name]
        except KeyError:
            raise ParseError(f"unknown vertex {name!r}") from None

    def __len__(self):
        return len(self.vertices)

    def edge_count(self) -> int:
        loops = sum(1 for i in range(len(self)) if i in self.adj_sets[i])
        return (sum(len(a) for a in self.adj) + loops) // 2

    def adjacent(self, i: int, j: int) -> bool:
        return j in self.adj_sets[i]

    def edges(self):
        for i in range(len(self)):
            for j in self.adj[i]:
                if j >= i:
                    yield (i, j)

    def names(self, seq) -> tuple[str, ...]:
        return tuple(self.vertices[i] for i in seq)

    def lex_smallest_vertex(self) -> int:
        return self.id_of(min(self.vertices))

    def fingerprint(self) -> tuple:
        return (tuple(self.vertices), self.adj)

    def __repr__(self):
        tag = self.name or f"{len(self)}v"
        return f"Graph({tag}, {self.edge_count()} edges)"


def parse_graph(text: str, name: str = "") -> Graph:
    """Parse a whitespace edge list; ``#`` comments; ``a a`` is a loop."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected two vertex names, got {len(parts)}", line=lineno)
        for p in parts:
            if not NAME_RE.match(p):
                raise ParseError(f"bad vertex name {p!r}", line=lineno)
        edges.append((parts[0], parts[1]))
    if not edges:
        raise EmptyGraphError("edge list is empty")
    return Graph(edges, name=name)


@dataclass(frozen=True)
class Walk:
    """A walk on a graph: a non-empty vertex-id sequence along edges."""

    graph: Graph
    seq: tuple[int, ...]

    def __post_init__(self):
        if not self.seq:
            raise PreconditionError("walk must be non-empty")
        object.__setattr__(self, "seq", tuple(self.seq))
        adj = self.graph.adj_sets
        for a, b in zip(self.seq, self.seq[1:]):
            if b not in adj[a]:
                raise PreconditionError(
                    f"({self.graph.vertices[a]},{self.graph.vertices[b]}) is not an edge"
                )

    @classmethod
    def from_names(cls, graph: Graph, names) -> "Walk":
        if isinstance(names, str):
            names = names.split(",") if "," in names else list(names)
        return cls(graph, tuple(graph.id_of(n) for n in names))

    @property
    def length(self) -> int:
        return len(self.seq) - 1

    def is_cycle(self) -> bool:
        return self.seq[0] == self.seq[-1]

    def is_nonbacktracking(self) -> bool:
        s = self.seq
        return not any(s[i] == s[i + 2] for i in range(len(s) - 2))

    def names(self) -> tuple[str, ...]:
        return self.graph.names(self.seq)

    def __str__(self):
        return ",".join(self.names())

    def __len__(self):
        return len(self.seq)


# -- backtrack reduction ----------------------------------------------------

def reduce_seq(seq) -> tuple[int, ...]:
    """Remove spines ``aba -> a`` until none remain (order-independent)."""
    out = []
    for v in seq:
        if len(out) >= 2 and out[-2] == v:
            out.pop()
        else:
            out.append(v)
    return tuple(out)


def reduce_backtracks(p: Walk) -> Walk:
    return Walk(p.graph, reduce_seq(p.seq))


# -- walk algebra -----------------------------------------------------------

def compose(p: Walk, q: Walk) -> Walk:
    """Concatenation ``p (.) q``; requires q to start where p ends."""
    if p.graph is not q.graph:
        raise CompositionError("walks live on different graphs")
    if q.seq[0] != p.seq[-1]:
        raise CompositionError("q must start at the endpoint of p")
    return Walk(p.graph, p.seq + q.seq[1:])


def compose_seq(p, q):
    if q[0] != p[-1]:
        raise CompositionError("q must start at the endpoint of p")
    return p + q[1:]


def insert_at(c: Walk, k: int, inner: Walk) -> Walk:
    """Plug the cycle ``inner`` into the cycle ``c`` at position ``k``."""
    if not c.is_cycle() or not inner.is_cycle():
        raise CompositionError("insert_at requires cycles")
    if not 0 <= k <= c.length:
        raise CompositionError(f"position {k} out of range")
    if inner.seq[0] != c.seq[k]:
        raise CompositionError("inner cycle must base at c[k]")
    return Walk(c.graph, insert_seq(c.seq, k, inner.seq))


def insert_seq(c, k, inner):
    return c[:k] + inner + c[k + 1:]


def left_shifts(p: Walk) -> set[Walk]:
    g = p.graph
    return {Walk(g, p.seq[1:] + (x,)) for x in g.adj[p.seq[-1]]}


def right_shifts(p: Walk) -> set[Walk]:
    g = p.graph
    return {Walk(g, (x,) + p.seq[:-1]) for x in g.adj[p.seq[0]]}


def shifts(p: Walk) -> dict[str, set[Walk]]:
    if p.length < 1:
        raise PreconditionError("shifts need length >= 1")
    return {"left": left_shifts(p), "right": right_shifts(p)}


def reverse(p: Walk) -> Walk:
    return Walk(p.graph, p.seq[::-1])


def power(c: Walk, n: int) -> Walk:
    if not c.is_cycle():
        raise PreconditionError("power requires a cycle")
    if n < 1:
        raise PreconditionError("power requires n >= 1")
    return Walk(c.graph, power_seq(c.seq, n))


def power_seq(c, n):
    out = c
    for _ in range(n - 1):
        out = out + c[1:]
    return out


def spine_on(g: Graph, v: int) -> tuple[int, int, int]:
    """The canonical spine at v: via its lexicographically smallest neighbour."""
    nbrs = g.adj[v]
    if not nbrs:
        raise PreconditionError(f"vertex {g.vertices[v]} has no neighbours")
    w = min(nbrs, key=lambda i: g.vertices[i])
    return (v, w, v)


def spine_power_seq(g: Graph, v: int, pairs: int) -> tuple[int, ...]:
    t = spine_on(g, v)
    return power_seq(t, pairs) if pairs >= 1 else (v,)


# -- metrics ----------------------------------------------------------------

class GraphMetric:
    """BFS distances, diameter, bipartiteness and connectivity."""

    def __init__(self, g: Graph):
        self.graph = g
        n = len(g)
        self._dist = [self._bfs(src) for src in range(n)]
        self.connected = all(d is not None for d in self._dist[0])
        finite = [d for row in self._dist for d in row if d is not None]
        self.diameter = max(finite) if self.connected else max(finite)
        self.bipartite = self._two_color()

    def _bfs(self, src: int) -> list:
        g = self.graph
        dist: list = [None] * len(g)
        dist[src] = 0
        dq = deque([src])
        while dq:
            u = dq.popleft()
            for v in g.adj[u]:
                if dist[v] is None:
                    dist[v] = dist[u] + 1
                    dq.append(v)
        return dist

    def _two_color(self) -> bool:
        g = self.graph
        color: list = [None] * len(g)
        for src in range(len(g)):
            if color[src] is not None:
                continue
            color[src] = 0
            dq = deque([src])
            while dq:
                u = dq.popleft()
                for v in g.adj[u]:
                    if color[v] is None:
                        color[v] = 1 - color[u]
                        dq.append(v)
                    elif color[v] == color[u]:
                        return False
        return True

    def distance(self, a: int, b: int) -> int:
        d = self._dist[a][b]
        if d is None:
            raise Unreachable(
                f"{self.graph.vertices[a]} and {self.graph.vertices[b]} are disconnected"
            )
        return d

    def distance_by_name(self, a: str, b: str) -> int:
        g = self.graph
        return self.distance(g.id_of(a), g.id_of(b))


def graph_metric(g: Graph) -> GraphMetric:
    got = g.cache.get("metric")
    if got is None:
        got = GraphMetric(g)
        g.cache["metric"] = got
    return got


# -- walks of prescribed length --------------------------------------------

def walk_of_length(g: Graph, u: int, v: int, k: int) -> Walk | None:
    """A walk from u to v of length exactly k, or None if none exists.

    Search runs on the parity double cover, so the answer is exact: a
    walk of length k exists iff k is at least the shortest u-v walk of
    the right parity (shorter walks pad with a spine at v).
    """
    if k < 0:
        return None
    # BFS over (vertex, parity) states with parent tracking; the shortest
    # walk to (v, k mod 2) has the parity of k by construction.
    start = (u, 0)
    parent: dict[tuple[int, int], tuple[int, int] | None] = {start: None}
    dq = deque([start])
    target = (v, k % 2)
    while dq:
        cu, pu = dq.popleft()
        for w in g.adj[cu]:
            nxt = (w, 1 - pu)
            if nxt not in parent:
                parent[nxt] = (cu, pu)
                dq.append(nxt)
    if target not in parent:
        return None
    path = []
    cur = target
    while cur is not None:
        path.append(cur[0])
        cur = parent[cur]
    path.reverse()
    base = len(path) - 1
    if base > k:
        return None
    seq = tuple(path)
    if base < k:
        if not g.adj[v]:
            return None
        pad = spine_power_seq(g, v, (k - base) // 2)
        seq = compose_seq(seq, pad)
    return Walk(g, seq)


# -- simple cycles ----------------------------------------------------------

def canonical_cycle(seq) -> tuple[int, ...]:
    """Lexicographic minimum over all rotations and both orientations."""
    body = seq[:-1]
    n = len(body)
    best = None
    for ori in (body, body[::-1]):
        for r in range(n):
            cand = ori[r:] + ori[:r]
            if best is None or cand < best:
                best = cand
    return best + (best[0],)


@dataclass
class CycleSet:
    """Canonical simple cycles of length >= 3; loops/spines live in flags."""

    graph: Graph
    cycles: list[Walk] = field(default_factory=list)
    has_loop: bool = False
    has_spine: bool = False

    def lengths(self) -> list[int]:
        return sorted(c.length for c in self.cycles)


def enumerate_simple_cycles(g: Graph, cap: int = 100_000) -> CycleSet:
    key = ("cycles", cap)
    got = g.cache.get(key)
    if got is None:
        got = _enumerate_simple_cycles(g, cap)
        g.cache[key] = got
    return got


def _enumerate_simple_cycles(g: Graph, cap: int = 100_000) -> CycleSet:
    """All simple cycles of length >= 3, canonical up to rotation+reversal.

    Elementary-cycle search rooted at the smallest vertex on each cycle;
    orientations deduplicated by requiring second vertex < last vertex.
    """
    found: list[tuple[int, ...]] = []
    n = len(g)
    for root in range(n):
        stack = [root]
        on_stack = {root}

        def dfs():
            u = stack[-1]
            for w in g.adj[u]:
                if w < root or w == u:
                    continue
                if w == root:
                    if len(stack) >= 3 and stack[1] < stack[-1]:
                        found.append(tuple(stack) + (root,))
                        if len(found) > cap:
                            raise CycleBudgetError(
                                f"more than {cap} simple cycles"
                            )
                elif w not in on_stack:
                    stack.append(w)
                    on_stack.add(w)
                    dfs()
                    on_stack.remove(w)
                    stack.pop()

        dfs()
    cs = CycleSet(
        graph=g,
        has_loop=g.has_loops,
        has_spine=g.edge_count() > 0,
    )
    for seq in sorted(canonical_cycle(s) for s in found):
        cs.cycles.append(Walk(g, seq))
    return cs


# -- squares ----------------------------------------------------------------

def squares_at(g: Graph) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """For each vertex v, all based squares (v,x,y,z,v), sorted.

    A square is a non-backtracking cycle of length four: x != z, v != y.
    Self-loop edges may participate (e.g. ``a a b c a`` on a triangle
    with a loop at a).
    """
    out = []
    for v in range(len(g)):
        sqs = []
        for x in g.adj[v]:
            for y in g.adj[x]:
                if y == v:
                    continue
                for z in g.adj[y]:
                    if z == x or z not in g.adj_sets[v]:
                        continue
                    sqs.append((v, x, y, z, v))
        out.append(tuple(sorted(set(sqs))))
    return tuple(out)


def graph_squares(g: Graph):
    got = g.cache.get("squares")
    if got is None:
        got = squares_at(g)
        g.cache["squares"] = got
    return got


def four_cycle_hom_free(g: Graph) -> bool:
    """True iff the graph has no non-backtracking cycle of length four."""
    return all(len(s) == 0 for s in graph_squares(g))
