"""Built-in graph corpus.

Each entry records the edge list plus the vertex/edge counts it must
match after parsing; loading a builtin validates connectivity and those
counts.  The Ken-katabami graph is additionally validated against the
structural facts its log-lower-bound argument relies on.
"""
from __future__ import annotations

from .errors import HomshiftError, UsageError
from .graphs import Graph, graph_metric

# name -> (edges, vertex count, edge count)
_CORPUS: dict[str, tuple[list[tuple[str, str]], int, int]] = {}


def _reg(name, edges, nv, ne):
    _CORPUS[name] = (edges, nv, ne)


_reg("k2", [("a", "b")], 2, 1)
_reg("p3", [("a", "b"), ("b", "c")], 3, 2)
_reg("k3", [("a", "b"), ("b", "c"), ("c", "a")], 3, 3)
_reg("c4", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")], 4, 4)

# Triangle with a self-loop at a.
_reg("tri_loop", [("a", "a"), ("a", "b"), ("b", "c"), ("c", "a")], 3, 4)

# Square a-b-c-d with a pendant triangle on edge c-d: infinite square cover.
_reg(
    "fig_a",
    [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("c", "e"), ("d", "e")],
    5,
    6,
)

# Domino: two squares sharing an edge.  a,b,c top row; d,e,f bottom row.
_reg(
    "fig_b",
    [
        ("a", "b"), ("b", "c"),
        ("d", "e"), ("e", "f"),
        ("a", "d"), ("b", "e"), ("c", "f"),
    ],
    6,
    7,
)

# Complete graph on four vertices; its square cover is the 3-cube.
_reg(
    "fig_c",
    [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")],
    4,
    6,
)

# Square with a self-loop at a; cover is two squares joined by an edge.
_reg(
    "fig_d",
    [("a", "a"), ("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
    4,
    5,
)

# Ken-katabami graph: 16 vertices.  Exterior 6-cycle e1 g1 e2 g2 e3 g3;
# three "kite" assemblies of delta/mu vertices around the hub w.
_KEN_EDGES = [
    # hub to the six mu vertices
    ("w", "m1"), ("w", "m2"), ("w", "m3"), ("w", "m4"), ("w", "m5"), ("w", "m6"),
    # gamma fans
    ("g1", "m2"), ("g1", "m3"), ("g2", "m4"), ("g2", "m5"), ("g3", "m6"), ("g3", "m1"),
    # delta fans
    ("d1", "m1"), ("d1", "m2"), ("d2", "m3"), ("d2", "m4"), ("d3", "m5"), ("d3", "m6"),
    # epsilon attachments
    ("e1", "g1"), ("e1", "d1"), ("e1", "g3"),
    ("e2", "g1"), ("e2", "d2"), ("e2", "g2"),
    ("e3", "g2"), ("e3", "d3"), ("e3", "g3"),
]
_reg("ken", _KEN_EDGES, 16, 27)

# Two graphs whose Hom shift is Theta(1)-phased block gluing
# (the "lonely cluster" examples).  Vertices named after grid positions.
_CLUSTER_1_EDGES = [
    # inner square
    ("q00", "q02"), ("q02", "q22"), ("q22", "q20"), ("q20", "q00"),
    # upper-right shell
    ("q02", "q13"), ("q13", "q33"), ("q33", "q22"),
    ("q33", "q31"), ("q31", "q20"),
    ("q33", "q44"), ("q44", "q41"), ("q41", "q31"),
    # lower shell
    ("q20", "q2n"), ("q2n", "q41"),
    ("q2n", "qnn"), ("qnn", "q00"),
    # left shell
    ("qnn", "qn2"), ("qn2", "q02"),
    ("qn2", "q14"), ("q14", "q13"),
    ("q14", "q44"),
]
_reg("cluster_1", _CLUSTER_1_EDGES, 13, 21)

_CLUSTER_2_EDGES = [
    ("q00", "q11"), ("q11", "q20"), ("q20", "q1n"), ("q1n", "q00"),
    ("q11", "q13"), ("q13", "q31"),
    ("q13", "qn0"), ("qn0", "q00"),
    ("qn0", "q1m"), ("q1m", "q1n"),
    ("q1m", "q3n"),
    ("q20", "q31"), ("q31", "q40"), ("q40", "q3n"), ("q3n", "q20"),
]
_reg("cluster_2", _CLUSTER_2_EDGES, 10, 15)

# Gluings of two Theta(1) clusters at a single vertex: Theta(log n) examples.


def _relabel(edges, suffix, shared, shared_name):
    out = []
    for a, b in edges:
        a2 = shared_name if a == shared else a + suffix
        b2 = shared_name if b == shared else b + suffix
        out.append((a2, b2))
    return out


_GLUED_1_EDGES = (
    _relabel(_CLUSTER_1_EDGES, "L", "qnn", "hub")
    + _relabel(_CLUSTER_1_EDGES, "R", "q44", "hub")
)
_reg("glued_1", _GLUED_1_EDGES, 25, 42)

_GLUED_2_EDGES = (
    _relabel(_CLUSTER_2_EDGES, "L", "q40", "hub")
    + _relabel(_CLUSTER_2_EDGES, "R", "q40", "hub")
)
_reg("glued_2", _GLUED_2_EDGES, 19, 30)


BUILTIN_NAMES = tuple(sorted(_CORPUS))

_loaded: dict[str, Graph] = {}


def get_builtin(name: str) -> Graph:
    if name not in _CORPUS:
        raise UsageError(
            f"unknown builtin {name!r}; choose from {', '.join(BUILTIN_NAMES)}"
        )
    if name not in _loaded:
        edges, nv, ne = _CORPUS[name]
        g = Graph(edges, name=name)
        if len(g) != nv or g.edge_count() != ne:
            raise HomshiftError(
                f"builtin {name}: expected {nv}v/{ne}e, got {len(g)}v/{g.edge_count()}e"
            )
        if not graph_metric(g).connected:
            raise HomshiftError(f"builtin {name} is not connected")
        if name == "ken":
            _validate_ken(g)
        _loaded[name] = g
    return _loaded[name]


KEN_EXTERIOR = ("e1", "g1", "e2", "g2", "e3", "g3", "e1")


def _validate_ken(g: Graph) -> None:
    """Structural facts the Ken-katabami lower-bound argument uses."""
    ids = {n: g.id_of(n) for n in g.vertices}

    def common(a, b):
        return g.adj_sets[ids[a]] & g.adj_sets[ids[b]]

    ring = KEN_EXTERIOR
    # exterior cycle edges exist
    for a, b in zip(ring, ring[1:]):
        if ids[b] not in g.adj_sets[ids[a]]:
            raise HomshiftError(f"ken: missing exterior edge {a}-{b}")
    # the only common neighbour of consecutive ring vertices two apart is
    # the ring vertex between them
    for i in range(6):
        a, mid, b = ring[i], ring[i + 1], ring[(i + 2) % 6]
        if common(a, b) != {ids[mid]}:
            raise HomshiftError(
                f"ken: common neighbourhood of {a},{b} is not exactly {{{mid}}}"
            )
    if not graph_metric(g).bipartite:
        raise HomshiftError("ken: expected a bipartite graph")
