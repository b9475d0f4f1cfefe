"""The graph of length-n walks: adjacency, distances, diameter, witnesses.

Two walks of equal length are adjacent when they are adjacent position by
position; this is exactly the condition for the two rows to sit next to
each other in a valid configuration (a 2xN rectangle is block-like, so
locally admissible means globally admissible).

Walk states inside the searches are packed as bytes when the vertex
count allows, and neighbour enumeration is lexicographic in vertex id,
so distances, diameters and reported paths are reproducible.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import LengthError, ParseError, PreconditionError, VerificationError
from .graphs import Graph, Walk, graph_metric

DEFAULT_STATE_BUDGET = 2_000_000
DEFAULT_DIAMETER_CAP = 200_000


# -- state packing ------------------------------------------------------------

def _packer(g: Graph):
    if len(g) <= 256:
        return lambda t: bytes(t), lambda b: tuple(b)
    return lambda t: t, lambda t: t


# -- adjacency ----------------------------------------------------------------

def delta_adjacent(p: Walk, q: Walk) -> bool:
    if p.graph is not q.graph:
        raise LengthError("walks live on different graphs")
    if p.length != q.length:
        raise LengthError(f"length mismatch: {p.length} vs {q.length}")
    return seq_adjacent(p.graph, p.seq, q.seq)


def seq_adjacent(g: Graph, a, b) -> bool:
    adj = g.adj_sets
    return all(y in adj[x] for x, y in zip(a, b))


def delta_neighbors(p: Walk):
    """All walks adjacent to p, in lexicographic vertex-id order."""
    for seq in seq_neighbors(p.graph, p.seq):
        yield Walk(p.graph, seq)


def seq_neighbors(g: Graph, seq):
    adj = g.adj
    adjs = g.adj_sets
    n = len(seq)
    out: list[int] = []

    def rec(i):
        if i == n:
            yield tuple(out)
            return
        for v in adj[seq[i]]:
            if i > 0 and v not in adjs[out[-1]]:
                continue
            out.append(v)
            yield from rec(i + 1)
            out.pop()

    yield from rec(0)


def seq_neighbor_count(g: Graph, seq) -> int:
    """Number of Delta-neighbours of seq, by transfer DP (no enumeration)."""
    adj = g.adj
    adjs = g.adj_sets
    counts = {v: 1 for v in adj[seq[0]]}
    for x in seq[1:]:
        nxt: dict[int, int] = {}
        for v in adj[x]:
            s = 0
            for u, c in counts.items():
                if v in adjs[u]:
                    s += c
            if s:
                nxt[v] = s
        counts = nxt
        if not counts:
            return 0
    return sum(counts.values())


# -- walk enumeration ---------------------------------------------------------

def walk_count(g: Graph, n: int) -> int:
    """Number of walks of length n (exact integer)."""
    vec = [1] * len(g)
    for _ in range(n):
        vec = [sum(vec[j] for j in g.adj[i]) for i in range(len(g))]
    return sum(vec)


def enumerate_walks(g: Graph, n: int):
    """All length-n walks in lexicographic id order."""
    out: list[int] = []

    def rec(i):
        if i == n + 1:
            yield tuple(out)
            return
        choices = range(len(g)) if i == 0 else g.adj[out[-1]]
        for v in choices:
            out.append(v)
            yield from rec(i + 1)
            out.pop()

    yield from rec(0)


# -- distance -----------------------------------------------------------------

@dataclass
class DistanceResult:
    value: int | None
    exact: bool
    status: str  # "exact" | "budget" | "disconnected"
    lower_bound: int
    visited: int
    path: list[tuple[int, ...]] | None = None

    def __int__(self):
        if self.value is None:
            raise ValueError(f"distance not determined ({self.status})")
        return self.value


def delta_distance(
    p: Walk,
    q: Walk,
    cap: int = DEFAULT_STATE_BUDGET,
    want_path: bool = False,
) -> DistanceResult:
    """Exact bidirectional BFS distance in the walk graph, within budget.

    On budget exhaustion the result carries the number of completed BFS
    layers on both sides plus one, which is a certified lower bound.
    """
    if p.graph is not q.graph:
        raise LengthError("walks live on different graphs")
    if p.length != q.length:
        raise LengthError(f"length mismatch: {p.length} vs {q.length}")
    g = p.graph
    pack, unpack = _packer(g)
    a, b = pack(p.seq), pack(q.seq)
    if a == b:
        return DistanceResult(0, True, "exact", 0, 1, [p.seq] if want_path else None)

    sides = [
        {a: None},  # parent maps
        {b: None},
    ]
    frontiers = [[a], [b]]
    done_layers = [0, 0]
    visited = 2

    def build_path(meet, side_parent, other_parent):
        left = []
        cur = meet
        while cur is not None:
            left.append(unpack(cur))
            cur = side_parent[cur]
        left.reverse()
        cur = other_parent[meet]
        right = []
        while cur is not None:
            right.append(unpack(cur))
            cur = other_parent[cur]
        return left + right

    while frontiers[0] and frontiers[1]:
        side = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
        mine, theirs = sides[side], sides[1 - side]
        new: list = []
        for state in frontiers[side]:
            for nb in seq_neighbors(g, unpack(state)):
                key = pack(nb)
                if key in mine:
                    continue
                mine[key] = state
                new.append(key)
                visited += 1
                if key in theirs:
                    dist = done_layers[side] + 1 + done_layers[1 - side]
                    path = None
                    if want_path:
                        path = build_path(key, mine, theirs)
                        if side == 1:
                            path.reverse()
                    return DistanceResult(dist, True, "exact", dist, visited, path)
                if visited > cap:
                    lb = done_layers[0] + done_layers[1] + 1
                    return DistanceResult(None, False, "budget", lb, visited)
        done_layers[side] += 1
        frontiers[side] = new
    lb = done_layers[0] + done_layers[1] + 1
    return DistanceResult(None, False, "disconnected", lb, visited)


# -- diameter -----------------------------------------------------------------

@dataclass
class DiameterReport:
    n: int
    value: int
    exactness: str  # "Exact" | "LowerBound"
    vertex_count: int
    method: str  # "FullBFS" | "DoubleSweep"

    def to_json(self):
        return {
            "n": self.n,
            "value": self.value,
            "exactness": self.exactness,
            "vertex_count": self.vertex_count,
            "method": self.method,
        }


def _bfs_ecc(g: Graph, pack, unpack, src, max_states: int | None = None, nbcache=None):
    """BFS over the implicit walk graph; returns (eccentricity, dist map).

    With a state budget, distances assigned before the cut are exact, so
    the eccentricity returned is still a valid lower bound.  ``nbcache``
    memoises neighbour lists across repeated sweeps of the same graph.
    """
    dist = {src: 0}
    dq = deque([src])
    ecc = 0
    while dq:
        u = dq.popleft()
        du = dist[u]
        if nbcache is not None:
            nbs = nbcache.get(u)
            if nbs is None:
                nbs = [pack(nb) for nb in seq_neighbors(g, unpack(u))]
                nbcache[u] = nbs
        else:
            nbs = (pack(nb) for nb in seq_neighbors(g, unpack(u)))
        for key in nbs:
            if key not in dist:
                dist[key] = du + 1
                ecc = max(ecc, du + 1)
                dq.append(key)
        if max_states is not None and len(dist) > max_states:
            break
    return ecc, dist


def delta_diameter(g: Graph, n: int, cap: int = DEFAULT_DIAMETER_CAP) -> DiameterReport:
    """Diameter of the length-n walk graph.

    Exact when the number of walks fits the cap (all-sources BFS for tiny
    graphs, iFUB otherwise); beyond the cap a double-sweep lower bound
    from sampled sources, flagged LowerBound.
    """
    count = walk_count(g, n)
    pack, unpack = _packer(g)
    ifub_cap = min(cap, 20_000)
    if count <= min(cap, 600):
        best = 0
        nbcache: dict = {}
        for s in enumerate_walks(g, n):
            ecc, _ = _bfs_ecc(g, pack, unpack, pack(s), nbcache=nbcache)
            best = max(best, ecc)
        return DiameterReport(n, best, "Exact", count, "FullBFS")
    if count <= ifub_cap:
        states = [pack(s) for s in enumerate_walks(g, n)]
        return _ifub(g, n, states, pack, unpack, count)
    # sampled double sweep, each BFS budgeted by the cap
    budget = min(cap, 30_000)
    lb = 0
    seen = 0
    for s in enumerate_walks(g, n):
        if seen >= 2:
            break
        seen += 1
        src = pack(s)
        ecc, dist = _bfs_ecc(g, pack, unpack, src, max_states=budget)
        far = max(dist, key=lambda k: (dist[k], k))
        ecc2, _ = _bfs_ecc(g, pack, unpack, far, max_states=budget)
        lb = max(lb, ecc, ecc2)
    return DiameterReport(n, lb, "LowerBound", count, "DoubleSweep")


def _ifub(g: Graph, n, states, pack, unpack, count, max_bfs: int = 60):
    """Exact diameter by the fringe method: sweep nodes by decreasing
    distance from a far root until the lower bound certifies itself."""
    nbcache: dict = {}
    ecc0, dist = _bfs_ecc(g, pack, unpack, states[0], nbcache=nbcache)
    far = max(dist, key=lambda k: (dist[k], k))
    ecc1, dist1 = _bfs_ecc(g, pack, unpack, far, nbcache=nbcache)
    levels: dict[int, list] = {}
    for k, d in dist1.items():
        levels.setdefault(d, []).append(k)
    lb = max(ecc0, ecc1)
    bfs_used = 2
    for depth in sorted(levels, reverse=True):
        if lb >= 2 * depth:
            return DiameterReport(n, lb, "Exact", count, "FullBFS")
        for s in sorted(levels[depth]):
            ecc, _ = _bfs_ecc(g, pack, unpack, s, nbcache=nbcache)
            lb = max(lb, ecc)
            bfs_used += 1
            if bfs_used >= max_bfs:
                if lb >= 2 * depth:
                    return DiameterReport(n, lb, "Exact", count, "FullBFS")
                return DiameterReport(n, lb, "LowerBound", count, "DoubleSweep")
    return DiameterReport(n, lb, "Exact", count, "FullBFS")


# -- witness paths ------------------------------------------------------------

R_LEFT = "0"
R_RIGHT = "1"


def r_step_kind(g: Graph, x, y) -> str | None:
    """Which shift relation (if any) links consecutive path steps x, y.

    Generalised to equal-endpoint walks: left-shift form needs a common
    neighbour at the far end, right-shift form at the near end.
    """
    if len(x) != len(y):
        return None
    adj = g.adj_sets
    if all(y[i + 1] in adj[x[i]] for i in range(len(x) - 1)) and (
        adj[x[-1]] & adj[y[-1]]
    ):
        return R_LEFT
    if all(y[i - 1] in adj[x[i]] for i in range(1, len(x))) and (
        adj[x[0]] & adj[y[0]]
    ):
        return R_RIGHT
    return None


@dataclass
class WitnessPath:
    """A sequence of equal-length walks certifying a distance bound."""

    kind: str  # "delta" | "r"
    steps: list[Walk] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in ("delta", "r"):
            raise ParseError(f"unknown witness kind {self.kind!r}")
        if not self.steps:
            raise PreconditionError("witness path needs at least one step")

    @property
    def graph(self) -> Graph:
        return self.steps[0].graph

    def __len__(self):
        """Number of transitions (not states)."""
        return len(self.steps) - 1

    def start(self) -> Walk:
        return self.steps[0]

    def end(self) -> Walk:
        return self.steps[-1]


def verify_witness_detailed(w: WitnessPath) -> tuple[bool, int | None, str]:
    g = w.graph
    L = w.steps[0].length
    for i, s in enumerate(w.steps):
        if s.graph is not g:
            return False, i, "mixed graphs"
        if s.length != L:
            return False, i, f"length {s.length} != {L}"
    if w.kind == "delta":
        for i in range(len(w.steps) - 1):
            a, b = w.steps[i].seq, w.steps[i + 1].seq
            if not seq_adjacent(g, a, b):
                return False, i, "steps not positionwise adjacent"
        return True, None, "ok"
    # r-path: common endpoints, shift relations
    s0 = w.steps[0].seq
    for i, s in enumerate(w.steps):
        if s.seq[0] != s0[0] or s.seq[-1] != s0[-1]:
            return False, i, "endpoints differ along the path"
    for i in range(len(w.steps) - 1):
        if r_step_kind(g, w.steps[i].seq, w.steps[i + 1].seq) is None:
            return False, i, "not a shift relation"
    return True, None, "ok"


def verify_witness(w: WitnessPath) -> bool:
    ok, _, _ = verify_witness_detailed(w)
    return ok


def r_to_delta(w: WitnessPath) -> WitnessPath:
    """Expand an r-path into a delta-path of at most twice the length.

    Each shift step (c, c') inserts the witnessing shifted walk, which is
    adjacent to both sides.
    """
    if w.kind != "r":
        raise VerificationError("r_to_delta expects an r-path")
    ok, idx, why = verify_witness_detailed(w)
    if not ok:
        raise VerificationError(f"invalid r-path at step {idx}: {why}")
    g = w.graph
    adj = g.adj_sets
    out = [w.steps[0].seq]
    for i in range(len(w.steps) - 1):
        x, y = w.steps[i].seq, w.steps[i + 1].seq
        kind = r_step_kind(g, x, y)
        if kind == R_LEFT:
            z = min(adj[x[-1]] & adj[y[-1]])
            mid = y[1:] + (z,)
        else:
            z = min(adj[x[0]] & adj[y[0]])
            mid = (z,) + y[:-1]
        for s in (mid, y):
            if s != out[-1]:
                out.append(s)
    path = WitnessPath("delta", [Walk(g, s) for s in out])
    ok, idx, why = verify_witness_detailed(path)
    if not ok:
        raise VerificationError(f"conversion produced invalid step {idx}: {why}")
    return path


# -- serialization ------------------------------------------------------------

def dump_witness(w: WitnessPath) -> str:
    lines = [f"kind={w.kind}"]
    lines.extend(",".join(s.names()) for s in w.steps)
    return "\n".join(lines) + "\n"


def load_witness(g: Graph, text: str) -> WitnessPath:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("kind="):
        raise ParseError("witness file must start with kind=delta|r")
    kind = lines[0].split("=", 1)[1]
    steps = [Walk.from_names(g, ln.split(",")) for ln in lines[1:]]
    return WitnessPath(kind, steps)
