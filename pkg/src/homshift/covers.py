"""Square moves on non-backtracking walks, the square relation, and the
budgeted square-cover atlas.

A square move inserts a square (non-backtracking 4-cycle) into a walk
and reduces backtracks.  A single insertion can shrink a walk by more
than four letters when it cancels a pendant square at the end of a
doubled path ("hair"); conversely such hairy neighbours cannot be
produced by insertion, so the move enumeration has two families:

- ``ins``: y = reduce(x with square s spliced at position k)
- ``del``: x = reduce(y with square s spliced at position k), for hairy
  y built explicitly from x (bounded by the length budget)

Both families record replayable move descriptors.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from .errors import AtlasIncomplete, AtlasUnsound, PreconditionError
from .graphs import Graph, Walk, graph_metric, graph_squares, insert_seq, reduce_seq

DEFAULT_MAX_LEN = 12
DEFAULT_MAX_CLASSES = 100_000
DEFAULT_EQUIV_STATES = 20_000


@dataclass(frozen=True)
class Move:
    orient: str  # "ins" | "del"
    k: int
    square: tuple[int, ...]

    def inverse(self) -> "Move":
        return Move("del" if self.orient == "ins" else "ins", self.k, self.square)


def apply_insertion(seq, k: int, square) -> tuple[int, ...]:
    if square[0] != seq[k]:
        raise PreconditionError("square must base at position k")
    return reduce_seq(insert_seq(seq, k, square))


def replay_move(x, y, move: Move) -> bool:
    """Check that the step x -> y is realized by ``move``."""
    try:
        if move.orient == "ins":
            return apply_insertion(x, move.k, move.square) == y
        return apply_insertion(y, move.k, move.square) == x
    except (PreconditionError, IndexError):
        return False


def replay_chain(start, steps) -> tuple[int, ...]:
    """Replay [(state, move), ...]; raises if any step fails."""
    cur = start
    for state, move in steps:
        if not replay_move(cur, state, move):
            raise PreconditionError("move chain does not replay")
        cur = state
    return cur


def square_moves_seq(g: Graph, seq, max_len: int | None = None, hairs: bool = True):
    """All (q, move) with q differing from seq by one square, |q|-1 <= max_len.

    Deterministic order: insertions by (k, square), then hair growths by
    (position, hair, square).  Hair growths require a finite max_len; they
    can be disabled for searches that only need insertion moves.
    """
    squares = graph_squares(g)
    n = len(seq)
    out = []
    seen = set()
    for k in range(n):
        for s in squares[seq[k]]:
            q = reduce_seq(insert_seq(seq, k, s))
            if q == seq:
                continue
            if max_len is not None and len(q) - 1 > max_len:
                continue
            if q not in seen:
                seen.add(q)
                out.append((q, Move("ins", k, s)))
    if hairs and max_len is not None:
        out.extend(_hair_growths(g, seq, max_len, seen))
    return out


def _hair_growths(g: Graph, seq, max_len: int, seen):
    """Grow a pendant square at the end of a fresh hair: q = u.h.s.h^-1.v.

    These are exactly the neighbours q with seq = reduce(q + square) that
    insertion into seq cannot reach.  Hair length m >= 1; m = 0 pendants
    are already covered by plain insertions.
    """
    squares = graph_squares(g)
    n = len(seq)
    budget = (max_len - (len(seq) - 1) - 4) // 2
    out = []
    if budget < 1 or not any(squares):
        return out
    for j in range(n):
        anchor = seq[j]
        prev = seq[j - 1] if j > 0 else None
        nxt = seq[j + 1] if j + 1 < n else None
        stack = [(anchor,)]
        while stack:
            h = stack.pop()
            m = len(h) - 1
            if m >= 1:
                tip = h[-1]
                below = h[-2]
                for s in squares[tip]:
                    if s[1] == below or s[3] == below:
                        continue
                    q = seq[:j] + h + s[1:] + h[::-1][1:] + seq[j + 1:]
                    qr = reduce_seq(q)
                    if qr != q:
                        continue  # junction cancelled; insertion family covers it
                    inv = (s[0], s[3], s[2], s[1], s[0])
                    k = j + m
                    move = Move("del", k, inv)
                    if not replay_move(seq, q, move):
                        continue
                    if q not in seen:
                        seen.add(q)
                        out.append((q, move))
            if m < budget:
                for w in g.adj[h[-1]]:
                    if m == 0:
                        if w == prev or w == nxt:
                            continue
                    elif m >= 1 and w == h[-2]:
                        continue
                    stack.append(h + (w,))
    out.sort(key=lambda t: (t[1].k, t[1].square, t[0]))
    return out


def square_moves(p: Walk, max_len: int | None = None):
    """Iterator over (Walk, Move) neighbours of a non-backtracking walk."""
    if not p.is_nonbacktracking():
        raise PreconditionError("square moves need a non-backtracking walk")
    for q, move in square_moves_seq(p.graph, p.seq, max_len):
        yield Walk(p.graph, q), move


# -- equivalence --------------------------------------------------------------

@dataclass
class EquivalenceResult:
    status: str  # "equivalent" | "distinct" | "unknown"
    witness: list | None = None  # [(state, move), ...] from p to q
    visited: int = 0

    @property
    def equivalent(self):
        return self.status == "equivalent"


def _trace(parents, state):
    """Chain of (state, move) from the root of ``parents`` to ``state``."""
    chain = []
    cur = state
    while parents[cur] is not None:
        prev, move = parents[cur]
        chain.append((cur, move))
        cur = prev
    chain.reverse()
    return chain


def _invert_chain(start, steps):
    """Reverse a replayable chain: end -> start."""
    out = []
    cur = start
    states = [start] + [s for s, _ in steps]
    for i in range(len(steps) - 1, -1, -1):
        state, move = steps[i]
        out.append((states[i], move.inverse()))
    return out


def equivalent_mod_squares(
    p: Walk,
    q: Walk,
    max_len: int = DEFAULT_MAX_LEN,
    max_states: int = DEFAULT_EQUIV_STATES,
    hairs: bool = True,
) -> EquivalenceResult:
    """Decide p ~ q under the square relation, within budget.

    Bidirectional search over square moves restricted to walks of length
    <= max_len.  "distinct" is certified only when a whole component is
    exhausted and never needed length > max_len - 4 (and the move set was
    the full one, hairs included).
    """
    g = p.graph
    if not p.is_nonbacktracking() or not q.is_nonbacktracking():
        raise PreconditionError("equivalence is defined on non-backtracking walks")
    a, b = p.seq, q.seq
    if a[0] != b[0] or a[-1] != b[-1] or (len(a) - len(b)) % 2:
        return EquivalenceResult("distinct")
    if a == b:
        return EquivalenceResult("equivalent", witness=[])
    sides = [{a: None}, {b: None}]
    frontiers: list[list] = [[a], [b]]
    maxlen_seen = [len(a) - 1, len(b) - 1]
    visited = 2
    while True:
        # prefer expanding the smaller live frontier
        order = sorted((0, 1), key=lambda s: len(frontiers[s]))
        side = next((s for s in order if frontiers[s]), None)
        if side is None:
            break
        mine, theirs = sides[side], sides[1 - side]
        new = []
        for state in frontiers[side]:
            for nb, move in square_moves_seq(g, state, max_len, hairs=hairs):
                if nb in mine:
                    continue
                mine[nb] = (state, move)
                maxlen_seen[side] = max(maxlen_seen[side], len(nb) - 1)
                new.append(nb)
                visited += 1
                if nb in theirs:
                    half_p = _trace(sides[0], nb)
                    half_q = _trace(sides[1], nb)
                    witness = half_p + _invert_chain(b, half_q)
                    replay_chain(a, witness)
                    return EquivalenceResult("equivalent", witness, visited)
                if visited > max_states:
                    return EquivalenceResult("unknown", visited=visited)
        frontiers[side] = new
        if not new:
            # component of this side exhausted without meeting the other
            if hairs and maxlen_seen[side] <= max_len - 4:
                return EquivalenceResult("distinct", visited=visited)
            return EquivalenceResult("unknown", visited=visited)
    return EquivalenceResult("unknown", visited=visited)


# -- square cover atlas -------------------------------------------------------

@dataclass
class MergeRecord:
    source: tuple[int, ...]
    target: tuple[int, ...]
    steps: list  # [(state, move), ...] from source to target

    def replay(self) -> bool:
        try:
            return replay_chain(self.source, self.steps) == self.target
        except PreconditionError:
            return False


@dataclass
class CoverStats:
    classes: int = 0
    max_class_distance: int = 0
    skipped_extensions: int = 0
    uncertain_splits: int = 0
    distance_profile: dict[int, int] = field(default_factory=dict)


@dataclass
class CoverAtlas:
    graph: Graph
    base: int
    reps: list[tuple[int, ...]]
    eta: list[int]
    transitions: dict[tuple[int, int], int]
    edges: set[tuple[int, int]]
    merges: list[MergeRecord]
    status: str  # "ClosedFinite" | "BudgetExceeded"
    stats: CoverStats
    max_len: int

    @property
    def class_count(self) -> int:
        return len(self.reps)

    def class_distances(self) -> list[int | None]:
        dist: list = [None] * len(self.reps)
        dist[0] = 0
        dq = deque([0])
        nbrs: dict[int, set] = {}
        for (c, _v), d in self.transitions.items():
            nbrs.setdefault(c, set()).add(d)
            nbrs.setdefault(d, set()).add(c)
        while dq:
            u = dq.popleft()
            for v in sorted(nbrs.get(u, ())):
                if dist[v] is None:
                    dist[v] = dist[u] + 1
                    dq.append(v)
        return dist

    def degree_sequence(self) -> list[int]:
        deg: dict[int, set] = {}
        for i, j in self.edges:
            deg.setdefault(i, set()).add(j)
            deg.setdefault(j, set()).add(i)
        return sorted(len(deg.get(i, ())) for i in range(len(self.reps)))

    def check(self) -> None:
        """Internal soundness: merges replay, eta respects edges."""
        for m in self.merges:
            if not m.replay():
                raise AtlasUnsound("merge witness does not replay")
        for i, j in self.edges:
            if not self.graph.adjacent(self.eta[i], self.eta[j]):
                raise AtlasUnsound("edge between classes with non-adjacent eta")

    def quotient_graph(self) -> Graph:
        names = [f"c{i}" for i in range(len(self.reps))]
        edges = [(names[i], names[j]) for i, j in sorted(self.edges)]
        return Graph(edges, vertices=names, name=f"{self.graph.name}_sqcover")

    def to_json(self) -> dict:
        return {
            "base": self.graph.vertices[self.base],
            "classes": [
                {
                    "id": i,
                    "representative": list(self.graph.names(r)),
                    "eta": self.graph.vertices[self.eta[i]],
                }
                for i, r in enumerate(self.reps)
            ],
            "edges": sorted(list(e) for e in self.edges),
            "status": self.status,
            "stats": {
                "classes": self.stats.classes,
                "max_class_distance": self.stats.max_class_distance,
                "skipped_extensions": self.stats.skipped_extensions,
                "uncertain_splits": self.stats.uncertain_splits,
                "distance_profile": {
                    str(k): v for k, v in sorted(self.stats.distance_profile.items())
                },
            },
        }

    def dump_json(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False)


def build_square_cover(
    g: Graph,
    max_len: int = DEFAULT_MAX_LEN,
    max_classes: int = DEFAULT_MAX_CLASSES,
    equiv_states: int = DEFAULT_EQUIV_STATES,
    base: int | None = None,
) -> CoverAtlas:
    key = ("atlas", max_len, max_classes, equiv_states, base)
    got = g.cache.get(key)
    if got is None:
        got = _build_square_cover(g, max_len, max_classes, equiv_states, base)
        g.cache[key] = got
    return got


def _build_square_cover(
    g: Graph,
    max_len: int = DEFAULT_MAX_LEN,
    max_classes: int = DEFAULT_MAX_CLASSES,
    equiv_states: int = DEFAULT_EQUIV_STATES,
    base: int | None = None,
) -> CoverAtlas:
    """Explore the quotient of non-backtracking based walks by squares.

    Classes grow by appending neighbours to representatives; a new walk
    is classified by a bounded search over square moves that stops at the
    first already-classified walk (the merge witness is recorded and
    replayable).  Only certified merges are applied, so if the candidate
    class set closes under extension the true square cover is a quotient
    of it, hence finite.
    """
    if base is None:
        base = g.lex_smallest_vertex()
    D: dict[tuple[int, ...], int] = {}
    reps: list[tuple[int, ...]] = []
    merges: list[MergeRecord] = []
    stats = CoverStats()

    def classify(w) -> int:
        """Class of walk w, searching its square-move component for a hit."""
        if w in D:
            return D[w]
        parents = {w: None}
        dq = deque([w])
        visited = 1
        hit_class = None
        hit_state = None
        truncated = False
        while dq:
            cur = dq.popleft()
            for nb, move in square_moves_seq(g, cur, max_len):
                if nb in parents:
                    continue
                parents[nb] = (cur, move)
                visited += 1
                if nb in D:
                    hit_class = D[nb]
                    hit_state = nb
                    break
                dq.append(nb)
                if visited > equiv_states:
                    truncated = True
                    break
            if hit_class is not None or truncated:
                break
        if hit_class is None:
            cid = len(reps)
            reps.append(w)
            if truncated:
                stats.uncertain_splits += 1
        else:
            cid = hit_class
            steps = _trace(parents, hit_state)
            if steps:
                merges.append(MergeRecord(w, hit_state, steps))
        for s in parents:
            if s not in D:
                D[s] = cid
        return cid

    empty = (base,)
    root = classify(empty)
    queue = deque([root])
    enqueued = {root}
    transitions: dict[tuple[int, int], int] = {}
    edges: set[tuple[int, int]] = set()
    exceeded = False

    while queue:
        cid = queue.popleft()
        rep = reps[cid]
        for v in g.adj[rep[-1]]:
            w = reduce_seq(rep + (v,))
            if len(w) - 1 > max_len:
                stats.skipped_extensions += 1
                exceeded = True
                continue
            nid = classify(w)
            transitions[(cid, v)] = nid
            edges.add((min(cid, nid), max(cid, nid)))
            if nid not in enqueued:
                enqueued.add(nid)
                queue.append(nid)
        if len(reps) > max_classes:
            exceeded = True
            break

    atlas = CoverAtlas(
        graph=g,
        base=base,
        reps=reps,
        eta=[r[-1] for r in reps],
        transitions=transitions,
        edges=edges,
        merges=merges,
        status="BudgetExceeded" if exceeded else "ClosedFinite",
        stats=stats,
        max_len=max_len,
    )
    stats.classes = len(reps)
    dists = atlas.class_distances()
    known = [d for d in dists if d is not None]
    stats.max_class_distance = max(known) if known else 0
    for d in known:
        stats.distance_profile[d] = stats.distance_profile.get(d, 0) + 1
    return atlas


def lift_window(atlas: CoverAtlas, cells: dict, i0) -> dict:
    """Lift a locally admissible window into cover classes.

    ``cells`` maps grid coordinates to vertex ids; the value at ``i0``
    must be the atlas base.  Transitions must exist in the atlas (raises
    AtlasIncomplete otherwise); any plaquette inconsistency raises
    AtlasUnsound, signalling a bug in the atlas itself.
    """
    if i0 not in cells:
        raise PreconditionError("i0 must be in the window support")
    if cells[i0] != atlas.base:
        raise PreconditionError("window value at i0 must equal the atlas base")
    out = {i0: 0}
    dq = deque([i0])
    while dq:
        (x, y) = dq.popleft()
        for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if nb not in cells:
                continue
            key = (out[(x, y)], cells[nb])
            if key not in atlas.transitions:
                raise AtlasIncomplete(
                    f"no transition from class {key[0]} via "
                    f"{atlas.graph.vertices[key[1]]}"
                )
            cls = atlas.transitions[key]
            if nb in out:
                if out[nb] != cls:
                    raise AtlasUnsound(f"inconsistent lift at {nb}")
            else:
                out[nb] = cls
                dq.append(nb)
    if len(out) != len(cells):
        raise PreconditionError("window support is not connected")
    return out
