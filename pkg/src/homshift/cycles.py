"""Square decompositions of cycles, the reduction-cost constant, and the
cactus-forest representation of cycles.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import InvalidCactus, PreconditionError
from .graphs import (
    Graph,
    Walk,
    canonical_cycle,
    enumerate_simple_cycles,
    graph_metric,
    insert_seq,
    reduce_seq,
)
from .covers import (
    Move,
    build_square_cover,
    equivalent_mod_squares,
    replay_chain,
    square_moves_seq,
)

DEFAULT_DECOMP_STATES = 150_000


def move_cost(prev_len: int, new_len: int) -> int:
    return max(2, abs(prev_len - new_len) // 2)


@dataclass
class Decomposition:
    """A replayable square decomposition down to the empty cycle."""

    input: Walk
    steps: list[tuple[int, ...]]  # steps[0] = reduced input, last = empty
    moves: list[Move]
    area: int
    cost: int
    area_exact: bool
    cost_exact: bool

    def replay(self) -> bool:
        try:
            end = replay_chain(self.steps[0], list(zip(self.steps[1:], self.moves)))
        except PreconditionError:
            return False
        return len(end) == 1 and end == self.steps[-1]


@dataclass
class DecompositionResult:
    status: str  # "decomposed" | "not_decomposable" | "unknown"
    decomposition: Decomposition | None = None
    visited: int = 0


def square_decompose(
    c: Walk,
    max_len: int | None = None,
    max_states: int = DEFAULT_DECOMP_STATES,
) -> DecompositionResult:
    key = ("decomp", c.seq, max_len, max_states)
    got = c.graph.cache.get(key)
    if got is None:
        got = _square_decompose(c, max_len, max_states)
        c.graph.cache[key] = got
    return got


def _square_decompose(
    c: Walk,
    max_len: int | None = None,
    max_states: int = DEFAULT_DECOMP_STATES,
) -> DecompositionResult:
    """Minimum-area decomposition of a cycle into squares, within budget.

    Layered BFS over square insertion moves toward the empty cycle,
    minimising the step count and, among minimum-area paths, the total
    reduction cost sum(max(2, |dl|/2)).  The length cap escalates from
    tight to the configured maximum; a bidirectional existence search is
    the last resort (then area/cost are upper bounds, flagged non-exact).
    """
    if not c.is_cycle():
        raise PreconditionError("square_decompose needs a cycle")
    g = c.graph
    seq = reduce_seq(c.seq)
    L = len(seq) - 1
    cap_max = max_len if max_len is not None else L + 4 * len(g)
    empty = (seq[0],)
    if len(seq) == 1:
        return DecompositionResult(
            "decomposed", Decomposition(c, [seq], [], 0, 0, True, True), 1
        )
    if L % 2:
        return DecompositionResult("not_decomposable")  # odd cycles never reduce

    caps = sorted({min(L + 8, cap_max), min(L + 16, cap_max), cap_max})
    total_visited = 0
    for cap in caps:
        res = _layered_decomposition(g, c, seq, empty, cap, max_states)
        total_visited += res.visited
        if res.status == "decomposed":
            # exact only if nothing was pruned at this cap
            return DecompositionResult(res.status, res.decomposition, total_visited)
        if res.status == "not_decomposable":
            return DecompositionResult(res.status, visited=total_visited)
        if res.status == "unknown_exhausted":
            continue  # pruned at this cap; escalate
        break  # budget blown: escalating would only be slower

    # existence fallback: bidirectional search to the empty cycle
    res2 = equivalent_mod_squares(
        Walk(g, seq), Walk(g, empty),
        max_len=cap_max, max_states=max_states, hairs=False,
    )
    if res2.status == "equivalent":
        steps = [seq] + [s for s, _ in res2.witness]
        moves = [m for _, m in res2.witness]
        cost = sum(
            move_cost(len(a) - 1, len(b) - 1) for a, b in zip(steps, steps[1:])
        )
        dec = Decomposition(c, steps, moves, len(moves), cost, False, False)
        assert dec.replay()
        return DecompositionResult("decomposed", dec, total_visited + res2.visited)
    return DecompositionResult("unknown", visited=total_visited + res2.visited)


def _layered_decomposition(g, c, seq, empty, max_len, max_states):
    layer: dict = {seq: (0, None, None)}  # state -> (cost, parent, move)
    seen = {seq}
    visited = 1
    pruned = False
    maxlen_seen = len(seq) - 1
    parents_all = {seq: (0, None, None)}
    depth = 0
    truncated = False
    while layer and not truncated:
        nxt: dict = {}
        for state in sorted(layer):
            cost0 = layer[state][0]
            for nb, move in square_moves_seq(g, state, None, hairs=False):
                if len(nb) - 1 > max_len:
                    pruned = True
                    continue
                if nb in seen:
                    continue
                cst = cost0 + move_cost(len(state) - 1, len(nb) - 1)
                if nb not in nxt or cst < nxt[nb][0]:
                    if nb not in nxt:
                        visited += 1
                    nxt[nb] = (cst, state, move)
            if visited > max_states:
                truncated = True
                break
        depth += 1
        for s in nxt:
            maxlen_seen = max(maxlen_seen, len(s) - 1)
        seen.update(nxt)
        parents_all.update(nxt)
        if empty in nxt and not truncated:
            steps = [empty]
            moves = []
            cur = empty
            while parents_all[cur][1] is not None:
                _, parent, move = parents_all[cur]
                moves.append(move)
                steps.append(parent)
                cur = parent
            steps.reverse()
            moves.reverse()
            cost = parents_all[empty][0]
            dec = Decomposition(c, steps, moves, depth, cost, not pruned, not pruned)
            assert dec.replay()
            return DecompositionResult("decomposed", dec, visited)
        layer = nxt
    if truncated:
        return DecompositionResult("unknown_budget", visited=visited)
    if not pruned and maxlen_seen <= max_len - 4:
        return DecompositionResult("not_decomposable", visited=visited)
    return DecompositionResult("unknown_exhausted", visited=visited)


# -- graph-level decomposability ---------------------------------------------

@dataclass
class DecomposabilityReport:
    verdict: str  # "yes" | "no" | "unknown"
    certificate: str
    per_cycle: dict[str, str] = field(default_factory=dict)
    decompositions: dict[str, Decomposition] = field(default_factory=dict)


def is_square_decomposable(
    g: Graph,
    max_states: int = DEFAULT_DECOMP_STATES,
    cover_max_len: int = 12,
) -> DecomposabilityReport:
    """Whether every simple cycle decomposes into squares.

    Odd cycles give an immediate "no".  Otherwise a finite square cover
    whose class count equals |V| certifies "yes" (the cover is then
    isomorphic to the graph, so every based cycle reduces); failing that,
    cycles are decomposed one by one within budget.
    """
    if not graph_metric(g).bipartite:
        return DecomposabilityReport("no", "graph has an odd cycle")
    cs = enumerate_simple_cycles(g)
    if not cs.cycles:
        return DecomposabilityReport("yes", "no simple cycles of length >= 3")
    atlas = build_square_cover(g, max_len=cover_max_len)
    if (
        atlas.status == "ClosedFinite"
        and atlas.class_count == len(g)
        and sorted(atlas.eta) == list(range(len(g)))
        and atlas.stats.uncertain_splits == 0
    ):
        report = DecomposabilityReport(
            "yes", "square cover is isomorphic to the graph"
        )
        for c in cs.cycles:
            report.per_cycle[str(c)] = "certified-by-cover"
        return report
    report = DecomposabilityReport("", "per-cycle search")
    statuses = []
    for c in cs.cycles:
        res = square_decompose(c, max_states=max_states)
        report.per_cycle[str(c)] = res.status
        if res.decomposition is not None:
            report.decompositions[str(c)] = res.decomposition
        statuses.append(res.status)
    if any(s == "not_decomposable" for s in statuses):
        report.verdict = "no"
        report.certificate = "a simple cycle is certified non-decomposable"
    elif all(s == "decomposed" for s in statuses):
        report.verdict = "yes"
        report.certificate = "all simple cycles decomposed constructively"
    else:
        report.verdict = "unknown"
        report.certificate = "budget exhausted on some cycles"
    return report


@dataclass
class LambdaBound:
    value: int
    exact: bool
    per_cycle_cost: dict[str, int] = field(default_factory=dict)
    uncovered: int = 0


def lambda_bound(
    g: Graph,
    max_states: int = DEFAULT_DECOMP_STATES,
    decomposability: DecomposabilityReport | None = None,
) -> LambdaBound:
    """Worst-case reduction cost over simple cycles (clamped to half the
    longest cycle); lambda >= 1 by convention on cycle-free graphs."""
    if decomposability is None:
        decomposability = is_square_decomposable(g, max_states=max_states)
    if decomposability.verdict != "yes":
        raise PreconditionError("lambda is defined for square-decomposable graphs")
    cs = enumerate_simple_cycles(g)
    if not cs.cycles:
        return LambdaBound(1, True)
    value = max(c.length for c in cs.cycles) // 2
    exact = True
    out = LambdaBound(value, True)
    for c in cs.cycles:
        res = square_decompose(c, max_states=max_states)
        if res.status != "decomposed":
            out.uncovered += 1
            exact = False
            continue
        dec = res.decomposition
        out.per_cycle_cost[str(c)] = dec.cost
        value = max(value, dec.cost)
        exact = exact and dec.cost_exact
    out.value = max(value, 1)
    out.exact = exact
    return out


# -- cacti --------------------------------------------------------------------

@dataclass
class Cactus:
    """A simple cycle with sub-cacti plugged at nondecreasing positions."""

    xi: Walk
    children: list["Cactus"] = field(default_factory=list)
    chi: list[int] = field(default_factory=list)

    def validate(self):
        seq = self.xi.seq
        if seq[0] != seq[-1]:
            raise InvalidCactus("xi must be a cycle")
        interior = seq[1:-1]
        if len(set(interior)) != len(interior) or seq[0] in interior:
            raise InvalidCactus("xi must be a simple cycle")
        if len(self.children) != len(self.chi):
            raise InvalidCactus("children/chi length mismatch")
        if any(b < a for a, b in zip(self.chi, self.chi[1:])):
            raise InvalidCactus("chi must be nondecreasing")
        for child, k in zip(self.children, self.chi):
            if not 0 <= k <= self.xi.length:
                raise InvalidCactus("chi out of range")
            if child.xi.seq[0] != seq[k]:
                raise InvalidCactus("child base does not match xi at chi")
            child.validate()

    @property
    def depth(self) -> int:
        return 1 + max((ch.depth for ch in self.children), default=0)

    def levels(self) -> dict[int, list["Cactus"]]:
        out: dict[int, list] = {1: [self]}
        for ch in self.children:
            for k, cs in ch.levels().items():
                out.setdefault(k + 1, []).extend(cs)
        return out

    def to_json(self):
        return {
            "xi": list(self.xi.names()),
            "chi": list(self.chi),
            "children": [ch.to_json() for ch in self.children],
        }


def forest_depth(forest: list[Cactus]) -> int:
    return max((c.depth for c in forest), default=0)


def forest_levels(forest: list[Cactus]) -> dict[int, list[Cactus]]:
    out: dict[int, list] = {}
    for c in forest:
        for k, cs in c.levels().items():
            out.setdefault(k, []).extend(cs)
    return out


def cactus_encode_one(c: Cactus) -> tuple[int, ...]:
    word = c.xi.seq
    offset = 0
    for child, k in zip(c.children, c.chi):
        sub = cactus_encode_one(child)
        word = insert_seq(word, k + offset, sub)
        offset += len(sub) - 1
    return word


def cactus_encode(forest: list[Cactus]) -> Walk:
    """The cycle encoded by a cactus forest (validated first)."""
    if not forest:
        raise InvalidCactus("empty forest encodes nothing")
    g = forest[0].xi.graph
    base = forest[0].xi.seq[0]
    word = (base,)
    for c in forest:
        c.validate()
        if c.xi.seq[0] != base:
            raise InvalidCactus("forest members must share their basepoint")
        word = word[:-1] + cactus_encode_one(c)
    return Walk(g, word)


def cactus_decompose(c: Walk) -> list[Cactus]:
    """A cactus forest encoding the cycle, of depth at most |V|.

    Splits at returns to the basepoint, then peels first-return simple
    cycles; popped segments recurse on their own subword (which avoids
    the current basepoint), bounding the depth by the vertex count.
    """
    if not c.is_cycle():
        raise PreconditionError("cactus_decompose needs a cycle")
    forest = _forest(c.graph, c.seq)
    if forest:
        if cactus_encode(forest).seq != c.seq:
            raise InvalidCactus("decomposition does not round-trip")
    elif len(c.seq) != 1:
        raise InvalidCactus("non-empty cycle produced an empty forest")
    return forest


def _forest(g: Graph, seq) -> list[Cactus]:
    if len(seq) == 1:
        return []
    base = seq[0]
    parts = []
    last = 0
    for i in range(1, len(seq)):
        if seq[i] == base:
            parts.append(seq[last : i + 1])
            last = i
    return [_primitive(g, p) for p in parts]


def _primitive(g: Graph, e) -> Cactus:
    """Cactus for a cycle whose interior avoids its basepoint."""
    stack = [e[0]]
    start_idx = [0]
    at = {e[0]: 0}
    kids: dict[int, list[Cactus]] = {}
    for i in range(1, len(e) - 1):
        v = e[i]
        if v in at:
            k = at[v]
            sub = e[start_idx[k] : i + 1]
            # the subword spans everything since v was placed, so the
            # recursion rebuilds all children at levels >= k: replace them
            for j in range(k + 1, len(stack)):
                at.pop(stack[j], None)
                kids.pop(j, None)
            del stack[k + 1 :]
            del start_idx[k + 1 :]
            kids[k] = _forest(g, sub)
        else:
            at[v] = len(stack)
            stack.append(v)
            start_idx.append(i)
    xi = Walk(g, tuple(stack) + (e[0],))
    children: list[Cactus] = []
    chi: list[int] = []
    for k in sorted(kids):
        for ch in kids[k]:
            children.append(ch)
            chi.append(k)
    return Cactus(xi, children, chi)


def cactus_to_json(forest: list[Cactus]) -> str:
    return json.dumps([c.to_json() for c in forest], indent=2)


def cactus_from_json(g: Graph, text: str) -> list[Cactus]:
    def build(obj) -> Cactus:
        xi = Walk.from_names(g, obj["xi"])
        return Cactus(
            xi,
            [build(ch) for ch in obj["children"]],
            list(obj["chi"]),
        )

    forest = [build(o) for o in json.loads(text)]
    for c in forest:
        c.validate()
    return forest
