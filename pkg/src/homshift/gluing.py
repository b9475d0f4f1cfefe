"""Patterns on the grid, admissibility, block-like completion, reflective
extension, and constructive gluing of two block patterns.

Coordinate convention: x grows right, y grows up.  Text grids are
row-major top-down, ``.`` marks absent cells.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from .errors import (
    FoldImpossible,
    GluingFailed,
    ParseError,
    PreconditionError,
    ShapeError,
)
from .graphs import Graph, Walk, graph_metric
from .walkspace import (
    DEFAULT_STATE_BUDGET,
    WitnessPath,
    seq_adjacent,
    seq_neighbors,
    verify_witness_detailed,
)


@dataclass
class Pattern:
    """A finite partial map from grid coordinates to vertex ids."""

    graph: Graph
    cells: dict[tuple[int, int], int] = field(default_factory=dict)

    def copy(self) -> "Pattern":
        return Pattern(self.graph, dict(self.cells))

    def bounds(self):
        if not self.cells:
            return None
        xs = [x for x, _ in self.cells]
        ys = [y for _, y in self.cells]
        return min(xs), max(xs), min(ys), max(ys)

    def is_rectangle(self) -> bool:
        b = self.bounds()
        if b is None:
            return True
        x0, x1, y0, y1 = b
        return len(self.cells) == (x1 - x0 + 1) * (y1 - y0 + 1)

    def to_text(self) -> str:
        b = self.bounds()
        if b is None:
            return ""
        x0, x1, y0, y1 = b
        lines = []
        for y in range(y1, y0 - 1, -1):
            row = []
            for x in range(x0, x1 + 1):
                v = self.cells.get((x, y))
                row.append("." if v is None else self.graph.vertices[v])
            lines.append(" ".join(row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        sup = sorted(self.cells)
        return json.dumps(
            {"support": [[x, y, self.graph.vertices[v]] for (x, y), v in
                         ((c, self.cells[c]) for c in sup)]}
        )

    @classmethod
    def from_text(cls, g: Graph, text: str, origin=(0, 0)) -> "Pattern":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows:
            return cls(g)
        cells = {}
        height = len(rows)
        ox, oy = origin
        for i, row in enumerate(rows):
            y = oy + height - 1 - i
            for x, tok in enumerate(row):
                if tok == ".":
                    continue
                cells[(ox + x, y)] = g.id_of(tok)
        return cls(g, cells)

    @classmethod
    def from_json(cls, g: Graph, text: str) -> "Pattern":
        obj = json.loads(text)
        cells = {}
        for x, y, name in obj["support"]:
            cells[(int(x), int(y))] = g.id_of(name)
        return cls(g, cells)

    @classmethod
    def block(cls, g: Graph, rows: list[list[str]], at=(0, 0)) -> "Pattern":
        """Square/rectangular block from rows listed top-down."""
        cells = {}
        h = len(rows)
        for i, row in enumerate(rows):
            for j, name in enumerate(row):
                cells[(at[0] + j, at[1] + h - 1 - i)] = g.id_of(name)
        return cls(g, cells)


def is_locally_admissible(p: Pattern) -> bool:
    g = p.graph
    for (x, y), v in p.cells.items():
        for nb in ((x + 1, y), (x, y + 1)):
            w = p.cells.get(nb)
            if w is not None and w not in g.adj_sets[v]:
                return False
    return True


def _support_connected(cells) -> bool:
    if not cells:
        return True
    start = next(iter(cells))
    seen = {start}
    dq = deque([start])
    while dq:
        x, y = dq.popleft()
        for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if nb in cells and nb not in seen:
                seen.add(nb)
                dq.append(nb)
    return len(seen) == len(cells)


def is_blocklike(cells) -> bool:
    """Connected, and every row/column intersection is an interval."""
    if not cells:
        return True
    if not _support_connected(cells):
        return False
    rows: dict[int, list[int]] = {}
    cols: dict[int, list[int]] = {}
    for x, y in cells:
        rows.setdefault(y, []).append(x)
        cols.setdefault(x, []).append(y)
    for vals in list(rows.values()) + list(cols.values()):
        vals.sort()
        if vals[-1] - vals[0] + 1 != len(vals):
            return False
    return True


def complete_blocklike(p: Pattern) -> Pattern:
    """Extend an admissible block-like pattern to its bounding rectangle.

    Repeatedly fills the corner cell outside the support that has exactly
    two filled neighbours, copying the value of their common diagonal
    neighbour; this is admissible because that value is adjacent to both.
    """
    if not is_blocklike(p.cells):
        raise ShapeError("support is not block-like")
    if not is_locally_admissible(p):
        raise PreconditionError("pattern is not locally admissible")
    out = p.copy()
    b = out.bounds()
    if b is None:
        return out
    x0, x1, y0, y1 = b
    while True:
        candidates = []
        for x in range(x0, x1 + 1):
            for y in range(y0, y1 + 1):
                if (x, y) in out.cells:
                    continue
                horiz = [d for d in (-1, 1) if (x + d, y) in out.cells]
                vert = [d for d in (-1, 1) if (x, y + d) in out.cells]
                if len(horiz) + len(vert) == 2 and horiz and vert:
                    candidates.append((x, y, horiz[0], vert[0]))
        if not candidates:
            break
        x, y, dx, dy = min(candidates)
        w = out.cells.get((x + dx, y + dy))
        if w is None:
            raise ShapeError("support is not block-like (no diagonal witness)")
        out.cells[(x, y)] = w
    if not out.is_rectangle():
        raise ShapeError("completion did not reach a rectangle")
    if not is_locally_admissible(out):
        raise PreconditionError("completion produced an inadmissible pattern")
    return out


def _fold(z: int, b: int) -> int:
    if b == 0:
        return 0
    r = z % (2 * b)
    return r if r <= b else 2 * b - r


def extend_by_folding(p: Pattern, window) -> Pattern:
    """Values on ``window`` by reflecting coordinates into p's rectangle.

    The fold is a graph morphism of the grid line onto a path, so the
    output stays admissible whenever the rectangle is non-degenerate; a
    degenerate direction needs a self-loop to fold onto.
    """
    if not p.is_rectangle() or not p.cells:
        raise ShapeError("extend_by_folding needs a full rectangle")
    if not is_locally_admissible(p):
        raise PreconditionError("pattern is not locally admissible")
    x0, x1, y0, y1 = p.bounds()
    w, h = x1 - x0, y1 - y0
    out = Pattern(p.graph)
    for x, y in window:
        out.cells[(x, y)] = p.cells[
            (x0 + _fold(x - x0, w), y0 + _fold(y - y0, h))
        ]
    if not is_locally_admissible(out):
        raise FoldImpossible(
            "degenerate rectangle cannot fold (missing self-loop)"
        )
    return out


def rect(x0, x1, y0, y1):
    return [(x, y) for x in range(x0, x1 + 1) for y in range(y0, y1 + 1)]


# -- exact-length connections ---------------------------------------------------

def connect_columns(
    p: Walk, q: Walk, k: int, cap: int = DEFAULT_STATE_BUDGET
) -> WitnessPath | None:
    """An adjacency path of length exactly k from p to q, or None when
    parity forbids one.  Searches the parity double cover of the walk
    graph; shorter connections pad with a back-and-forth at q.
    """
    if p.graph is not q.graph or p.length != q.length:
        raise PreconditionError("columns must be walks of equal length")
    g = p.graph
    start = (p.seq, 0)
    target = (q.seq, k % 2)
    parent: dict = {start: None}
    dq = deque([start])
    found = target in parent
    while dq and not found:
        cur = dq.popleft()
        seq, par = cur
        for nb in seq_neighbors(g, seq):
            nxt = (nb, 1 - par)
            if nxt not in parent:
                parent[nxt] = cur
                if nxt == target:
                    found = True
                    break
                dq.append(nxt)
        if len(parent) > cap:
            raise GluingFailed("state budget exhausted while connecting columns")
    if target not in parent:
        return None  # parity obstruction (certified: double cover exhausted)
    chain = []
    cur = target
    while cur is not None:
        chain.append(cur[0])
        cur = parent[cur]
    chain.reverse()
    if len(chain) - 1 > k:
        return None  # shortest walk of this parity is longer than k
    # pad with a back-and-forth at q
    mate = next(iter(seq_neighbors(g, q.seq)))
    while len(chain) - 1 < k:
        chain.extend([mate, q.seq])
    path = WitnessPath("delta", [Walk(g, s) for s in chain])
    ok, i, why = verify_witness_detailed(path)
    if not ok or len(path) != k:
        raise GluingFailed(f"connection failed verification at {i}: {why}")
    return path


# -- gluing ---------------------------------------------------------------------

@dataclass
class GlueResult:
    window: Pattern
    phase_shift: tuple[int, int]
    strip_length: int
    placements: tuple[tuple[int, int], tuple[int, int]]


class _Frame:
    """Axis swap + reflections mapping the input frame to the normal one."""

    def __init__(self, swap=False, sx=1, sy=1):
        self.swap, self.sx, self.sy = swap, sx, sy

    def fwd(self, xy):
        x, y = xy
        if self.swap:
            x, y = y, x
        return (self.sx * x, self.sy * y)

    def inv(self, xy):
        x, y = xy
        x, y = self.sx * x, self.sy * y
        if self.swap:
            x, y = y, x
        return (x, y)


def _pattern_size(p: Pattern) -> int:
    b = p.bounds()
    if b is None:
        raise PreconditionError("empty pattern")
    x0, x1, y0, y1 = b
    if x1 - x0 != y1 - y0 or not p.is_rectangle():
        raise PreconditionError("glue expects square block patterns")
    return x1 - x0 + 1


def glue(
    p: Pattern,
    q: Pattern,
    u: tuple[int, int],
    uq: tuple[int, int],
    cap: int = DEFAULT_STATE_BUDGET,
) -> GlueResult:
    """Place p at u and q at uq (up to a phase shift of one column) inside
    one admissible window.

    Builds a configuration around p by reflective extension, connects the
    facing columns by a walk of the exact gap length in the walk graph,
    and completes the union to its bounding rectangle.  On bipartite
    graphs a parity obstruction shifts q one column outward.
    """
    g = p.graph
    n = _pattern_size(p)
    if _pattern_size(q) != n:
        raise PreconditionError("blocks must have the same size")
    if not (is_locally_admissible(p) and is_locally_admissible(q)):
        raise PreconditionError("blocks must be locally admissible")

    # normalise: q to the upper right of p, horizontal gap dominant
    du = (uq[0] - u[0], uq[1] - u[1])
    frame = _Frame(swap=abs(du[1]) > abs(du[0]))
    d1 = frame.fwd(du)
    frame.sx = -1 if d1[0] < 0 else 1
    frame.sy = -1 if d1[1] < 0 else 1
    d = frame.fwd(du)

    if d[0] - n + 1 < 1:
        raise GluingFailed("blocks overlap; no strip to build")

    pn = Pattern(g, {frame.fwd(cxy): v for cxy, v in _at(p, u).cells.items()})
    qn = Pattern(g, {frame.fwd(cxy): v for cxy, v in _at(q, uq).cells.items()})
    # normalised placements are the lower-left corners of the mapped cells
    ub = pn.bounds()
    qb = qn.bounds()
    un = (ub[0], ub[2])
    qn_at = (qb[0], qb[2])

    for shift in (0, 1):
        res = _glue_normalised(g, pn, qn, un, qn_at, n, shift, cap)
        if res is not None:
            window_n, k_used = res
            back = Pattern(
                g, {frame.inv(cxy): v for cxy, v in window_n.cells.items()}
            )
            v_norm = (shift, 0)
            v = frame.inv(v_norm)
            out = GlueResult(
                window=complete_blocklike(back),
                phase_shift=v,
                strip_length=k_used,
                placements=(u, (uq[0] + v[0], uq[1] + v[1])),
            )
            _check_embedded(out.window, _at(p, u))
            _check_embedded(out.window, _at(q, out.placements[1]))
            if not is_locally_admissible(out.window):
                raise GluingFailed("assembled window is not admissible")
            return out
    raise GluingFailed("no connecting strip of the required parity")


def _at(p: Pattern, at) -> Pattern:
    b = p.bounds()
    return Pattern(
        p.graph,
        {(x - b[0] + at[0], y - b[2] + at[1]): v for (x, y), v in p.cells.items()},
    )


def _check_embedded(window: Pattern, block: Pattern):
    for cxy, v in block.cells.items():
        if window.cells.get(cxy) != v:
            raise GluingFailed(f"window does not contain the block at {cxy}")


def _glue_normalised(g, pn, qn, un, qn_at, n, shift, cap):
    """One attempt at the normalised gluing with q shifted right by ``shift``."""
    qx = qn_at[0] + shift
    qy = qn_at[1]
    k = qx - un[0] - n + 1  # walk length = separation of the two squares
    if k < 1:
        return None
    q_shift = Pattern(g, {(x + shift, y): v for (x, y), v in qn.cells.items()})

    # extend p upward to the height of q (reflective folding)
    top = max(qy + n - 1, un[1] + n - 1)
    tower_support = rect(un[0], un[0] + n - 1, un[1], top)
    if n >= 2:
        tower = extend_by_folding(pn, tower_support)
    else:
        tower = _spine_tower(g, pn, un, top)

    col_a = Walk(g, tuple(tower.cells[(un[0] + n - 1, y)] for y in range(qy, qy + n)))
    col_b = Walk(g, tuple(q_shift.cells[(qx, y)] for y in range(qy, qy + n)))
    path = connect_columns(col_a, col_b, k, cap=cap)
    if path is None:
        return None

    window = Pattern(g, dict(tower.cells))
    for i, step in enumerate(path.steps):
        x = un[0] + n - 1 + i
        for j, v in enumerate(step.seq):
            cxy = (x, qy + j)
            if cxy in window.cells and window.cells[cxy] != v:
                raise GluingFailed(f"strip conflicts with the tower at {cxy}")
            window.cells[cxy] = v
    for cxy, v in q_shift.cells.items():
        if cxy in window.cells and window.cells[cxy] != v:
            raise GluingFailed(f"q conflicts with the strip at {cxy}")
        window.cells[cxy] = v
    if not is_blocklike(window.cells):
        raise GluingFailed("assembled support is not block-like")
    return window, k


def _spine_tower(g, pn, un, top):
    """Extend a single-cell pattern upward by alternating with a neighbour."""
    x, y0 = un
    v = pn.cells[(x, y0)]
    w = min(g.adj[v])
    out = Pattern(g, dict(pn.cells))
    for y in range(y0 + 1, top + 1):
        out.cells[(x, y)] = v if (y - y0) % 2 == 0 else w
    return out
