"""Modified Floyd-Warshall search for matching-improving cycles.

Paths live in a reduced matrix built on a perfect matching ``sigma``.  Each
path belongs to one class, judged by how many matched pairs contribute both
of their points:

* ``acceptable`` - none; the cycle swaps matched edges for new ones.
* ``unlinked2`` - exactly one; the cycle's edges form two vertex-disjoint
  circuits.
* ``linked2`` - exactly two, and their points alternate along the path; the
  cycle's edges form one circuit that splits into two at a shared edge.

Anything else is rejected.  The table keeps a separate best path per class
for every ordered pair of vertices, so a path of a stronger class is never
displaced by a cheaper one of a weaker class.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .instance import CostMatrix
from .permutation import Permutation, PerfectMatching, canonical_cycle, compose
from .reduced import ReducedMatrix, WeightedCycle, build_reduced, determining_vertex

ACCEPTABLE = "acceptable"
UNLINKED = "unlinked2"
LINKED = "linked2"
CLASSES = (ACCEPTABLE, UNLINKED, LINKED)

UNSET = _backend.UNSET


# -- classification -----------------------------------------------------------

def _doubled_positions(seq, sigma):
    first = {}
    doubled = {}
    for idx, v in enumerate(seq):
        key = min(v, sigma(v))
        if key in first:
            doubled[key] = (first[key], idx)
        else:
            first[key] = idx
    return doubled


def _classify_seq(seq, sigma):
    if len(set(seq)) != len(seq):
        return None
    doubled = _doubled_positions(seq, sigma)
    if not doubled:
        return ACCEPTABLE
    if len(doubled) == 1:
        return UNLINKED
    if len(doubled) == 2:
        (a1, a2), (b1, b2) = doubled.values()
        if a1 < b1 < a2 < b2 or b1 < a1 < b2 < a2:
            return LINKED
    return None


def classify_extension(path, nxt, sigma: PerfectMatching):
    """Class of ``path + [nxt]``, or None when the extension is inadmissible.

    When ``nxt`` equals the first vertex the result classifies the closed cycle.
    """
    path = list(path)
    if not path:
        raise ValueError("path must be non-empty")
    if nxt == path[0]:
        return classify_cycle(path, sigma)
    if nxt in path:
        return None
    return _classify_seq(path + [nxt], sigma)


def classify_cycle(cyc, sigma: PerfectMatching):
    """Class of a closed cycle; interlacing is invariant under rotation."""
    cyc = list(cyc)
    if len(cyc) < 2:
        return None
    return _classify_seq(cyc, sigma)


# -- records ------------------------------------------------------------------

@dataclass(frozen=True)
class CycleRecord:
    vertices: tuple
    cls: str
    value: int
    linking: tuple      # matched pairs (smaller point) contributing one point
    doubled: tuple      # matched pairs contributing both points
    determining: int | None = None

    @property
    def p(self) -> int:
        return len(self.vertices)

    @property
    def lp(self) -> int:
        return len(self.linking)

    @property
    def covered(self) -> tuple:
        return tuple(sorted(self.linking + self.doubled))

    def new_edges(self, sigma: Permutation):
        c = self.vertices
        return [(a, sigma(c[(i + 1) % len(c)])) for i, a in enumerate(c)]

    def signature(self, sigma: Permutation):
        """Edge multiset the cycle adds; a cycle and its companion share it."""
        return tuple(sorted(tuple(sorted(e)) for e in self.new_edges(sigma)))

    def __str__(self):
        return "(" + " ".join(map(str, self.vertices)) + f"): {self.value} [{self.cls}]"


def companion(cyc, sigma: Permutation) -> tuple:
    """The cycle adding the same edges as ``cyc`` (its image under reversal)."""
    a = tuple(cyc)
    m = len(a)
    out = [sigma(a[1]), sigma(a[0])] + [sigma(a[i]) for i in range(m - 1, 1, -1)]
    return canonical_cycle(out)


def representative(cyc, sigma: Permutation) -> tuple:
    """Fixed choice between a cycle and its companion: the larger canonical tuple."""
    return max(canonical_cycle(cyc), companion(cyc, sigma))


def make_record(r: ReducedMatrix, sigma: PerfectMatching, cyc, bound: int | None = None) -> CycleRecord:
    cyc = canonical_cycle(cyc)
    cls = classify_cycle(cyc, sigma)
    if cls is None:
        raise ValueError(f"cycle {cyc} is not admissible for {sigma}")
    wc = WeightedCycle.from_reduced(r, cyc)
    value = wc.total
    counts = {}
    for v in cyc:
        key = min(v, sigma(v))
        counts[key] = counts.get(key, 0) + 1
    linking = tuple(sorted(k for k, c in counts.items() if c == 1))
    doubled = tuple(sorted(k for k, c in counts.items() if c == 2))
    det = determining_vertex(wc, max(value, 0) if bound is None else max(bound, value))
    return CycleRecord(cyc, cls, value, linking, doubled, det)


# -- path table ---------------------------------------------------------------

class PathTable:
    """The ``width`` best paths per class for every ordered vertex pair.

    Storage is 0-based.  Slot ``s`` holds the ``s % width``-th best path of
    class ``s // width``; ``paths[s, i, k, :plen[s, i, k]]`` is its vertex
    sequence and ``via[s, i, k]`` the pivot that produced it (-1 for an arc).
    """

    def __init__(self, r: ReducedMatrix, sigma: PerfectMatching | None = None,
                 nclasses: int = 3, path_bound: int | None = None, width: int = 1):
        n = r.n
        self.n = n
        self.r = r
        self.sigma = sigma
        self.paired = sigma is not None
        self.nclasses = nclasses if self.paired else 1
        self.width = int(width)
        C = self.nclasses * self.width
        self.path_bound = int(path_bound) if path_bound is not None else int(UNSET) - 1
        self.arc = np.where(r.forbidden, UNSET, r.values).astype(np.int64)
        np.fill_diagonal(self.arc, UNSET)
        self.val = np.full((C, n, n), UNSET, dtype=np.int64)
        self.via = np.full((C, n, n), -1, dtype=np.int32)
        self.plen = np.zeros((C, n, n), dtype=np.int32)
        self.paths = np.zeros((C, n, n, n), dtype=np.int32)
        if self.paired:
            pairs = sigma.pairs()
            self.bit = np.zeros(n, dtype=np.int64)
            self.pair_of = np.zeros(n, dtype=np.int32)
            for q, (a, b) in enumerate(pairs):
                self.bit[a - 1], self.bit[b - 1] = 2 * q, 2 * q + 1
                self.pair_of[a - 1] = self.pair_of[b - 1] = q
        else:
            self.bit = np.arange(n, dtype=np.int64)
            self.pair_of = np.arange(n, dtype=np.int32)
        for i in range(n):
            for k in range(n):
                x = self.arc[i, k]
                if x < UNSET and x <= self.path_bound:
                    self.val[0, i, k] = x
                    self.plen[0, i, k] = 2
                    self.paths[0, i, k, 0] = i
                    self.paths[0, i, k, 1] = k

    def value(self, i: int, k: int, cls: str = ACCEPTABLE):
        c = CLASSES.index(cls) * self.width
        x = self.val[c, i - 1, k - 1]
        return None if x >= UNSET else int(x)

    def best(self, i: int, k: int):
        """Cheapest ``(value, class)`` over all classes, or None."""
        out = None
        for c in range(self.nclasses):
            x = self.val[c * self.width, i - 1, k - 1]
            if x < UNSET and (out is None or x < out[0]):
                out = (int(x), CLASSES[c])
        return out

    def reconstruct(self, i: int, k: int, cls: str = ACCEPTABLE, rank: int = 0):
        c = CLASSES.index(cls) * self.width + rank
        ln = self.plen[c, i - 1, k - 1]
        if not ln:
            return None
        return tuple(int(v) + 1 for v in self.paths[c, i - 1, k - 1, :ln])

    def backtrack(self, i: int, k: int, cls: str = ACCEPTABLE):
        """Pivot chain recorded for a cell, read from the ``via`` table."""
        c = CLASSES.index(cls) * self.width
        out = []
        j = self.via[c, i - 1, k - 1]
        while j >= 0 and len(out) < self.n:
            out.append(int(j) + 1)
            j = self.via[c, i - 1, j]
        return out

    def cells(self):
        """Yield ``(i, k, class, value, path)`` for every stored path."""
        for c in range(self.nclasses * self.width):
            for i, k in zip(*np.nonzero(self.plen[c])):
                yield (int(i) + 1, int(k) + 1, CLASSES[c // self.width], int(self.val[c, i, k]),
                       tuple(int(v) + 1 for v in self.paths[c, i, k, : self.plen[c, i, k]]))

    def snapshot(self):
        """Values of the cheapest path in each cell; None where empty."""
        best = self.val.min(axis=0)
        return [[None if x >= UNSET else int(x) for x in row] for row in best]


def triangle_update(table: PathTable, pivots, cycle_bound: int | None = None):
    """Apply triangle operations through each 1-based pivot in turn.

    Returns ``(changed, closures)`` with closures as ``(class, value, cycle)``.
    """
    piv = np.array([int(j) - 1 for j in ([pivots] if np.isscalar(pivots) else pivots)], dtype=np.int32)
    record = cycle_bound is not None
    cb = int(cycle_bound) if record else 0
    changed, raw = _backend.fw_sweep(
        table.val, table.via, table.plen, table.paths, table.arc, table.bit, table.pair_of,
        table.paired, table.nclasses, table.width, table.path_bound, cb, record, piv)
    closures = [(CLASSES[c], int(v), tuple(int(x) + 1 for x in seq)) for c, v, seq in raw]
    return changed, closures


# -- harvesting ----------------------------------------------------------------

@dataclass
class Harvest:
    cycles: list
    passes_run: int
    pass_counts: list = field(default_factory=list)
    table: PathTable | None = None


def harvest_cycles(r: ReducedMatrix, sigma: PerfectMatching, value_bound: int, passes: int = 8,
                   linked: bool = True, path_bound: int | None = None, width: int = 4,
                   keep_table: bool = False):
    """Collect admissible cycles of value <= ``value_bound`` from repeated sweeps.

    A cycle and its companion add the same edges, so only one of the two is
    kept, chosen by :func:`representative`.  Sweeping stops early once a pass changes no
    cell.  Cycles come back sorted by value, then by point count descending.
    """
    table = PathTable(r, sigma, 3 if linked else 2, path_bound, width)
    seen = {}
    reps = set()
    counts = []
    done = 0
    for i in range(1, r.n + 1):
        for k in range(i + 1, r.n + 1):
            if r.allowed(i, k) and r.allowed(k, i):
                if r.entry(i, k) + r.entry(k, i) <= value_bound:
                    rec = make_record(r, sigma, representative((i, k), sigma), value_bound)
                    seen.setdefault(rec.signature(sigma), rec)
    for _ in range(passes):
        changed, closures = triangle_update(table, range(1, r.n + 1), value_bound)
        done += 1
        for cls, value, cyc in closures:
            rep = representative(cyc, sigma)
            if rep in reps:
                continue
            reps.add(rep)
            rec = make_record(r, sigma, rep, value_bound)
            seen.setdefault(rec.signature(sigma), rec)
        counts.append(len(seen))
        if not changed:
            break
    cycles = sorted(seen.values(), key=lambda c: (c.value, -c.p, c.vertices))
    return Harvest(cycles, done, counts, table if keep_table else None)


# -- circuits -----------------------------------------------------------------

@dataclass(frozen=True)
class EdgeCircuit:
    """Closed walk of edges; ``value`` is in reduced units (sums on linking)."""

    vertices: tuple
    value: int = 0

    def __post_init__(self):
        if len(self.vertices) < 2:
            raise ValueError("a circuit needs at least 2 vertices")

    @property
    def edges(self):
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def edge_keys(self):
        return [frozenset(e) for e in self.edges]

    def __len__(self):
        return len(self.vertices)


def cycle_edge_graph(c: CycleRecord, sigma: PerfectMatching):
    """Edges a cycle leaves behind: its new edges plus the matched edges of its linking pairs."""
    edges = [tuple(e) for e in c.new_edges(sigma)]
    edges += [(q, sigma(q)) for q in c.linking]
    return edges


def _walk_components(edges):
    """Split a 2-regular edge multiset into closed walks (vertex sequences)."""
    inc = {}
    for eid, (a, b) in enumerate(edges):
        inc.setdefault(a, []).append(eid)
        inc.setdefault(b, []).append(eid)
    if any(len(v) != 2 for v in inc.values()):
        raise ValueError("edge set is not 2-regular")
    used = [False] * len(edges)
    comps = []
    for start in sorted(inc):
        eid = next((e for e in inc[start] if not used[e]), None)
        if eid is None:
            continue
        walk = [start]
        cur = start
        while True:
            used[eid] = True
            a, b = edges[eid]
            cur = b if a == cur else a
            if cur == start:
                break
            walk.append(cur)
            eid = next(e for e in inc[cur] if not used[e])
        comps.append(tuple(walk))
    return comps


def _circuit_value(verts, sigma, m: CostMatrix):
    w = m.w
    total = 0
    for i, a in enumerate(verts):
        b = verts[(i + 1) % len(verts)]
        x = int(w[a - 1, b - 1])
        total += -x if sigma(a) == b else x
    return total


def split_two_circuit(c: CycleRecord, sigma: PerfectMatching, m: CostMatrix):
    """Two odd circuits from a 2-circuit cycle.

    An unlinked cycle already leaves two vertex-disjoint circuits.  A linked
    cycle leaves one circuit; it is cut at the points of a doubled pair and
    both halves are closed with that pair's matched edge, so the halves share
    exactly that edge.  The doubled pair met second along the cycle is used.
    """
    if c.cls == ACCEPTABLE:
        raise ValueError("acceptable cycles yield a single circuit")
    comps = _walk_components(cycle_edge_graph(c, sigma))
    if c.cls == UNLINKED:
        if len(comps) != 2:
            raise ValueError(f"unlinked cycle {c.vertices} left {len(comps)} circuits")
        return tuple(EdgeCircuit(v, _circuit_value(v, sigma, m)) for v in comps)
    if len(comps) != 1:
        raise ValueError(f"linked cycle {c.vertices} left {len(comps)} circuits")
    ring = comps[0]
    pos = {v: i for i, v in enumerate(c.vertices)}
    order = sorted(c.doubled, key=lambda q: min(pos[q], pos[sigma(q)]))
    q = order[1]
    x, y = q, sigma(q)
    i, j = sorted((ring.index(x), ring.index(y)))
    first = ring[i: j + 1]
    second = ring[j:] + ring[: i + 1]
    out = []
    for half in (first, second):
        out.append(EdgeCircuit(tuple(half), _circuit_value(half, sigma, m)))
    return tuple(out)


# -- phase 2 ------------------------------------------------------------------

def symmetric_arcs(d: Permutation):
    """Reduced-matrix cells that would use the reverse of an arc of ``d``."""
    out = []
    for b in range(1, d.n + 1):
        a = d(d(b))
        if a != b:
            out.append((a, b))
    return out


def _valid_successor(d: Permutation, cyc):
    s = Permutation.from_cycles(d.n, [cyc])
    nd = compose(d, s)
    if not nd.is_derangement():
        return None
    for a in range(1, d.n + 1):
        if nd(nd(a)) == a and d(d(a)) != a:
            return None
    return nd


def phase2_improve(d: Permutation, m: CostMatrix, passes: int = 8, trace=None):
    """Apply negative cycles of ``D^-1 M^-`` (symmetric arcs removed) until none remain."""
    from .permutation import derangement_value

    cur = d
    while True:
        r = build_reduced(m, cur, symmetric_arcs(cur))
        table = PathTable(r, None, 1)
        best = None
        for _ in range(passes):
            changed, closures = triangle_update(table, range(1, r.n + 1), -1)
            for _cls, value, cyc in closures:
                if best is None or value < best[0]:
                    nd = _valid_successor(cur, cyc)
                    if nd is not None:
                        best = (value, canonical_cycle(cyc), nd)
            if not changed:
                break
        if best is None:
            return cur
        value, cyc, nd = best
        before = derangement_value(cur, m)
        if trace is not None:
            trace({"phase": 2, "cycle": list(cyc), "value": value,
                   "before": before, "after": before + value})
        cur = nd
