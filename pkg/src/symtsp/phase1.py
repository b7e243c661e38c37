"""Greedy trials that turn the cyclic shift into a cheap derangement.

A trial grows a path in the reduced matrix ``D^-1 M^-``.  From the current
end ``a`` it looks at the nearest neighbours ``c`` of ``a`` in cost order and
moves to ``b = D^-1(c)``, meaning "``a`` will be sent to ``c``".  Closing the
path back at its start gives a cycle ``s`` and the new derangement
``D o s``.  Candidates are skipped when

* ``c == D(a)`` (the arc is already in ``D``),
* ``b`` is already on the path (other than the start),
* the new arc would form a 2-cycle with an arc already present.

Only a limited number of neighbours is inspected per row, and the running
path value must stay negative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .instance import CostMatrix, NeighborRank, neighbor_rank
from .permutation import Permutation, canonical_cycle, compose, derangement_value


def trial_count(n: int, base: float = 10.0) -> int:
    """Trials per start vertex, also the neighbours inspected per row."""
    return max(1, math.ceil(math.log(n, base) - 1e-12) + 1)


def initial_derangement(n: int) -> Permutation:
    if n < 2:
        raise ValueError("need at least 2 vertices")
    return Permutation([a % n + 1 for a in range(1, n + 1)])


def gains(d: Permutation, m: CostMatrix, nr: NeighborRank):
    return {a: m.cost(a, d(a)) - m.cost(a, nr(a, 1)) for a in range(1, d.n + 1)}


def sort_candidates(d: Permutation, m: CostMatrix, nr: NeighborRank):
    """Vertices by potential gain, largest first; ties to the smaller label."""
    g = gains(d, m, nr)
    return sorted(g, key=lambda a: (-g[a], a))


@dataclass
class TrialState:
    d: Permutation
    v: int
    t: int
    width: int
    path: list = field(default_factory=list)       # reduced-matrix vertices
    sums: list = field(default_factory=list)       # running value after each arc
    target: dict = field(default_factory=dict)     # vertex -> new image


@dataclass(frozen=True)
class TrialResult:
    cycle: tuple
    value: int
    derangement: Permutation


def _arc_value(m, d, a, c):
    return m.cost(a, c) - m.cost(a, d(a))


def _forms_two_cycle(state: TrialState, a: int, c: int) -> bool:
    img = state.target.get(c)
    if img is not None:
        return img == a
    return state.d(c) == a


def _valid(d: Permutation, cyc):
    nd = compose(d, Permutation.from_cycles(d.n, [cyc]))
    for a in range(1, d.n + 1):
        x = nd(a)
        if x == a or nd(x) == a:
            return None
    return nd


def run_trial(state: TrialState, m: CostMatrix, nr: NeighborRank, trace=None):
    """Grow one path and return the cheapest valid closing cycle, or None."""
    d, v = state.d, state.v
    dinv = d.inverse()
    n = d.n

    def emit(decision, a, c, value=None):
        if trace is not None:
            trace({"phase": 1, "vertex": v, "trial": state.t, "path": list(state.path),
                   "arc": [a, c], "decision": decision, "running": value})

    c0 = nr(v, state.t)
    if c0 == d(v) or _forms_two_cycle(state, v, c0):
        emit("arc" if c0 == d(v) else "not-allowed", v, c0)
        return None
    state.path = [v]
    state.sums = []
    state.target = {v: c0}
    run = _arc_value(m, d, v, c0)
    state.sums.append(run)
    b = dinv(c0)
    emit("accept", v, c0, run)
    closed = b == v
    while not closed and len(state.path) < n:
        a = b
        state.path.append(a)
        nxt = None
        for rank in range(1, min(state.width, n - 1) + 1):
            c = nr(a, rank)
            if c == d(a):
                emit("arc", a, c)
                continue
            cb = dinv(c)
            if cb != v and cb in state.path:
                emit("repeat", a, c)
                continue
            if _forms_two_cycle(state, a, c):
                emit("not-allowed", a, c)
                continue
            val = run + _arc_value(m, d, a, c)
            if val >= 0:
                emit("positive", a, c, val)
                break
            nxt = (c, cb, val)
            break
        if nxt is None:
            break
        c, b, run = nxt
        state.target[a] = c
        state.sums.append(run)
        emit("close" if b == v else "accept", a, c, run)
        closed = b == v

    best = None
    # every prefix ending at u can be closed by sending u to D(v)
    for u_idx in range(1, len(state.path)):
        u = state.path[u_idx]
        if closed and u_idx == len(state.path) - 1:
            value = state.sums[-1]
        elif d(v) == u:
            continue
        else:
            value = state.sums[u_idx - 1] + _arc_value(m, d, u, d(v))
        cyc = tuple(state.path[: u_idx + 1])
        nd = _valid(d, cyc)
        if nd is None:
            continue
        if best is None or value < best.value:
            best = TrialResult(cyc, value, nd)
    if best is not None and trace is not None:
        trace({"phase": 1, "vertex": v, "trial": state.t, "decision": "best",
               "cycle": list(best.cycle), "value": best.value})
    return best


def best_trial(d: Permutation, v: int, m: CostMatrix, nr: NeighborRank, trials: int | None = None,
               trace=None):
    trials = trials or trial_count(d.n)
    best = None
    for t in range(1, min(trials, d.n - 1) + 1):
        res = run_trial(TrialState(d, v, t, trials), m, nr, trace)
        if res is not None and (best is None or res.value < best.value):
            best = res
    return best


def phase1_run(m: CostMatrix, nr: NeighborRank | None = None, trials: int | None = None,
               start: Permutation | None = None, trace=None, history=None):
    """Apply the best negative trial cycle, re-rank, repeat until no vertex improves."""
    nr = nr or neighbor_rank(m)
    d = start or initial_derangement(m.n)
    value = derangement_value(d, m)
    while True:
        applied = False
        for v in sort_candidates(d, m, nr):
            res = best_trial(d, v, m, nr, trials, trace)
            if res is None or res.value >= 0:
                continue
            new_value = derangement_value(res.derangement, m)
            if new_value - value != res.value:
                raise AssertionError("trial value disagrees with derangement bookkeeping")
            if history is not None:
                history.append({"vertex": v, "cycle": list(canonical_cycle(res.cycle)),
                                "value": res.value, "before": value, "after": new_value})
            d, value = res.derangement, new_value
            applied = True
            break
        if not applied:
            return d
