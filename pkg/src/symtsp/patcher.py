"""From cycles to tours: circuits, linking, the branch search and the solver loop.

A cycle ``C`` on a perfect matching ``sigma`` contributes the edges
``{a, sigma(next(a))}`` for each of its points.  A set of cycles that touches
every matched pair once or twice determines a 2-regular edge set: pairs hit
once keep their matched edge, pairs hit twice lose it.  When that edge set is
a single circuit it is a tour worth ``pm_value(sigma) + sum(values)``.

The search accepts a set as a tour only when the point count obeys
``p = n/2 + 3t + a - 1`` (``t`` 2-circuit cycles, ``a`` acceptable ones),
which is the condition for the circuits to patch together as a tree.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .fwcycles import (ACCEPTABLE, CycleRecord, EdgeCircuit, _circuit_value, _walk_components,
                       harvest_cycles, phase2_improve, split_two_circuit)
from .instance import CostMatrix, InstanceError, neighbor_rank, pad_odd, validate_symmetry
from .permutation import (Permutation, PerfectMatching, Tour, derangement_value, pm_from_tour,
                          pm_value, tour_value)
from .phase1 import phase1_run
from .reduced import build_reduced

TOUR = "tour"
DERANGEMENT = "derangement"
INFEASIBLE = "infeasible"


# -- circuits -------------------------------------------------------------------

def circuit_from_cycle(c: CycleRecord, sigma: PerfectMatching, m: CostMatrix):
    """Edge circuits left by one cycle: one for acceptable cycles, two otherwise."""
    if c.cls != ACCEPTABLE:
        return split_two_circuit(c, sigma, m)
    a = c.vertices
    k = len(a)
    verts = []
    for i in range(k):
        verts.append(a[i])
        verts.append(sigma(a[(i + 1) % k]))
    return (EdgeCircuit(tuple(verts), _circuit_value(verts, sigma, m)),)


def shared_edges(x: EdgeCircuit, y: EdgeCircuit):
    ys = set(y.edge_keys())
    return [e for e in x.edge_keys() if e in ys]


def _path_without(verts, p, q):
    """Walk a circuit from ``q`` to ``p`` without using the edge ``{p, q}``."""
    k = len(verts)
    iq = verts.index(q)
    step = 1 if verts[(iq - 1) % k] == p else -1
    return [verts[(iq + step * s) % k] for s in range(k)]


def link_circuits(x: EdgeCircuit, y: EdgeCircuit) -> EdgeCircuit:
    """Delete the single edge ``x`` and ``y`` share and splice them into one circuit."""
    common = shared_edges(x, y)
    if not common:
        raise ValueError("circuits share no edge")
    if len(common) > 1:
        raise ValueError(f"circuits share {len(common)} edges; exactly one is required")
    p, q = sorted(common[0])
    first = _path_without(list(x.vertices), p, q)     # q ... p
    second = _path_without(list(y.vertices), q, p)    # p ... q
    verts = first + second[1:-1]
    return EdgeCircuit(tuple(verts), x.value + y.value)


def patch_circuits(circuits):
    """Link circuits pairwise while some pair shares exactly one edge."""
    work = list(circuits)
    while len(work) > 1:
        for i in range(len(work)):
            hit = None
            for j in range(i + 1, len(work)):
                if len(shared_edges(work[i], work[j])) == 1:
                    hit = j
                    break
            if hit is not None:
                merged = link_circuits(work[i], work[hit])
                work = work[:i] + [merged] + work[i + 1: hit] + work[hit + 1:]
                break
        else:
            break
    return work


def tree_edge_count(n: int, r: int) -> int:
    return n + 2 * r - 2


# -- branches -------------------------------------------------------------------

@dataclass
class PatchBranch:
    members: list = field(default_factory=list)
    mult: dict = field(default_factory=dict)     # matched pair (smaller point) -> points
    t: int = 0
    a: int = 0
    p: int = 0
    value: int = 0

    @classmethod
    def of(cls, cycles):
        b = cls()
        for c in cycles:
            b.add(c)
        return b

    def add(self, c: CycleRecord):
        self.members.append(c)
        for q in c.linking:
            self.mult[q] = self.mult.get(q, 0) + 1
        for q in c.doubled:
            self.mult[q] = self.mult.get(q, 0) + 2
        if c.cls == ACCEPTABLE:
            self.a += 1
        else:
            self.t += 1
        self.p += c.p
        self.value += c.value

    def target_points(self, n: int) -> int:
        return n // 2 + 3 * self.t + self.a - 1


def count_check(branch: PatchBranch, n: int) -> str:
    """``tour`` when every pair is covered and the point count fits, else ``derangement``."""
    if not branch.members:
        return INFEASIBLE
    if len(branch.mult) != n // 2 or any(v > 2 for v in branch.mult.values()):
        return INFEASIBLE
    return TOUR if branch.p == branch.target_points(n) else DERANGEMENT


def dominates(a: int, b: int, c: int, d: int) -> bool:
    """Deleted-arc pair ``(c, d)`` is no worse than ``(a, b)`` at every point."""
    return max(a, b) <= min(c, d)


def branch_edges(cycles, sigma: PerfectMatching):
    mult = {}
    edges = []
    for c in cycles:
        edges.extend(c.new_edges(sigma))
        for v in c.vertices:
            q = min(v, sigma(v))
            mult[q] = mult.get(q, 0) + 1
    for q, k in mult.items():
        if k == 1:
            edges.append((q, sigma(q)))
    return edges


@dataclass
class Assembly:
    verdict: str
    value: int
    components: list
    tour: Tour | None = None
    circuits_before: int = 0
    edges_before: int = 0


def assemble(cycles, sigma: PerfectMatching, m: CostMatrix) -> Assembly:
    """Exact evaluation of a covering cycle set."""
    n = sigma.n
    branch = PatchBranch.of(cycles)
    value = derangement_value(sigma, m) + branch.value
    edges = branch_edges(cycles, sigma)
    comps = _walk_components(edges)
    if any(len(c) < 3 for c in comps):
        return Assembly(INFEASIBLE, value, comps)
    if len(comps) > 1:
        return Assembly(DERANGEMENT, value, comps)
    if count_check(branch, n) != TOUR:
        return Assembly(INFEASIBLE, value, comps)
    circuits = [x for c in cycles for x in circuit_from_cycle(c, sigma, m)]
    edges_before = sum(len(x) for x in circuits)
    merged = patch_circuits(circuits)
    tour = Tour(comps[0])
    if len(merged) != 1 or Tour(merged[0].vertices) != tour:
        raise AssertionError("circuit linking disagrees with the edge-level assembly")
    return Assembly(TOUR, value, comps, tour, len(circuits), edges_before)


# -- search ---------------------------------------------------------------------

@dataclass
class SearchResult:
    tour: Tour | None = None
    tour_value: int | None = None
    tour_cycles: tuple = ()
    derangement: Permutation | None = None
    derangement_value: int | None = None
    derangement_cycles: tuple = ()
    nodes: int = 0
    limit_hit: bool = False
    tours_declared: list = field(default_factory=list)


def _order(cycles):
    return sorted(cycles, key=lambda c: (-c.p, c.value, c.vertices))


def tour_search(cycles, sigma: PerfectMatching, m: CostMatrix, upper: int | None = None,
                node_limit: int = 1_000_000, prune: bool = True, derangement_upper: int | None = None):
    """Depth-first search over cycle sets that cover every matched pair.

    With ``prune`` the search cuts branches whose value bound cannot beat
    ``upper`` or whose point count has passed the tour formula; without it
    every covering set is evaluated (used to check that pruning is sound).
    """
    n = sigma.n
    half = n // 2
    base = derangement_value(sigma, m)
    cyc = _order(cycles)
    pairs = [a for a, _ in sigma.pairs()]
    bit = {q: 1 << k for k, q in enumerate(pairs)}
    full = (1 << len(pairs)) - 1
    need1 = [sum(bit[q] for q in c.linking) for c in cyc]
    need2 = [sum(bit[q] for q in c.doubled) for c in cyc]
    by_pair = [[i for i in range(len(cyc)) if (need1[i] | need2[i]) >> k & 1]
               for k in range(len(pairs))]
    minval = min((c.value for c in cyc), default=0)

    res = SearchResult()
    best = [upper if upper is not None else None]
    best_d = [derangement_upper]
    cover = [(0, 0)]        # stack of (pairs hit once, pairs hit twice)
    chosen = []
    in_branch = set()
    seen = set()
    state = {"p": 0, "t": 0, "a": 0, "sum": 0}

    def fits(i):
        one, two = cover[-1]
        return not (need1[i] & two) and not (need2[i] & (one | two))

    def push(i):
        one, two = cover[-1]
        cover.append((one ^ need1[i], two | (need1[i] & one) | need2[i]))
        chosen.append(i)
        in_branch.add(i)
        c = cyc[i]
        state["p"] += c.p
        state["sum"] += c.value
        state["a" if c.cls == ACCEPTABLE else "t"] += 1

    def pop():
        i = chosen.pop()
        in_branch.discard(i)
        cover.pop()
        c = cyc[i]
        state["p"] -= c.p
        state["sum"] -= c.value
        state["a" if c.cls == ACCEPTABLE else "t"] -= 1

    def slack():
        return half + 3 * state["t"] + state["a"] - 1 - state["p"]

    def evaluate():
        value = base + state["sum"]
        if (best[0] is not None and value >= best[0]
                and best_d[0] is not None and value >= best_d[0]):
            return
        members = [cyc[i] for i in chosen]
        asm = assemble(members, sigma, m)
        if asm.verdict == TOUR:
            res.tours_declared.append((state["p"], state["t"], state["a"], asm.circuits_before,
                                       asm.edges_before))
            if best[0] is None or asm.value < best[0]:
                best[0] = asm.value
                res.tour, res.tour_value = asm.tour, asm.value
                res.tour_cycles = tuple(members)
        elif asm.verdict == DERANGEMENT:
            if best_d[0] is None or asm.value < best_d[0]:
                best_d[0] = asm.value
                img = [0] * n
                for comp in asm.components:
                    for k, v in enumerate(comp):
                        img[v - 1] = comp[(k + 1) % len(comp)]
                res.derangement = Permutation(img)
                res.derangement_value = asm.value
                res.derangement_cycles = tuple(members)

    def bound_ok(extra_needed: bool):
        if not prune:
            return True
        sl = slack()
        if sl < 0 or (extra_needed and sl == 0):
            return False
        lb = base + state["sum"]
        if extra_needed:
            lb += minval if minval > 0 else sl * minval
        if best[0] is None or best_d[0] is None:
            return True
        return lb < max(best[0], best_d[0])

    def visit():
        if res.nodes >= node_limit:
            res.limit_hit = True
            return
        key = frozenset(chosen)
        if key in seen:
            return
        seen.add(key)
        res.nodes += 1
        one, two = cover[-1]
        open_bits = full & ~(one | two)
        if not open_bits:
            evaluate()
            if prune and slack() <= 0:
                return
            last = max(chosen) if chosen else -1
            for i in range(last + 1, len(cyc)):
                if i in in_branch or not fits(i):
                    continue
                push(i)
                if bound_ok(False):
                    visit()
                pop()
            return
        if not bound_ok(True):
            return
        options = None
        k = 0
        while open_bits:
            if open_bits & 1:
                opts = [i for i in by_pair[k] if i not in in_branch and fits(i)]
                if not opts:
                    return
                if options is None or len(opts) < len(options):
                    options = opts
            open_bits >>= 1
            k += 1
        for i in options:
            push(i)
            visit()
            pop()
            if res.limit_hit:
                return

    visit()
    return res


# -- derangement patching ---------------------------------------------------------

def _merge(cycles, ia, ib, i, j):
    """Send ``A[i]`` to the successor of ``B[j]`` and ``B[j]`` to that of ``A[i]``."""
    a, b = cycles[ia], cycles[ib]
    spliced = a[: i + 1] + b[j + 1:] + b[: j + 1] + a[i + 1:]
    return [c for k, c in enumerate(cycles) if k not in (ia, ib)] + [spliced]


def _greedy_merge(cycles, w):
    while len(cycles) > 1:
        best = None
        for ia in range(len(cycles)):
            a = cycles[ia]
            for ib in range(ia + 1, len(cycles)):
                b = cycles[ib]
                for i, x in enumerate(a):
                    dx = a[(i + 1) % len(a)]
                    wx = w[x - 1]
                    for j, y in enumerate(b):
                        dy = b[(j + 1) % len(b)]
                        delta = wx[dy - 1] + w[y - 1][dx - 1] - wx[dx - 1] - w[y - 1][dy - 1]
                        if best is None or delta < best[0]:
                            best = (delta, ia, ib, i, j)
        cycles = _merge(cycles, *best[1:])
    return cycles[0]


def _order_value(order, w):
    return sum(w[order[i] - 1][order[(i + 1) % len(order)] - 1] for i in range(len(order)))


def two_opt(order, m: CostMatrix):
    """Reverse segments while that shortens the tour; first improvement wins."""
    w = m.w.tolist()
    o = list(order)
    n = len(o)
    improved = True
    while improved:
        improved = False
        for i in range(n - 1):
            a, b = o[i], o[i + 1]
            for j in range(i + 2, n if i > 0 else n - 1):
                c, e = o[j], o[(j + 1) % n]
                if w[a - 1][c - 1] + w[b - 1][e - 1] < w[a - 1][b - 1] + w[c - 1][e - 1]:
                    o[i + 1: j + 1] = o[i + 1: j + 1][::-1]
                    b = o[i + 1]
                    improved = True
    return o


def patch_derangement_to_tour(d: Permutation, m: CostMatrix, lookahead: bool = True,
                              polish: bool = True) -> Tour:
    """Merge cycles by the cheapest 2-exchange until one cycle remains.

    With ``lookahead`` every possible first merge is tried and finished
    greedily, keeping the cheapest result; ``polish`` then runs 2-opt.  A
    derangement that is already a single cycle comes back unchanged.
    """
    cycles = [list(c) for c in d.cycles()]
    if len(cycles) == 1 and len(cycles[0]) == d.n:
        return Tour(cycles[0])
    w = m.w.tolist()
    order = _greedy_merge(cycles, w)
    if lookahead:
        best = _order_value(order, w)
        for ia in range(len(cycles)):
            for ib in range(len(cycles)):
                if ia == ib:
                    continue
                for i in range(len(cycles[ia])):
                    for j in range(len(cycles[ib])):
                        cand = _greedy_merge(_merge(cycles, ia, ib, i, j), w)
                        v = _order_value(cand, w)
                        if v < best:
                            best, order = v, cand
    if polish:
        order = two_opt(order, m)
    return Tour(order)


# -- solver ---------------------------------------------------------------------

@dataclass
class SolveConfig:
    passes: int = 8
    width: int = 4
    node_limit: int = 1_000_000
    deep: bool = False          # wider per-class path lists in the harvest
    max_rounds: int = 50
    trials: int | None = None

    @property
    def harvest_width(self) -> int:
        return max(self.width, 8) if self.deep else self.width


def alternating_matchings(t: Tour, m: CostMatrix):
    """Both alternating edge sets of a tour as matchings, the cheaper (per pm_from_tour) first."""
    first, v1 = pm_from_tour(t, m)
    o = t.order
    n = len(o)
    other = [(o[i], o[(i + 1) % n]) for i in range(n)]
    other = [e for e in other if first(e[0]) != e[1]]
    second = PerfectMatching.from_pairs(n, other)
    return [(first, v1), (second, pm_value(second, m))]


def _drop_vertex(t: Tour, v: int) -> Tour:
    return Tour([x for x in t.order if x != v])


def solve(m: CostMatrix, config: SolveConfig | None = None, trace=None):
    """Full pipeline; returns ``(best tour, report dict)``."""
    config = config or SolveConfig()
    bad = validate_symmetry(m)
    if bad:
        a, b, x, y = bad[0]
        raise InstanceError(f"cost matrix is not symmetric: cost({a},{b}) = {x} but cost({b},{a}) = {y}"
                            f" ({len(bad)} pair(s) differ)")
    original = m
    padded = m.n % 2 == 1
    if padded:
        m = pad_odd(m)
    n = m.n
    phases = []

    def phase(name, before, after, artifact):
        entry = {"name": name, "value_before": before, "value_after": after, "artifact": artifact}
        phases.append(entry)
        if trace is not None:
            trace({"event": "phase", **entry})

    nr = neighbor_rank(m)
    d1 = phase1_run(m, nr, config.trials, trace=trace)
    v1 = derangement_value(d1, m)
    phase("phase1", None, v1, str(d1))
    d2 = phase2_improve(d1, m, config.passes, trace=trace)
    v2 = derangement_value(d2, m)
    phase("phase2", v1, v2, str(d2))
    best_d, best_dv = d2, v2
    tour = patch_derangement_to_tour(d2, m)
    tv = tour_value(tour, m)
    phase("patch", v2, tv, " ".join(map(str, tour.order)))

    rounds = []
    limit_hit = False
    declared = []
    for _ in range(config.max_rounds):
        improved = False
        for sigma, pmv in alternating_matchings(tour, m):
            bound = tv - pmv - 1
            r = build_reduced(m, sigma)
            harvest = harvest_cycles(r, sigma, bound, config.passes, width=config.harvest_width)
            found = tour_search(harvest.cycles, sigma, m, tv, config.node_limit,
                                derangement_upper=best_dv)
            limit_hit |= found.limit_hit
            declared.extend(found.tours_declared)
            info = {"pm": str(sigma), "pm_value": pmv, "bound": bound, "cycles": len(harvest.cycles),
                    "passes": harvest.passes_run, "nodes": found.nodes, "limit_hit": found.limit_hit,
                    "tour_value": found.tour_value, "derangement_value": found.derangement_value}
            rounds.append(info)
            if trace is not None:
                trace({"event": "round", **info})
            if found.derangement is not None and found.derangement_value < best_dv:
                best_d, best_dv = found.derangement, found.derangement_value
                phase("search-derangement", None, best_dv, str(best_d))
            if found.tour is not None and found.tour_value < tv:
                phase("search-tour", tv, found.tour_value, " ".join(map(str, found.tour.order)))
                tour, tv = found.tour, found.tour_value
                improved = True
            elif found.derangement is not None:
                cand = patch_derangement_to_tour(found.derangement, m)
                cv = tour_value(cand, m)
                if cv < tv:
                    phase("repatch", tv, cv, " ".join(map(str, cand.order)))
                    tour, tv = cand, cv
                    improved = True
            if improved:
                break
        if not improved:
            break

    final = tour
    if padded:
        final = _drop_vertex(tour, n)
    fv = tour_value(final, original)
    report = {
        "n": original.n,
        "padded": padded,
        "phases": phases,
        "rounds": rounds,
        "best_derangement": {"value": best_dv, "cycles": str(best_d)},
        "tour": list(final.order),
        "tour_value": fv,
        "tours_declared": [list(x) for x in declared],
        "node_limit_hit": limit_hit,
    }
    return final, report
