"""Exact answers for small instances, used to check the heuristics."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import _backend
from .fwcycles import ACCEPTABLE, classify_cycle, make_record
from .instance import CostMatrix
from .permutation import Permutation, PerfectMatching, Tour, canonical_cycle, derangement_value, pm_value, tour_value
from .reduced import ReducedMatrix

TSP_LIMIT = 13
TSP_CROSSCHECK = 9
PM_LIMIT = 14
DERANGEMENT_LIMIT = 9
CYCLE_LIMIT = 10


class OracleLimit(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    value: int
    witness: object
    method: str


def _check(n, limit, what):
    if n > limit:
        raise OracleLimit(f"{what} oracle handles n <= {limit}, got {n}")


def tsp_by_enumeration(m: CostMatrix):
    n = m.n
    best = None
    for rest in itertools.permutations(range(2, n + 1)):
        if rest[0] > rest[-1]:
            continue            # each tour once, not once per direction
        t = Tour((1,) + rest)
        v = tour_value(t, m)
        if best is None or v < best[0]:
            best = (v, t)
    return best


def brute_tsp(m: CostMatrix, crosscheck: bool = True) -> OracleResult:
    """Optimal tour by subset dynamic programming, re-derived by enumeration for n <= 9."""
    n = m.n
    if n < 3:
        raise OracleLimit("a tour needs at least 3 vertices")
    _check(n, TSP_LIMIT, "tour")
    value, order = _backend.held_karp(m.w)
    tour = Tour([v + 1 for v in order])
    if tour_value(tour, m) != value:
        raise AssertionError("dynamic programming witness disagrees with its value")
    if crosscheck and n <= TSP_CROSSCHECK:
        ev, _ = tsp_by_enumeration(m)
        if ev != value:
            raise AssertionError(f"enumeration gives {ev}, dynamic programming {value}")
    return OracleResult(value, tour, "dynamic-programming")


def iter_perfect_matchings(n: int):
    """Every perfect matching of 1..n as a pair list, lowest open point paired first."""
    def rec(rest):
        if not rest:
            yield []
            return
        a = rest[0]
        for i in range(1, len(rest)):
            b = rest[i]
            for tail in rec(rest[1:i] + rest[i + 1:]):
                yield [(a, b)] + tail
    yield from rec(list(range(1, n + 1)))


def brute_min_pm(m: CostMatrix) -> OracleResult:
    """Cheapest perfect matching (value counts each edge twice, as a permutation)."""
    n = m.n
    if n % 2:
        raise OracleLimit("perfect matchings need an even vertex count")
    _check(n, PM_LIMIT, "matching")
    w = m.w.tolist()
    best = [None, None]

    def rec(rest, acc, pairs):
        if best[0] is not None and acc >= best[0]:
            return
        if not rest:
            best[0], best[1] = acc, list(pairs)
            return
        a = rest[0]
        for i in range(1, len(rest)):
            b = rest[i]
            pairs.append((a, b))
            rec(rest[1:i] + rest[i + 1:], acc + w[a - 1][b - 1], pairs)
            pairs.pop()

    # strict pruning keeps the first cheapest matching in enumeration order
    rec(list(range(1, n + 1)), 0, [])
    pm = PerfectMatching.from_pairs(n, best[1])
    return OracleResult(pm_value(pm, m), pm, "enumeration")


def brute_min_derangement(m: CostMatrix) -> OracleResult:
    """Cheapest fixed-point-free permutation by assignment over row subsets."""
    n = m.n
    if n < 2:
        raise OracleLimit("a derangement needs at least 2 vertices")
    _check(n, DERANGEMENT_LIMIT, "derangement")
    w = m.w.tolist()
    full = (1 << n) - 1
    inf = float("inf")
    # best[mask]: cheapest way to give rows 0..popcount(mask)-1 the columns in mask
    best = [inf] * (1 << n)
    choice = [-1] * (1 << n)
    best[0] = 0
    for mask in range(1 << n):
        cur = best[mask]
        if cur == inf:
            continue
        row = bin(mask).count("1")
        if row == n:
            continue
        for col in range(n):
            if col == row or mask >> col & 1:
                continue
            nm = mask | 1 << col
            cand = cur + w[row][col]
            if cand < best[nm]:
                best[nm] = cand
                choice[nm] = col
    img = [0] * n
    mask = full
    for row in range(n - 1, -1, -1):
        col = choice[mask]
        img[row] = col + 1
        mask ^= 1 << col
    d = Permutation(img)
    value = derangement_value(d, m)
    if value != best[full]:
        raise AssertionError("assignment witness disagrees with its value")
    return OracleResult(value, d, "dynamic-programming")


def derangements_by_enumeration(m: CostMatrix):
    n = m.n
    best = None
    for img in itertools.permutations(range(1, n + 1)):
        if any(img[i] == i + 1 for i in range(n)):
            continue
        d = Permutation(img)
        v = derangement_value(d, m)
        if best is None or v < best[0]:
            best = (v, d)
    return best


def enumerate_acceptable_cycles(r: ReducedMatrix, sigma: PerfectMatching, bound: int | None = None,
                                classes=(ACCEPTABLE,)):
    """Every admissible simple cycle of the reduced matrix with value <= ``bound``.

    Cycles are listed once, starting at their smallest vertex, and come back as
    records sorted by value then vertices.
    """
    n = r.n
    _check(n, CYCLE_LIMIT, "cycle")
    wanted = set(classes)
    vals = r.values.tolist()
    allowed = (~r.forbidden).tolist()
    out = []
    pair_count = {}

    def key(v):
        return min(v, sigma(v))

    def doubled_ok():
        return sum(1 for c in pair_count.values() if c == 2) <= (2 if wanted - {ACCEPTABLE} else 0)

    def extend(path, total):
        a = path[-1]
        s = path[0]
        if len(path) >= 2 and allowed[a - 1][s - 1]:
            cyc = tuple(path)
            cls = classify_cycle(cyc, sigma)
            value = total + vals[a - 1][s - 1]
            if cls in wanted and (bound is None or value <= bound):
                out.append(cyc)
        for b in range(s + 1, n + 1):
            if b in path or not allowed[a - 1][b - 1]:
                continue
            k = key(b)
            pair_count[k] = pair_count.get(k, 0) + 1
            if doubled_ok():
                path.append(b)
                extend(path, total + vals[a - 1][b - 1])
                path.pop()
            pair_count[k] -= 1
            if not pair_count[k]:
                del pair_count[k]

    for s in range(1, n + 1):
        pair_count[key(s)] = 1
        extend([s], 0)
        del pair_count[key(s)]
    recs = [make_record(r, sigma, c, bound) for c in out]
    return sorted(recs, key=lambda c: (c.value, c.vertices))


def acceptable_cycles_by_permutations(r: ReducedMatrix, sigma: PerfectMatching, bound: int | None = None):
    """Independent generator: try every ordered vertex tuple, keep canonical acceptable ones."""
    n = r.n
    found = set()
    for k in range(2, n // 2 + 1):
        for tup in itertools.permutations(range(1, n + 1), k):
            if tup != canonical_cycle(tup):
                continue
            if classify_cycle(tup, sigma) != ACCEPTABLE:
                continue
            if any(not r.allowed(tup[i], tup[(i + 1) % k]) for i in range(k)):
                continue
            v = sum(r.entry(tup[i], tup[(i + 1) % k]) for i in range(k))
            if bound is None or v <= bound:
                found.add((tup, v))
    return sorted(found, key=lambda x: (x[1], x[0]))
