"""Pure-Python versions of the hot loops; the compiled module mirrors these exactly.

Path tables are numpy arrays shaped ``(classes, n, n)`` (values, via, path
lengths) and ``(classes, n, n, n)`` (vertex sequences, 0-based).  Every vertex
owns one bit of a mask; in paired mode the two points of a matched pair own
bits ``2q`` and ``2q + 1`` so doubled pairs are found with a shift and an and.
"""
from __future__ import annotations

import numpy as np

UNSET = np.int64(1) << 50


def _interlaced(seq, pair_of):
    first = {}
    pos = {}
    for idx, v in enumerate(seq):
        q = pair_of[v]
        if q in first:
            pos[q] = (first[q], idx)
        else:
            first[q] = idx
    if len(pos) != 2:
        return False
    (a1, a2), (b1, b2) = pos.values()
    return (a1 < b1 < a2 < b2) or (b1 < a1 < b2 < a2)


def fw_sweep(val, via, plen, paths, arc_val, bit, pair_of, paired, nclasses, width,
             path_bound, cycle_bound, record, pivots):
    """Triangle operations for each pivot in ``pivots``, in order.

    Slot ``s`` holds the ``s % width``-th best path of class ``s // width``.
    ``arc_val`` is the n x n reduced matrix with forbidden cells >= UNSET.
    Returns ``(changed, cycles)`` where ``cycles`` lists
    ``(class, value, vertex tuple)`` closures with value <= cycle_bound.
    """
    n = arc_val.shape[0]
    K = width
    C = nclasses * K
    V = val.tolist()
    A = arc_val.tolist()
    L = plen.tolist()
    P = [[[tuple(paths[c, i, k, : L[c][i][k]]) for k in range(n)] for i in range(n)] for c in range(C)]
    bit = [int(x) for x in bit]
    pair_of = [int(x) for x in pair_of]
    even = 0
    for q in range(n):
        even |= 1 << (2 * q)
    M = [[[0] * n for _ in range(n)] for _ in range(C)]
    for c in range(C):
        for i in range(n):
            for k in range(n):
                if L[c][i][k]:
                    m = 0
                    for v in P[c][i][k]:
                        m |= 1 << bit[v]
                    M[c][i][k] = m
    changed = False
    cycles = []
    unset = int(UNSET)
    for j in pivots:
        j = int(j)
        bj = 1 << bit[j]
        # row j stays fixed while j is the pivot (updates never touch row or column j)
        row = [(k, c2, V[c2][j][k], M[c2][j][k]) for k in range(n) if k != j
               for c2 in range(C) if V[c2][j][k] < unset]
        for i in range(n):
            if i == j:
                continue
            bij = bj | (1 << bit[i])
            for c1 in range(C):
                v1 = V[c1][i][j]
                if v1 >= unset:
                    continue
                m1 = M[c1][i][j]
                p1 = P[c1][i][j]
                for k, c2, v2, m2 in row:
                    closing = k == i
                    cand = v1 + v2
                    if closing:
                        if not record or cand > cycle_bound:
                            continue
                    elif cand > path_bound:
                        continue
                    if (m1 & m2) != (bij if closing else bj):
                        continue
                    u = m1 | m2
                    cls = 0
                    if paired:
                        d = u & (u >> 1) & even
                        if d:
                            if d & (d - 1) == 0:
                                cls = 1
                            else:
                                d2 = d & (d - 1)
                                if d2 & (d2 - 1):
                                    continue
                                cls = 2
                    if cls >= nclasses:
                        continue
                    if closing:
                        seq = p1 + P[c2][j][k][1:-1]
                        if cls == 2 and not _interlaced(seq, pair_of):
                            continue
                        cycles.append((cls, cand, seq))
                        continue
                    lo = cls * K
                    hi = lo + K
                    if cand >= V[hi - 1][i][k]:
                        continue
                    seq = p1 + P[c2][j][k][1:]
                    if cls == 2 and not _interlaced(seq, pair_of):
                        continue
                    dup = False
                    at = -1
                    for s in range(lo, hi):
                        vs = V[s][i][k]
                        if vs >= unset:
                            if at < 0:
                                at = s
                            break
                        if P[s][i][k] == seq:
                            dup = True
                            break
                        if at < 0 and cand < vs:
                            at = s
                    if dup:
                        continue
                    for s in range(hi - 1, at, -1):
                        V[s][i][k] = V[s - 1][i][k]
                        P[s][i][k] = P[s - 1][i][k]
                        L[s][i][k] = L[s - 1][i][k]
                        M[s][i][k] = M[s - 1][i][k]
                        via[s, i, k] = via[s - 1, i, k]
                    V[at][i][k] = cand
                    P[at][i][k] = seq
                    L[at][i][k] = len(seq)
                    M[at][i][k] = u
                    via[at, i, k] = j
                    changed = True
                    if record and A[k][i] < unset and cand + A[k][i] <= cycle_bound:
                        cycles.append((cls, cand + A[k][i], seq))
    val[...] = np.array(V, dtype=np.int64)
    plen[...] = np.array(L, dtype=np.int32)
    for c in range(C):
        for i in range(n):
            for k in range(n):
                s = P[c][i][k]
                if s:
                    paths[c, i, k, : len(s)] = s
    return changed, cycles


def held_karp(w):
    """Optimal tour value and order (0-based, starting at 0) by subset DP."""
    n = w.shape[0]
    W = w.tolist()
    if n == 2:
        return 2 * W[0][1], [0, 1]
    full = 1 << (n - 1)
    big = float("inf")
    # dp[mask][k]: cheapest path from 0 through mask (over vertices 1..n-1) ending at k+1
    dp = [[big] * (n - 1) for _ in range(full)]
    parent = [[-1] * (n - 1) for _ in range(full)]
    for k in range(n - 1):
        dp[1 << k][k] = W[0][k + 1]
    for mask in range(1, full):
        row = dp[mask]
        for k in range(n - 1):
            cur = row[k]
            if cur == big or not (mask >> k) & 1:
                continue
            wk = W[k + 1]
            for nxt in range(n - 1):
                if (mask >> nxt) & 1:
                    continue
                nm = mask | (1 << nxt)
                cand = cur + wk[nxt + 1]
                if cand < dp[nm][nxt]:
                    dp[nm][nxt] = cand
                    parent[nm][nxt] = k
    last = full - 1
    best, arg = big, -1
    for k in range(n - 1):
        cand = dp[last][k] + W[k + 1][0]
        if cand < best:
            best, arg = cand, k
    order = []
    mask, k = last, arg
    while k != -1:
        order.append(k + 1)
        pk = parent[mask][k]
        mask ^= 1 << k
        k = pk
    order.append(0)
    order.reverse()
    return int(best), order
