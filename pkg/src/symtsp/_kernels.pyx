# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the sweep and Held-Karp loops (see _kernels_py)."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t, int32_t

cnp.import_array()

cdef int64_t UNSET = (<int64_t>1) << 50


cdef inline int popcount_gt(uint64_t d, int limit):
    cdef int c = 0
    while d:
        d &= d - 1
        c += 1
        if c > limit:
            break
    return c


cdef bint interlaced(int32_t[::1] seq, int ln, int32_t[::1] pair_of, int32_t[::1] first):
    cdef int idx, q
    cdef int a1 = -1, a2 = -1, b1 = -1, b2 = -1, qa = -1
    for idx in range(ln):
        first[pair_of[seq[idx]]] = -1
    for idx in range(ln):
        q = pair_of[seq[idx]]
        if first[q] < 0:
            first[q] = idx
        elif qa < 0:
            qa = q
            a1 = first[q]
            a2 = idx
        else:
            b1 = first[q]
            b2 = idx
    if b2 < 0:
        return False
    return (a1 < b1 < a2 < b2) or (b1 < a1 < b2 < a2)


def fw_sweep(int64_t[:, :, ::1] val, int32_t[:, :, ::1] via, int32_t[:, :, ::1] plen,
             int32_t[:, :, :, ::1] paths, int64_t[:, ::1] arc, int64_t[::1] bit,
             int32_t[::1] pair_of, bint paired, int nclasses, int width,
             int64_t path_bound, int64_t cycle_bound, bint record, int32_t[::1] pivots):
    cdef Py_ssize_t n = arc.shape[0]
    cdef int K = width
    cdef int C = nclasses * K
    cdef Py_ssize_t c, i, k, s, t, x, pj, l1, l2, ln, at, lo, hi
    cdef int j, c1, c2, cls
    cdef int64_t v1, v2, cand, vs
    cdef uint64_t m1, m2, u, d, d2, bj, bij
    cdef uint64_t even = 0x5555555555555555ULL
    cdef bint closing, dup, same, changed = False
    cdef cnp.ndarray mask_arr = np.zeros((C, n, n), dtype=np.uint64)
    cdef uint64_t[:, :, ::1] M = mask_arr
    cdef int32_t[::1] seq = np.zeros(2 * n + 2, dtype=np.int32)
    cdef int32_t[::1] scratch = np.zeros(n + 1, dtype=np.int32)
    cycles = []

    for c in range(C):
        for i in range(n):
            for k in range(n):
                u = 0
                for x in range(plen[c, i, k]):
                    u |= (<uint64_t>1) << bit[paths[c, i, k, x]]
                M[c, i, k] = u

    for pj in range(pivots.shape[0]):
        j = pivots[pj]
        bj = (<uint64_t>1) << bit[j]
        for i in range(n):
            if i == j:
                continue
            bij = bj | ((<uint64_t>1) << bit[i])
            for c1 in range(C):
                v1 = val[c1, i, j]
                if v1 >= UNSET:
                    continue
                m1 = M[c1, i, j]
                l1 = plen[c1, i, j]
                for k in range(n):
                    if k == j:
                        continue
                    closing = k == i
                    for c2 in range(C):
                        v2 = val[c2, j, k]
                        if v2 >= UNSET:
                            continue
                        cand = v1 + v2
                        if closing:
                            if not record or cand > cycle_bound:
                                continue
                        elif cand > path_bound:
                            continue
                        m2 = M[c2, j, k]
                        if closing:
                            if (m1 & m2) != bij:
                                continue
                        elif (m1 & m2) != bj:
                            continue
                        u = m1 | m2
                        cls = 0
                        if paired:
                            d = u & (u >> 1) & even
                            if d:
                                cls = popcount_gt(d, 2)
                                if cls > 2:
                                    continue
                        if cls >= nclasses:
                            continue
                        l2 = plen[c2, j, k]
                        if closing:
                            ln = l1 + l2 - 2
                        else:
                            ln = l1 + l2 - 1
                            lo = cls * K
                            hi = lo + K
                            if cand >= val[hi - 1, i, k]:
                                continue
                        for x in range(l1):
                            seq[x] = paths[c1, i, j, x]
                        for x in range(1, l2):
                            seq[l1 + x - 1] = paths[c2, j, k, x]
                        if cls == 2 and not interlaced(seq, ln, pair_of, scratch):
                            continue
                        if closing:
                            cycles.append((cls, cand, tuple([seq[x] for x in range(ln)])))
                            continue
                        dup = False
                        at = -1
                        for s in range(lo, hi):
                            vs = val[s, i, k]
                            if vs >= UNSET:
                                if at < 0:
                                    at = s
                                break
                            if vs == cand and plen[s, i, k] == ln:
                                same = True
                                for x in range(ln):
                                    if paths[s, i, k, x] != seq[x]:
                                        same = False
                                        break
                                if same:
                                    dup = True
                                    break
                            if at < 0 and cand < vs:
                                at = s
                        if dup:
                            continue
                        s = hi - 1
                        while s > at:
                            val[s, i, k] = val[s - 1, i, k]
                            plen[s, i, k] = plen[s - 1, i, k]
                            M[s, i, k] = M[s - 1, i, k]
                            via[s, i, k] = via[s - 1, i, k]
                            for x in range(plen[s, i, k]):
                                paths[s, i, k, x] = paths[s - 1, i, k, x]
                            s -= 1
                        val[at, i, k] = cand
                        plen[at, i, k] = <int32_t>ln
                        M[at, i, k] = u
                        via[at, i, k] = j
                        for x in range(ln):
                            paths[at, i, k, x] = seq[x]
                        changed = True
                        if record and arc[k, i] < UNSET and cand + arc[k, i] <= cycle_bound:
                            cycles.append((cls, cand + arc[k, i], tuple([seq[x] for x in range(ln)])))
    return changed, cycles


def held_karp(cnp.ndarray w_in):
    cdef const int64_t[:, ::1] w = np.ascontiguousarray(w_in, dtype=np.int64)
    cdef int n = w.shape[0]
    cdef int m = n - 1
    if n == 2:
        return int(2 * w[0, 1]), [0, 1]
    cdef Py_ssize_t full = (<Py_ssize_t>1) << m
    cdef int64_t BIG = (<int64_t>1) << 60
    cdef cnp.ndarray dp_arr = np.full((full, m), BIG, dtype=np.int64)
    cdef cnp.ndarray par_arr = np.full((full, m), -1, dtype=np.int8)
    cdef int64_t[:, ::1] dp = dp_arr
    cdef signed char[:, ::1] par = par_arr
    cdef Py_ssize_t mask, nm
    cdef int k, nxt
    cdef int64_t cur, cand
    for k in range(m):
        dp[(<Py_ssize_t>1) << k, k] = w[0, k + 1]
    for mask in range(1, full):
        for k in range(m):
            cur = dp[mask, k]
            if cur == BIG or not (mask >> k) & 1:
                continue
            for nxt in range(m):
                if (mask >> nxt) & 1:
                    continue
                nm = mask | ((<Py_ssize_t>1) << nxt)
                cand = cur + w[k + 1, nxt + 1]
                if cand < dp[nm, nxt]:
                    dp[nm, nxt] = cand
                    par[nm, nxt] = k
    cdef Py_ssize_t last = full - 1
    cdef int64_t best = BIG
    cdef int arg = -1
    for k in range(m):
        cand = dp[last, k] + w[k + 1, 0]
        if cand < best:
            best = cand
            arg = k
    order = []
    mask = last
    k = arg
    while k != -1:
        order.append(k + 1)
        nxt = par[mask, k]
        mask ^= (<Py_ssize_t>1) << k
        k = nxt
    order.append(0)
    order.reverse()
    return int(best), order
