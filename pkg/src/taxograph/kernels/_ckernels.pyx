# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops; see _pykernels for the reference."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def pair_keys(indptr, ids, long long n_topics):
    cdef const long long[:] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const long long[:] t = np.ascontiguousarray(ids, dtype=np.int64)
    cdef Py_ssize_t ndocs = ip.shape[0] - 1
    cdef Py_ssize_t d, a, b, lo, hi
    cdef long long m, total = 0
    for d in range(ndocs):
        m = ip[d + 1] - ip[d]
        total += m * (m - 1) // 2
    out = np.empty(total, dtype=np.int64)
    cdef long long[:] keys = out
    cdef Py_ssize_t pos = 0
    cdef long long i
    for d in range(ndocs):
        lo = ip[d]
        hi = ip[d + 1]
        for a in range(lo, hi):
            i = t[a]
            for b in range(a + 1, hi):
                keys[pos] = i * n_topics + t[b]
                pos += 1
    return out


def heavy_edge_matching(indptr, indices, adjwgt, vwgt, order, double maxvwgt):
    cdef const long long[:] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const long long[:] ind = np.ascontiguousarray(indices, dtype=np.int64)
    cdef const double[:] w = np.ascontiguousarray(adjwgt, dtype=np.float64)
    cdef const double[:] vw = np.ascontiguousarray(vwgt, dtype=np.float64)
    cdef const long long[:] ordr = np.ascontiguousarray(order, dtype=np.int64)
    cdef Py_ssize_t n = ip.shape[0] - 1
    out = np.full(n, -1, dtype=np.int64)
    cdef long long[:] match = out
    cdef Py_ssize_t idx, e
    cdef long long v, u, best
    cdef double best_w
    for idx in range(ordr.shape[0]):
        v = ordr[idx]
        if match[v] != -1:
            continue
        best = -1
        best_w = -1.0
        for e in range(ip[v], ip[v + 1]):
            u = ind[e]
            if u == v or match[u] != -1:
                continue
            if vw[v] + vw[u] > maxvwgt:
                continue
            if w[e] > best_w:
                best_w = w[e]
                best = u
        if best >= 0:
            match[v] = best
            match[best] = v
        else:
            match[v] = v
    return out


def greedy_refine(indptr, indices, adjwgt, vwgt, cnp.ndarray part, int k,
                  double maxpwgt, double tol):
    cdef const long long[:] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const long long[:] ind = np.ascontiguousarray(indices, dtype=np.int64)
    cdef const double[:] w = np.ascontiguousarray(adjwgt, dtype=np.float64)
    cdef const double[:] vw = np.ascontiguousarray(vwgt, dtype=np.float64)
    cdef Py_ssize_t n = ip.shape[0] - 1
    p_arr = np.ascontiguousarray(part, dtype=np.int64).copy()
    cdef long long[:] p = p_arr
    conn_arr = np.zeros((n, k), dtype=np.float64)
    cdef double[:, :] conn = conn_arr
    pwgt_arr = np.zeros(k, dtype=np.float64)
    cdef double[:] pwgt = pwgt_arr
    psize_arr = np.zeros(k, dtype=np.int64)
    cdef long long[:] psize = psize_arr
    cdef Py_ssize_t v, e, u, a, b, best_v, best_to
    cdef double internal, g, best_gain
    cdef long long moves = 0

    for v in range(n):
        pwgt[p[v]] += vw[v]
        psize[p[v]] += 1
        for e in range(ip[v], ip[v + 1]):
            u = ind[e]
            if u != v:
                conn[v, p[u]] += w[e]

    while True:
        best_gain = tol
        best_v = -1
        best_to = -1
        for v in range(n):
            a = p[v]
            if psize[a] == 1:
                continue
            internal = conn[v, a]
            for b in range(k):
                if b == a or conn[v, b] <= 0.0:
                    continue
                if pwgt[b] + vw[v] > maxpwgt:
                    continue
                g = conn[v, b] - internal
                if g > best_gain:
                    best_gain = g
                    best_v = v
                    best_to = b
        if best_v < 0:
            break
        v = best_v
        b = best_to
        a = p[v]
        p[v] = b
        pwgt[a] -= vw[v]
        pwgt[b] += vw[v]
        psize[a] -= 1
        psize[b] += 1
        for e in range(ip[v], ip[v + 1]):
            u = ind[e]
            if u != v:
                conn[u, a] -= w[e]
                conn[u, b] += w[e]
        moves += 1

    part[:] = p_arr
    return moves


cdef double _excess(double[:] pwgt, int k, double maxpwgt):
    cdef double m = 0.0
    cdef int b
    for b in range(k):
        if pwgt[b] - maxpwgt > m:
            m = pwgt[b] - maxpwgt
    return m


def fm_pass(indptr, indices, adjwgt, vwgt, cnp.ndarray part, int k,
            double maxpwgt, double slack, double tol, long long max_stall):
    cdef const long long[:] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const long long[:] ind = np.ascontiguousarray(indices, dtype=np.int64)
    cdef const double[:] w = np.ascontiguousarray(adjwgt, dtype=np.float64)
    cdef const double[:] vw = np.ascontiguousarray(vwgt, dtype=np.float64)
    cdef Py_ssize_t n = ip.shape[0] - 1
    p_arr = np.ascontiguousarray(part, dtype=np.int64).copy()
    cdef long long[:] p = p_arr
    conn_arr = np.zeros((n, k), dtype=np.float64)
    cdef double[:, :] conn = conn_arr
    pwgt_arr = np.zeros(k, dtype=np.float64)
    cdef double[:] pwgt = pwgt_arr
    psize_arr = np.zeros(k, dtype=np.int64)
    cdef long long[:] psize = psize_arr
    locked_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[:] locked = locked_arr
    log_v_arr = np.empty(n, dtype=np.int64)
    log_a_arr = np.empty(n, dtype=np.int64)
    cdef long long[:] log_v = log_v_arr
    cdef long long[:] log_a = log_a_arr
    cdef Py_ssize_t v, e, u, a, b, best_v, best_to, nlog = 0, best_len = 0, i
    cdef double internal, g, best_gain, total = 0.0, best_total = 0.0, start_excess

    for v in range(n):
        pwgt[p[v]] += vw[v]
        psize[p[v]] += 1
        for e in range(ip[v], ip[v + 1]):
            u = ind[e]
            if u != v:
                conn[v, p[u]] += w[e]
    start_excess = _excess(pwgt, k, maxpwgt)

    while nlog < n:
        best_gain = 0.0
        best_v = -1
        best_to = -1
        for v in range(n):
            if locked[v]:
                continue
            a = p[v]
            if psize[a] == 1:
                continue
            internal = conn[v, a]
            for b in range(k):
                if b == a:
                    continue
                if pwgt[b] + vw[v] > maxpwgt + slack:
                    continue
                g = conn[v, b] - internal
                if best_v < 0 or g > best_gain:
                    best_gain = g
                    best_v = v
                    best_to = b
        if best_v < 0:
            break
        v = best_v
        b = best_to
        a = p[v]
        p[v] = b
        pwgt[a] -= vw[v]
        pwgt[b] += vw[v]
        psize[a] -= 1
        psize[b] += 1
        for e in range(ip[v], ip[v + 1]):
            u = ind[e]
            if u != v:
                conn[u, a] -= w[e]
                conn[u, b] += w[e]
        locked[v] = 1
        log_v[nlog] = v
        log_a[nlog] = a
        nlog += 1
        total += best_gain
        if total > best_total + tol and _excess(pwgt, k, maxpwgt) <= start_excess:
            best_total = total
            best_len = nlog
        elif nlog - best_len > max_stall:
            break

    i = nlog - 1
    while i >= best_len:
        p[log_v[i]] = log_a[i]
        i -= 1
    part[:] = p_arr
    return best_total
