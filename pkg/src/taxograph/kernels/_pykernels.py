"""Pure-Python versions of the hot loops.

Every function here has a twin in ``_ckernels.pyx`` that must produce
bit-identical output; the loop structure and floating point accumulation
order are kept the same on purpose.
"""

import numpy as np


def pair_keys(indptr, ids, n_topics):
    """Encode every unordered topic pair of every document as ``i * n + j``.

    ``indptr``/``ids`` is a CSR layout of document -> sorted unique topic ids.
    """
    indptr = np.asarray(indptr, dtype=np.int64)
    ids = np.asarray(ids, dtype=np.int64)
    total = 0
    for d in range(len(indptr) - 1):
        m = int(indptr[d + 1] - indptr[d])
        total += m * (m - 1) // 2
    keys = np.empty(total, dtype=np.int64)
    pos = 0
    n = int(n_topics)
    for d in range(len(indptr) - 1):
        lo, hi = int(indptr[d]), int(indptr[d + 1])
        for a in range(lo, hi):
            i = int(ids[a])
            for b in range(a + 1, hi):
                keys[pos] = i * n + int(ids[b])
                pos += 1
    return keys


def heavy_edge_matching(indptr, indices, adjwgt, vwgt, order, maxvwgt):
    """Match each unmatched vertex (visited in ``order``) with its heaviest
    unmatched neighbour. Unmatched vertices are matched to themselves."""
    n = len(indptr) - 1
    match = [-1] * n
    indptr = [int(x) for x in indptr]
    indices = [int(x) for x in indices]
    adjwgt = [float(x) for x in adjwgt]
    vwgt = [float(x) for x in vwgt]
    for v in order:
        v = int(v)
        if match[v] != -1:
            continue
        best = -1
        best_w = -1.0
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if u == v or match[u] != -1:
                continue
            if vwgt[v] + vwgt[u] > maxvwgt:
                continue
            if adjwgt[e] > best_w:
                best_w = adjwgt[e]
                best = u
        if best >= 0:
            match[v] = best
            match[best] = v
        else:
            match[v] = v
    return np.asarray(match, dtype=np.int64)


def greedy_refine(indptr, indices, adjwgt, vwgt, part, k, maxpwgt, tol):
    """Move boundary vertices while some move has gain > ``tol``.

    Each step applies the single best move over the whole graph (ties go to the
    lowest vertex, then the lowest target part). A move is legal only if the
    target part stays within ``maxpwgt`` and the source part keeps at least one
    vertex. ``part`` is updated in place; returns the number of moves.
    """
    n = len(indptr) - 1
    indptr = [int(x) for x in indptr]
    indices = [int(x) for x in indices]
    adjwgt = [float(x) for x in adjwgt]
    vwgt = [float(x) for x in vwgt]
    p = [int(x) for x in part]
    conn = [[0.0] * k for _ in range(n)]
    pwgt = [0.0] * k
    psize = [0] * k
    for v in range(n):
        pwgt[p[v]] += vwgt[v]
        psize[p[v]] += 1
        row = conn[v]
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if u != v:
                row[p[u]] += adjwgt[e]

    moves = 0
    while True:
        best_gain = tol
        best_v = -1
        best_to = -1
        for v in range(n):
            a = p[v]
            if psize[a] == 1:
                continue
            row = conn[v]
            internal = row[a]
            for b in range(k):
                if b == a or row[b] <= 0.0:
                    continue
                if pwgt[b] + vwgt[v] > maxpwgt:
                    continue
                g = row[b] - internal
                if g > best_gain:
                    best_gain = g
                    best_v = v
                    best_to = b
        if best_v < 0:
            break
        v, b = best_v, best_to
        a = p[v]
        p[v] = b
        pwgt[a] -= vwgt[v]
        pwgt[b] += vwgt[v]
        psize[a] -= 1
        psize[b] += 1
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if u != v:
                conn[u][a] -= adjwgt[e]
                conn[u][b] += adjwgt[e]
        moves += 1

    part[:] = p
    return moves


def fm_pass(indptr, indices, adjwgt, vwgt, part, k, maxpwgt, slack, tol, max_stall):
    """One Fiduccia-Mattheyses style pass.

    Vertices are moved one at a time, best gain first (negative gains
    allowed), and locked after moving. Mid-pass a part may exceed ``maxpwgt``
    by up to ``slack`` so that swaps are reachable, but a prefix only counts
    as the best if it is no less balanced than the starting state. The pass
    stops when no legal move is left or ``max_stall`` moves pass without a new
    best; moves after the best prefix are undone. Returns the cut reduction.
    """
    n = len(indptr) - 1
    indptr = [int(x) for x in indptr]
    indices = [int(x) for x in indices]
    adjwgt = [float(x) for x in adjwgt]
    vwgt = [float(x) for x in vwgt]
    p = [int(x) for x in part]
    conn = [[0.0] * k for _ in range(n)]
    pwgt = [0.0] * k
    psize = [0] * k
    for v in range(n):
        pwgt[p[v]] += vwgt[v]
        psize[p[v]] += 1
        row = conn[v]
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if u != v:
                row[p[u]] += adjwgt[e]

    start_excess = max(0.0, max(pwgt) - maxpwgt)
    locked = [False] * n
    log = []
    total = 0.0
    best_total = 0.0
    best_len = 0
    while len(log) < n:
        best_gain = 0.0
        best_v = -1
        best_to = -1
        for v in range(n):
            if locked[v]:
                continue
            a = p[v]
            if psize[a] == 1:
                continue
            row = conn[v]
            internal = row[a]
            for b in range(k):
                if b == a:
                    continue
                if pwgt[b] + vwgt[v] > maxpwgt + slack:
                    continue
                g = row[b] - internal
                if best_v < 0 or g > best_gain:
                    best_gain = g
                    best_v = v
                    best_to = b
        if best_v < 0:
            break
        v, b = best_v, best_to
        a = p[v]
        p[v] = b
        pwgt[a] -= vwgt[v]
        pwgt[b] += vwgt[v]
        psize[a] -= 1
        psize[b] += 1
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if u != v:
                conn[u][a] -= adjwgt[e]
                conn[u][b] += adjwgt[e]
        locked[v] = True
        log.append((v, a))
        total += best_gain
        if total > best_total + tol and max(0.0, max(pwgt) - maxpwgt) <= start_excess:
            best_total = total
            best_len = len(log)
        elif len(log) - best_len > max_stall:
            break

    for v, a in reversed(log[best_len:]):
        p[v] = a
    part[:] = p
    return best_total
