"""Strength-balanced k-way graph partitioning.

Multilevel scheme: heavy-edge matching coarsens the graph, recursive spectral
bisection partitions the coarsest level, and FM passes followed by greedy
moves refine the result while projecting back to the original graph. Vertex weights are topic
strengths, so balance means roughly equal total strength per part.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import lobpcg

from . import kernels

logger = logging.getLogger(__name__)

# Laplacians up to this size are solved directly.
DENSE_EIGEN_LIMIT = 500
EIGEN_TOL = 1e-8
EIGEN_MAXITER = 10_000
# FM pass gives up after this many moves without a new best prefix.
FM_MAX_STALL = 50
SMALL_GRAPH = 32


@dataclass(frozen=True)
class PartitionConfig:
    alpha: int = 200
    beta: int = 20
    min_partition_size: int = 5
    balance_epsilon: float = 0.2
    # None means max(30, 4k)
    coarsen_stop: int | None = None
    seed: int = 0
    # spectral start plus (n - 1) greedy-growing starts, best cut kept
    n_init_trials: int = 4

    def __post_init__(self):
        if self.alpha < 1 or self.beta < 1:
            raise ValueError("alpha and beta must be positive integers")
        if self.min_partition_size < 1:
            raise ValueError("min_partition_size must be positive")
        if not 0 < self.balance_epsilon < 1:
            raise ValueError("balance_epsilon must lie in (0, 1)")
        if self.coarsen_stop is not None and self.coarsen_stop < 1:
            raise ValueError("coarsen_stop must be positive")
        if self.n_init_trials < 1:
            raise ValueError("n_init_trials must be >= 1")


def num_partitions(size, config=PartitionConfig()):
    """Number of sub-partitions for a parent of ``size`` vertices (at least 1)."""
    if size < 0:
        raise ValueError("size must be >= 0")
    n = size // config.beta if size < config.alpha else config.alpha // config.beta
    return max(n, 1)


class WorkGraph:
    """Undirected weighted graph in CSR form with vertex weights."""

    def __init__(self, adj, vwgt=None):
        adj = sp.csr_matrix(adj, dtype=np.float64)
        if adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be square")
        adj.eliminate_zeros()
        adj.sort_indices()
        self.adj = adj
        if vwgt is None:
            vwgt = np.asarray(adj.sum(axis=1)).ravel()
        self.vwgt = np.asarray(vwgt, dtype=np.float64)
        if len(self.vwgt) != adj.shape[0]:
            raise ValueError("vertex weight length mismatch")
        self.indptr = adj.indptr.astype(np.int64)
        self.indices = adj.indices.astype(np.int64)
        self.adjwgt = adj.data

    @classmethod
    def from_edges(cls, n, edges, vwgt=None):
        """``edges`` is an iterable of ``(i, j, w)``; parallel edges are summed."""
        edges = list(edges)
        if any(i == j for i, j, _ in edges):
            raise ValueError("self loops are not allowed")
        r = [i for i, j, _ in edges] + [j for i, j, _ in edges]
        c = [j for i, j, _ in edges] + [i for i, j, _ in edges]
        w = [float(x) for *_, x in edges] * 2
        adj = sp.csr_matrix((w, (r, c)), shape=(n, n))
        adj.sum_duplicates()
        return cls(adj, vwgt)

    @property
    def n(self):
        return self.adj.shape[0]

    @property
    def n_edges(self):
        return len(self.indices) // 2

    @property
    def total_vwgt(self):
        return float(self.vwgt.sum())

    def rows(self):
        return np.repeat(np.arange(self.n), np.diff(self.indptr))

    def subgraph(self, verts):
        verts = np.asarray(verts, dtype=np.int64)
        return WorkGraph(self.adj[verts][:, verts], self.vwgt[verts])

    def components(self):
        ncomp, labels = connected_components(self.adj, directed=False)
        return ncomp, labels


@dataclass
class PartitionResult:
    assignment: np.ndarray
    k: int
    cut: float
    part_weights: np.ndarray
    balanced: bool
    # spectral solver failed somewhere and greedy bisection was used
    fallback: bool = False
    levels: int = 1

    @property
    def violation(self):
        return not self.balanced


def _check_assignment(graph, assignment):
    if isinstance(assignment, dict):
        missing = [v for v in range(graph.n) if v not in assignment]
        if missing:
            raise ValueError(f"assignment is partial: {len(missing)} vertices unassigned")
        assignment = [assignment[v] for v in range(graph.n)]
    a = np.asarray(assignment, dtype=np.int64)
    if a.shape != (graph.n,):
        raise ValueError(f"assignment covers {a.size} of {graph.n} vertices")
    if graph.n and a.min() < 0:
        raise ValueError("assignment is partial: negative part index")
    return a


def edge_cut(graph, assignment):
    """Total weight of edges whose endpoints are in different parts."""
    a = _check_assignment(graph, assignment)
    rows = graph.rows()
    mask = (rows < graph.indices) & (a[rows] != a[graph.indices])
    return float(graph.adjwgt[mask].sum())


def part_weights(graph, assignment, k):
    return np.bincount(assignment, weights=graph.vwgt, minlength=k)


def balance_bound(graph, k, config):
    return (1.0 + config.balance_epsilon) * graph.total_vwgt / k


def is_balanced(graph, assignment, k, config):
    return bool(np.all(part_weights(graph, assignment, k) <= balance_bound(graph, k, config)))


# ---------------------------------------------------------------- coarsening

def contract(graph, cmap, nc):
    """Merge vertices by ``cmap``: weights and parallel edges summed, loops dropped."""
    proj = sp.csr_matrix((np.ones(graph.n), (np.arange(graph.n), cmap)), shape=(graph.n, nc))
    coarse = (proj.T @ graph.adj @ proj).tocsr()
    coarse = (coarse - sp.diags(coarse.diagonal())).tocsr()
    coarse.eliminate_zeros()
    return WorkGraph(coarse, np.bincount(cmap, weights=graph.vwgt, minlength=nc))


def _coarse_map(match):
    n = len(match)
    cmap = np.full(n, -1, dtype=np.int64)
    nc = 0
    for v in range(n):
        if cmap[v] == -1:
            cmap[v] = nc
            cmap[match[v]] = nc
            nc += 1
    return cmap, nc


def coarsen(graph, config=PartitionConfig(), k=1, rng=None):
    """Successively smaller graphs by heavy-edge matching.

    Returns ``(levels, maps)`` with ``levels[0] is graph`` and ``maps[l]``
    sending level-``l`` vertices to level ``l + 1``. Stops once the graph has
    at most ``coarsen_stop`` vertices, when a level shrinks by less than 10%,
    or when another level would leave fewer than ``k`` vertices.
    """
    if graph.n == 0:
        raise ValueError("cannot coarsen an empty graph")
    rng = np.random.default_rng(config.seed) if rng is None else rng
    stop = config.coarsen_stop if config.coarsen_stop is not None else max(30, 4 * k)
    stop = max(stop, k)
    levels, maps = [graph], []
    g = graph
    while g.n > stop and g.n_edges > 0:
        maxvwgt = max(1.5 * g.total_vwgt / stop, float(g.vwgt.max()) if g.n else 0.0)
        order = rng.permutation(g.n)
        match = kernels.heavy_edge_matching(g.indptr, g.indices, g.adjwgt, g.vwgt, order, maxvwgt)
        cmap, nc = _coarse_map(match)
        if nc == g.n or nc < k:
            break
        coarse = contract(g, cmap, nc)
        levels.append(coarse)
        maps.append(cmap)
        if nc > 0.9 * g.n:
            break
        g = coarse
    return levels, maps


# ------------------------------------------------------- initial partitioning

def laplacian(graph):
    deg = np.asarray(graph.adj.sum(axis=1)).ravel()
    return (sp.diags(deg) - graph.adj).tocsr()


def fiedler_vector(graph, rng=None):
    """Eigenvector of the second-smallest Laplacian eigenvalue.

    Returns ``(vector, converged)``. The sign is fixed so the entry of largest
    magnitude is positive.
    """
    n = graph.n
    if n < 2:
        return np.zeros(n), True
    lap = laplacian(graph)
    if n <= DENSE_EIGEN_LIMIT:
        _, vecs = np.linalg.eigh(lap.toarray())
        vec, ok = vecs[:, 1], True
    else:
        rng = np.random.default_rng(0) if rng is None else rng
        ones = np.ones((n, 1)) / np.sqrt(n)
        x0 = rng.standard_normal((n, 1))
        try:
            vals, vecs = lobpcg(lap, x0, Y=ones, tol=EIGEN_TOL, maxiter=EIGEN_MAXITER, largest=False)
            vec = vecs[:, 0]
            scale = max(1.0, 2.0 * float(lap.diagonal().max()))
            ok = bool(np.linalg.norm(lap @ vec - vals[0] * vec) <= EIGEN_TOL * scale * np.sqrt(n))
        except (np.linalg.LinAlgError, ValueError):
            vec, ok = np.zeros(n), False
    top = int(np.argmax(np.abs(vec)))
    if vec[top] < 0:
        vec = -vec
    return vec, ok


def greedy_order(graph, start):
    """Graph-growing order: repeatedly take the vertex most connected to the grown set."""
    n = graph.n
    taken = np.zeros(n, dtype=bool)
    conn = np.zeros(n)
    order = []
    v = start
    for _ in range(n):
        taken[v] = True
        order.append(v)
        lo, hi = graph.indptr[v], graph.indptr[v + 1]
        conn[graph.indices[lo:hi]] += graph.adjwgt[lo:hi]
        cand = np.where(taken, -np.inf, conn)
        if not np.any(~taken):
            break
        v = int(np.argmax(cand))
    return np.asarray(order, dtype=np.int64)


def prefix_cuts(graph, order):
    """Edge-cut of splitting ``order`` after each prefix length 0..n."""
    pos = np.empty(graph.n, dtype=np.int64)
    pos[order] = np.arange(graph.n)
    rows = graph.rows()
    keep = rows < graph.indices
    a, b = pos[rows[keep]], pos[graph.indices[keep]]
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    diff = np.zeros(graph.n + 2)
    np.add.at(diff, lo + 1, graph.adjwgt[keep])
    np.add.at(diff, hi + 1, -graph.adjwgt[keep])
    return np.cumsum(diff)[: graph.n + 1]


def _split_point(sub, order, k_left, k_right, eps):
    """Prefix length with the smallest cut among those keeping both sides
    within their share of the bound; closest to the target share otherwise."""
    weights = sub.vwgt[order]
    cum = np.cumsum(weights)
    total = sub.total_vwgt
    k = k_left + k_right
    n = len(weights)
    sizes = np.arange(k_left, n - k_right + 1)
    left = cum[sizes - 1]
    ok = (left <= (1 + eps) * total * k_left / k) & (total - left <= (1 + eps) * total * k_right / k)
    target = total * k_left / k
    if not ok.any():
        return int(sizes[np.argmin(np.abs(left - target))])
    cuts = prefix_cuts(sub, order)[sizes]
    key = np.lexsort((np.abs(left - target), np.where(ok, cuts, np.inf)))
    return int(sizes[key[0]])


def apportion(weights, sizes, k):
    """Parts per component: every component at least one when possible, then
    extra parts go to whichever component has the largest weight per part."""
    m = len(weights)
    quota = np.zeros(m, dtype=np.int64)
    if m <= k:
        quota[:] = 1
    else:
        quota[np.argsort(-np.asarray(weights), kind="stable")[:k]] = 1
    for _ in range(k - int(quota.sum())):
        load = np.where((quota > 0) & (quota < sizes), weights / np.maximum(quota, 1), -np.inf)
        quota[int(np.argmax(load))] += 1
    return quota


class _Bisector:
    def __init__(self, graph, method, rng, config, start=None):
        self.graph = graph
        self.method = method
        self.rng = rng
        self.config = config
        self.fallback = False
        # greedy start for the top-level split; deeper splits draw from rng
        self.start = start

    def order(self, sub):
        if self.method == "spectral":
            vec, ok = fiedler_vector(sub, self.rng)
            if ok:
                return np.lexsort((np.arange(sub.n), vec))
            logger.warning("Fiedler solver did not converge on %d vertices; using greedy bisection", sub.n)
            self.fallback = True
            return greedy_order(sub, int(np.argmax(sub.vwgt)))
        if self.start is not None and sub.n == self.graph.n:
            start, self.start = self.start, None
            return greedy_order(sub, start)
        return greedy_order(sub, int(self.rng.integers(sub.n)))

    def partition(self, verts, k, first, out):
        if k == 1:
            out[verts] = first
            return
        sub = self.graph.subgraph(verts)
        ncomp, labels = sub.components()
        if ncomp == 1:
            self._split(verts, sub, self.order(sub), k, first, out)
            return
        # heaviest component first, ties by lowest member
        cw = np.bincount(labels, weights=sub.vwgt, minlength=ncomp)
        first_member = np.array([np.argmax(labels == c) for c in range(ncomp)])
        comps = sorted(range(ncomp), key=lambda c: (-cw[c], first_member[c]))

        by_component = out.copy()
        self._components(verts, sub, labels, comps, k, first, by_component)
        # alternative: one ordering over all components, cut at the balance point
        chained = out.copy()
        order = []
        for c in comps:
            local = np.flatnonzero(labels == c)
            order.extend(local[self.order(sub.subgraph(local))] if len(local) > 1 else local)
        self._split(verts, sub, np.asarray(order, dtype=np.int64), k, first, chained)

        def quality(assign):
            a = assign[verts] - first
            return (not is_balanced(sub, a, k, self.config), edge_cut(sub, a))

        best = by_component if quality(by_component) <= quality(chained) else chained
        out[verts] = best[verts]

    def _split(self, verts, sub, order, k, first, out):
        k_left = k // 2
        p = _split_point(sub, order, k_left, k - k_left, self.config.balance_epsilon)
        self.partition(verts[np.sort(order[:p])], k_left, first, out)
        self.partition(verts[np.sort(order[p:])], k - k_left, first + k_left, out)

    def _components(self, verts, sub, labels, comps, k, first, out):
        cw = np.bincount(labels, weights=sub.vwgt)
        sizes = np.bincount(labels)
        quota = apportion(cw[comps], sizes[comps], k)
        cursor = first
        leftovers = []
        for c, q in zip(comps, quota):
            members = verts[labels == c]
            if q == 0:
                leftovers.append(members)
                continue
            self.partition(members, int(q), cursor, out)
            cursor += int(q)
        if leftovers:
            pw = np.zeros(k)
            for p in range(k):
                pw[p] = self.graph.vwgt[verts[out[verts] == first + p]].sum()
            for members in leftovers:
                p = int(np.argmin(pw))
                out[members] = first + p
                pw[p] += self.graph.vwgt[members].sum()


def initial_partition(graph, k, config=PartitionConfig(), method="spectral", rng=None, start=None):
    """Recursive bisection of the (coarsest) graph into ``k`` parts.

    Disconnected graphs are split per component first. Returns the assignment
    and whether the spectral solver had to fall back to greedy bisection.
    """
    if k > graph.n:
        raise ValueError(f"cannot split {graph.n} vertices into {k} parts")
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(config.seed) if rng is None else rng
    out = np.full(graph.n, -1, dtype=np.int64)
    bis = _Bisector(graph, method, rng, config, start)
    bis.partition(np.arange(graph.n, dtype=np.int64), k, 0, out)
    return out, bis.fallback


# ----------------------------------------------------------------- refinement

def _tolerance(graph):
    return 1e-10 * max(1.0, float(graph.adjwgt.max()) if len(graph.adjwgt) else 1.0)


def refine(graph, assignment, config=PartitionConfig(), k=None, max_passes=8):
    """Boundary-move refinement; never increases the edge-cut.

    A few FM passes (tentative moves, rolled back to the best prefix that
    is no less balanced than the input) are followed by greedy moves of the single largest positive gain until none
    is left. Every move keeps its target part within the balance bound and
    leaves its source part nonempty.
    """
    part = _check_assignment(graph, assignment).copy()
    if k is None:
        k = int(part.max()) + 1 if graph.n else 1
    if k < 2 or graph.n_edges == 0:
        return part
    bound = balance_bound(graph, k, config)
    tol = _tolerance(graph)
    args = (graph.indptr, graph.indices, graph.adjwgt, graph.vwgt)
    slack = float(graph.vwgt.max())
    for _ in range(max_passes):
        if kernels.fm_pass(*args, part, k, bound, slack, tol, FM_MAX_STALL) <= tol:
            break
    kernels.greedy_refine(*args, part, k, bound, tol)
    return part


def rebalance(graph, assignment, k, config=PartitionConfig()):
    """Move vertices out of overweight parts at the least cut increase.

    Used only when a partition violates the bound; may increase the cut.
    """
    part = np.array(assignment, dtype=np.int64)
    bound = balance_bound(graph, k, config)
    pw = part_weights(graph, part, k)
    psize = np.bincount(part, minlength=k)
    rows = graph.rows()
    conn = np.zeros((graph.n, k))
    np.add.at(conn, (rows, part[graph.indices]), graph.adjwgt)
    for _ in range(graph.n * k):
        over = np.flatnonzero(pw > bound)
        if len(over) == 0:
            break
        a = int(over[np.argmax(pw[over])])
        members = np.flatnonzero(part == a)
        if psize[a] <= 1:
            break
        best = None
        for v in members:
            for b in range(k):
                if b == a or pw[b] + graph.vwgt[v] > bound:
                    continue
                loss = conn[v, a] - conn[v, b]
                key = (loss, -graph.vwgt[v], v, b)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        _, _, v, b = best
        part[v] = b
        pw[a] -= graph.vwgt[v]
        pw[b] += graph.vwgt[v]
        psize[a] -= 1
        psize[b] += 1
        lo, hi = graph.indptr[v], graph.indptr[v + 1]
        nb = graph.indices[lo:hi]
        np.add.at(conn, (nb, np.full(len(nb), a)), -graph.adjwgt[lo:hi])
        np.add.at(conn, (nb, np.full(len(nb), b)), graph.adjwgt[lo:hi])
    return part


def _polish(graph, part, k, config):
    if not is_balanced(graph, part, k, config):
        part = rebalance(graph, part, k, config)
    return refine(graph, part, config, k)


def partition_kway(graph, k, config=PartitionConfig(), seed=None):
    """Minimize edge-cut subject to part strength <= (1 + eps) * mean.

    Balance is best effort: ``PartitionResult.balanced`` is False when the
    returned assignment still violates the bound.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if graph.n == 0:
        raise ValueError("cannot partition an empty graph")
    if k > graph.n:
        raise ValueError(f"cannot split {graph.n} vertices into {k} parts")
    rng = np.random.default_rng(config.seed if seed is None else seed)
    if k == 1:
        a = np.zeros(graph.n, dtype=np.int64)
        return PartitionResult(a, 1, 0.0, part_weights(graph, a, 1), True)

    levels, maps = coarsen(graph, config, k, rng)
    coarsest = levels[-1]
    best = None
    fallback = False
    # distinct greedy starts; a small coarsest graph tries every start
    if coarsest.n <= SMALL_GRAPH:
        starts = list(range(coarsest.n))
    else:
        starts = [int(v) for v in rng.permutation(coarsest.n)[: config.n_init_trials - 1]]
    trials = [("spectral", None)] + [("greedy", v) for v in starts]
    for trial, (method, start) in enumerate(trials):
        part, fb = initial_partition(coarsest, k, config, method, rng, start)
        fallback |= fb
        part = _polish(coarsest, part, k, config)
        key = (not is_balanced(coarsest, part, k, config), edge_cut(coarsest, part), trial)
        if best is None or key < best[0]:
            best = (key, part)
    part = best[1]

    for level in range(len(maps) - 1, -1, -1):
        part = part[maps[level]]
        part = _polish(levels[level], part, k, config)

    return PartitionResult(
        assignment=part,
        k=k,
        cut=edge_cut(graph, part),
        part_weights=part_weights(graph, part, k),
        balanced=is_balanced(graph, part, k, config),
        fallback=fallback,
        levels=len(levels),
    )
