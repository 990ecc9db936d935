"""Topic association graph: vertex strength/degree, conditional rank, edge weights."""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .extraction import TopicSet

GRAPH_FORMAT = "taxograph-graph 1"


class GraphFormatError(ValueError):
    pass


class GraphConfigMismatch(ValueError):
    """A cached graph was built with different lambda values than requested."""


@dataclass(frozen=True)
class GraphConfig:
    lambda1: float = 1.0
    lambda2: float = 1.0

    def __post_init__(self):
        for name in ("lambda1", "lambda2"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")


def _check_topic(counts, topic):
    if not 0 <= topic < counts.n_topics:
        raise KeyError(f"unknown topic id {topic}")


def compute_strength(counts, topic):
    """Sum of ``count(topic, j)`` over every co-occurring topic ``j``."""
    _check_topic(counts, topic)
    mask = (counts.rows == topic) | (counts.cols == topic)
    return int(counts.counts[mask].sum())


def all_strengths(counts):
    n = counts.n_topics
    return (np.bincount(counts.rows, weights=counts.counts, minlength=n)
            + np.bincount(counts.cols, weights=counts.counts, minlength=n)).astype(np.int64)


def conditional_rank(counts, strengths, t_i, t_j):
    """Rank of ``t_i`` among the topics co-occurring with ``t_j``.

    Only competitors stronger than ``t_j`` are counted, and since every
    conditional probability shares the denominator of ``t_j``, raw counts are
    compared directly. Ties do not push the rank down.
    """
    _check_topic(counts, t_i)
    _check_topic(counts, t_j)
    c_ij = counts.get(t_i, t_j)
    if c_ij <= 0:
        raise ValueError(f"rank undefined: topics {t_i} and {t_j} never co-occur")
    s_j = strengths[t_j]
    rank = 1
    for (a, b), c in counts.items():
        if t_j not in (a, b):
            continue
        h = b if a == t_j else a
        if strengths[h] > s_j and c > c_ij:
            rank += 1
    return rank


def jaccard(a, b):
    wa, wb = set(a.split()), set(b.split())
    if not wa or not wb:
        raise ValueError("jaccard needs two nonempty topics")
    return len(wa & wb) / len(wa | wb)


def edge_weight(t_i, t_j, topics, counts, strengths, config):
    c = counts.get(t_i, t_j)
    if c <= 0:
        raise ValueError(f"no edge between topics {t_i} and {t_j}")
    top = (conditional_rank(counts, strengths, t_i, t_j) == 1
           or conditional_rank(counts, strengths, t_j, t_i) == 1)
    jac = jaccard(topics.topics[t_i], topics.topics[t_j])
    return (1.0 + config.lambda1 * float(top) + config.lambda2 * jac) * c


def _row_ranks(indptr, indices, data, strength):
    """rank(col | row) for every stored CSR entry."""
    ranks = np.ones(len(data), dtype=np.int64)
    for j in range(len(indptr) - 1):
        lo, hi = indptr[j], indptr[j + 1]
        if lo == hi:
            continue
        nb = indices[lo:hi]
        c = data[lo:hi]
        strong = np.sort(c[strength[nb] > strength[j]])
        ranks[lo:hi] = 1 + len(strong) - np.searchsorted(strong, c, side="right")
    return ranks


class TopicGraph:
    """Undirected weighted topic graph in symmetric CSR form.

    ``counts``, ``weights`` and ``ranks`` are aligned with ``indices``; the
    entry for row ``j`` column ``i`` holds ``count(i, j)``, ``w_ij`` and
    ``rank(i | j)``.
    """

    def __init__(self, topics, strength, degree, indptr, indices, counts, weights, config, ranks=None):
        self.topics = topics
        self.config = config
        self.strength = np.asarray(strength, dtype=np.int64)
        self.degree = np.asarray(degree, dtype=np.int64)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.counts = np.asarray(counts, dtype=np.int64)
        self.weights = np.asarray(weights, dtype=np.float64)
        if ranks is None:
            ranks = _row_ranks(self.indptr, self.indices, self.counts, self.strength)
        self.ranks = ranks

    @property
    def n(self):
        return len(self.topics)

    @property
    def n_edges(self):
        return len(self.indices) // 2

    def topic(self, i):
        return self.topics.topics[i]

    def _entry(self, i, j):
        lo, hi = self.indptr[i], self.indptr[i + 1]
        pos = lo + np.searchsorted(self.indices[lo:hi], j)
        if pos < hi and self.indices[pos] == j:
            return pos
        return None

    def neighbors(self, i):
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def count(self, i, j):
        pos = self._entry(i, j)
        return 0 if pos is None else int(self.counts[pos])

    def weight(self, i, j):
        pos = self._entry(i, j)
        return 0.0 if pos is None else float(self.weights[pos])

    def rank(self, i, given):
        """rank(i | given); raises if the two topics do not co-occur."""
        pos = self._entry(given, i)
        if pos is None:
            raise ValueError(f"rank undefined: topics {i} and {given} never co-occur")
        return int(self.ranks[pos])

    def edges(self):
        """Yield ``(i, j, count, weight)`` once per edge with ``i < j``."""
        for i in range(self.n):
            for pos in range(self.indptr[i], self.indptr[i + 1]):
                j = self.indices[pos]
                if i < j:
                    yield i, int(j), int(self.counts[pos]), float(self.weights[pos])

    def weight_matrix(self):
        return sp.csr_matrix((self.weights, self.indices, self.indptr), shape=(self.n, self.n))


def build_graph(topics, counts, config=GraphConfig()):
    n = len(topics)
    if counts.n_topics != n:
        raise ValueError(f"counts cover {counts.n_topics} topics but the topic set has {n}")
    rows = np.concatenate([counts.rows, counts.cols])
    cols = np.concatenate([counts.cols, counts.rows])
    data = np.concatenate([counts.counts, counts.counts])
    mat = sp.csr_matrix((data, (rows, cols)), shape=(n, n), dtype=np.int64)
    mat.sort_indices()
    indptr, indices, cdata = mat.indptr.astype(np.int64), mat.indices.astype(np.int64), mat.data
    strength = all_strengths(counts)
    degree = np.diff(indptr)
    ranks = _row_ranks(indptr, indices, cdata, strength)

    # transpose[k] is the position of the mirror entry of entry k
    row_of = np.repeat(np.arange(n), np.diff(indptr))
    transpose = np.lexsort((row_of, indices))
    first = ranks == 1
    indicator = first | first[transpose]

    words = [set(t.split()) for t in topics.topics]
    jac = np.array([len(words[a] & words[b]) / len(words[a] | words[b])
                    for a, b in zip(row_of, indices)], dtype=np.float64)
    weights = (1.0 + config.lambda1 * indicator + config.lambda2 * jac) * cdata
    return TopicGraph(topics, strength, degree, indptr, indices, cdata, weights, config, ranks)


def write_graph(path, graph):
    cfg = graph.config
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {GRAPH_FORMAT}\n")
        fh.write(f"H\tlambda1\t{cfg.lambda1!r}\tlambda2\t{cfg.lambda2!r}\n")
        for i in range(graph.n):
            fh.write(f"V\t{i}\t{graph.strength[i]}\t{graph.degree[i]}\t{graph.topic(i)}\n")
        for i, j, c, w in graph.edges():
            fh.write(f"E\t{i}\t{j}\t{c}\t{w!r}\n")


def read_graph(path, expect=None):
    """Load a graph file; with ``expect`` (a GraphConfig) refuse a stale cache."""
    header = None
    names, strength, degree = [], [], []
    erows, ecols, ecounts, eweights = [], [], [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            tag = parts[0]
            try:
                if tag == "H":
                    kv = dict(zip(parts[1::2], parts[2::2]))
                    header = GraphConfig(float(kv["lambda1"]), float(kv["lambda2"]))
                elif tag == "V":
                    if int(parts[1]) != len(names):
                        raise GraphFormatError(f"{path}:{lineno}: vertex ids must be consecutive")
                    strength.append(int(parts[2]))
                    degree.append(int(parts[3]))
                    names.append(parts[4] if len(parts) > 4 else str(parts[1]))
                elif tag == "E":
                    erows.append(int(parts[1]))
                    ecols.append(int(parts[2]))
                    ecounts.append(int(parts[3]))
                    eweights.append(float(parts[4]))
                else:
                    raise GraphFormatError(f"{path}:{lineno}: unknown record tag {tag!r}")
            except (IndexError, KeyError, ValueError) as exc:
                if isinstance(exc, GraphFormatError):
                    raise
                raise GraphFormatError(f"{path}:{lineno}: malformed line ({exc})") from exc
    if header is None:
        raise GraphFormatError(f"{path}: missing lambda header")
    if expect is not None and (expect.lambda1, expect.lambda2) != (header.lambda1, header.lambda2):
        raise GraphConfigMismatch(
            f"{path} was built with lambda1={header.lambda1}, lambda2={header.lambda2}; "
            f"requested lambda1={expect.lambda1}, lambda2={expect.lambda2}"
        )
    n = len(names)
    rows = np.array(erows + ecols, dtype=np.int64)
    cols = np.array(ecols + erows, dtype=np.int64)
    if len(rows) and (rows.min() < 0 or rows.max() >= n):
        raise GraphFormatError(f"{path}: edge references unknown vertex")
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    cdata = np.array(ecounts + ecounts, dtype=np.int64)[order]
    wdata = np.array(eweights + eweights, dtype=np.float64)[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    topics = TopicSet(tuple(names))
    g = TopicGraph(topics, strength, degree, indptr, cols, cdata, wdata, header)
    s_check = np.bincount(rows, weights=cdata, minlength=n).astype(np.int64)
    if not np.array_equal(s_check, g.strength) or not np.array_equal(np.diff(indptr), g.degree):
        raise GraphFormatError(f"{path}: vertex strength/degree inconsistent with edges")
    return g
