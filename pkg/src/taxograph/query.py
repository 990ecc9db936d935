"""Query-specific subgraph selection, with unigram query expansion."""

from dataclasses import dataclass, field

import numpy as np

from .corpus import normalize
from .graph import jaccard


class QueryError(ValueError):
    pass


@dataclass(frozen=True)
class QueryConfig:
    r_max: int = 3
    k_min: int = 10
    s_min: int = 20
    expansion_k: int = 3
    # None disables the cap
    max_vertices: int | None = 200

    def __post_init__(self):
        for name in ("r_max", "k_min", "s_min", "expansion_k"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.max_vertices is not None and self.max_vertices < 1:
            raise ValueError("max_vertices must be positive or None")


@dataclass
class Subgraph:
    graph: object
    query: str
    vertices: np.ndarray
    query_id: int | None = None
    expansion: tuple = ()
    # count(t_0, t_i) per vertex; summed over expansion topics for a pseudo-query
    query_counts: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_vertices(cls, graph, query, vertices):
        qid = graph.topics.get(query)
        return cls(graph, query, np.array(sorted(set(int(v) for v in vertices)), dtype=np.int64), qid)

    def __len__(self):
        return len(self.vertices)

    def topics(self):
        return [self.graph.topic(v) for v in self.vertices]

    def edges(self):
        """Induced edges ``(i, j, weight)`` with ``i < j`` in parent ids."""
        members = set(self.vertices.tolist())
        g = self.graph
        for i in self.vertices:
            for pos in range(g.indptr[i], g.indptr[i + 1]):
                j = int(g.indices[pos])
                if j > i and j in members:
                    yield int(i), j, float(g.weights[pos])


def _qualifying(graph, t0, config):
    """Neighbours of ``t0`` passing the rank, degree and strength filters."""
    s0 = graph.strength[t0]
    out = {}
    for pos in range(graph.indptr[t0], graph.indptr[t0 + 1]):
        i = int(graph.indices[pos])
        if graph.degree[i] < config.k_min or graph.strength[i] < config.s_min:
            continue
        if graph.strength[i] >= s0:
            continue
        if graph.rank(t0, given=i) > config.r_max:
            continue
        out[i] = int(graph.counts[pos])
    return out


def _cap(graph, scored, limit):
    ids = sorted(scored, key=lambda i: (-scored[i], -int(graph.strength[i]), i))
    if limit is not None:
        ids = ids[:limit]
    return np.array(sorted(ids), dtype=np.int64)


def select_subgraph(graph, t0, config=QueryConfig()):
    """Topics co-occurring with ``t0`` that are weaker than it and rank it
    within ``r_max``, subject to the degree and strength floors."""
    if not 0 <= t0 < graph.n:
        raise QueryError(f"unknown query topic id {t0}")
    scored = _qualifying(graph, t0, config)
    verts = _cap(graph, scored, config.max_vertices)
    return Subgraph(graph, graph.topic(t0), verts, t0, (), {int(v): scored[int(v)] for v in verts})


def expansion_topics(graph, term, k):
    sims = []
    for i, t in enumerate(graph.topics.topics):
        j = jaccard(term, t)
        if j > 0:
            sims.append((-j, -int(graph.strength[i]), t, i))
    sims.sort()
    return [i for *_, i in sims[:k]]


def expand_query(graph, term, config=QueryConfig()):
    """Pseudo-query for a term that is not itself a topic: the union of the
    subgraphs of the ``expansion_k`` lexically closest topics."""
    term = " ".join(normalize(term))
    if not term:
        raise QueryError("empty query")
    if term in graph.topics:
        raise QueryError(f"{term!r} is a known topic; use select_subgraph")
    chosen = expansion_topics(graph, term, config.expansion_k)
    if not chosen:
        raise QueryError(f"no expansion: no topic shares a word with {term!r}")
    scored = {}
    for t in chosen:
        for i, c in _qualifying(graph, t, config).items():
            scored[i] = scored.get(i, 0) + c
    verts = _cap(graph, scored, config.max_vertices)
    return Subgraph(graph, term, verts, None, tuple(chosen), {int(v): scored[int(v)] for v in verts})


def query_subgraph(graph, query, config=QueryConfig()):
    """Dispatch a query string: known topic, or single-word expansion."""
    q = " ".join(normalize(query))
    tid = graph.topics.get(q)
    if tid is not None:
        return select_subgraph(graph, tid, config)
    if len(q.split()) == 1:
        return expand_query(graph, q, config)
    raise QueryError(f"unknown topic {q!r} (only single words are expanded)")
