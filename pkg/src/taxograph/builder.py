"""Turn a query subgraph into a taxonomy by recursive balanced partitioning."""

import numpy as np
import scipy.sparse as sp

from .partition import PartitionConfig, WorkGraph, num_partitions, partition_kway
from .taxonomy import Taxonomy


def intra_weights(graph, part):
    """Total edge weight from each vertex of ``part`` to the rest of ``part``."""
    members = set(int(v) for v in part)
    out = {}
    for v in members:
        lo, hi = graph.indptr[v], graph.indptr[v + 1]
        total = 0.0
        for pos in range(lo, hi):
            if int(graph.indices[pos]) in members:
                total += float(graph.weights[pos])
        out[v] = total
    return out


def select_label(graph, part):
    """Most central topic of ``part``: largest intra-part weight, then larger
    strength, then lexicographically smallest topic."""
    if len(part) == 0:
        raise ValueError("cannot label an empty part")
    intra = intra_weights(graph, part)
    return min(intra, key=lambda v: (-intra[v], -int(graph.strength[v]), graph.topic(v)))


def _work_graph(graph, vertices):
    sub = graph.weight_matrix()[vertices][:, vertices]
    return WorkGraph(sp.csr_matrix(sub), graph.strength[vertices].astype(np.float64))


def _node_seed(seed, vertex):
    # independent of sibling order, so recursion order cannot change the result
    return np.random.SeedSequence([int(seed), int(vertex) + 1])


def build_taxonomy(subgraph, config=PartitionConfig()):
    """Recursively split the subgraph, promoting each part's label to a child.

    The label is removed from its part before the remainder is split again;
    a remainder smaller than ``min_partition_size`` or without internal edges
    becomes a flat list of leaves under the label. ``tax.meta`` records how
    many splits missed the balance bound or needed the eigen-solver fallback.
    """
    graph = subgraph.graph
    tax = Taxonomy(subgraph.query)
    tax.meta = {"splits": 0, "balance_violations": 0, "eigen_fallbacks": 0,
                "expansion": [graph.topic(t) for t in subgraph.expansion]}
    # -1 stands for the root
    stack = [(0, -1, np.asarray(subgraph.vertices, dtype=np.int64))]
    while stack:
        node, anchor, verts = stack.pop()
        if len(verts) == 0:
            continue
        work = _work_graph(graph, verts)
        if len(verts) < config.min_partition_size or work.n_edges == 0:
            for v in sorted(verts, key=graph.topic):
                tax.add_child(node, graph.topic(v))
            continue
        k = min(num_partitions(len(verts), config), len(verts))
        seed = _node_seed(config.seed, anchor).generate_state(1)[0]
        res = partition_kway(work, k, config, seed=int(seed))
        tax.meta["splits"] += 1
        tax.meta["balance_violations"] += int(not res.balanced)
        tax.meta["eigen_fallbacks"] += int(res.fallback)
        labelled = []
        for p in range(k):
            part = verts[res.assignment == p]
            if len(part) == 0:
                continue
            label = select_label(graph, part)
            labelled.append((graph.topic(label), label, part[part != label]))
        labelled.sort()
        pending = []
        for topic, label, rest in labelled:
            pending.append((tax.add_child(node, topic), label, rest))
        stack.extend(reversed(pending))
    return tax
