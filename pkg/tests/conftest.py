import json
from pathlib import Path

import numpy as np
import pytest

from taxograph.extraction import CooccurrenceCounts, TopicSet
from taxograph.graph import GraphConfig, build_graph
from taxograph.partition import WorkGraph

DATA = Path(__file__).parent / "data"


def topic_graph(names, pairs, config=GraphConfig()):
    """TopicGraph from topic names and ``{(name_a, name_b): count}``."""
    names = sorted(names)
    idx = {t: i for i, t in enumerate(names)}
    cc = CooccurrenceCounts.from_pairs(len(names), {(idx[a], idx[b]): c for (a, b), c in pairs.items()})
    return build_graph(TopicSet(tuple(names)), cc, config)


def random_counts(rng, n, density=0.3, high=20):
    dense = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                dense[i, j] = dense[j, i] = rng.integers(1, high + 1)
    return dense


def counts_from_dense(dense):
    n = len(dense)
    return CooccurrenceCounts.from_pairs(
        n, {(i, j): int(dense[i, j]) for i in range(n) for j in range(i + 1, n) if dense[i, j]})


WORDS = ["graph", "model", "network", "data", "learning", "search", "query", "system",
         "vector", "machine", "language", "index"]


def random_topics(rng, n):
    out = set()
    while len(out) < n:
        k = int(rng.integers(2, 4))
        out.add(" ".join(rng.choice(WORDS, size=k, replace=False)))
    return TopicSet(tuple(sorted(out)))


def planted_graph(sizes, intra=10.0, inter=1.0, seed=0, inter_prob=0.05):
    """Complete communities with sparse weak links between them."""
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(len(sizes)), sizes)
    n = len(labels)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if labels[i] == labels[j]:
                edges.append((i, j, intra))
            elif rng.random() < inter_prob:
                edges.append((i, j, inter))
    return WorkGraph.from_edges(n, edges), labels


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r) + "\n")


@pytest.fixture
def corpus_path():
    return DATA / "corpus.jsonl"


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
