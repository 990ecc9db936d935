import numpy as np
import pytest

from taxograph.corpus import Document
from taxograph.extraction import CooccurrenceCounts, TopicSet, count_cooccurrence
from taxograph.graph import (GraphConfig, GraphConfigMismatch, GraphFormatError, all_strengths, build_graph,
                             compute_strength, conditional_rank, edge_weight, jaccard, read_graph, write_graph)

from conftest import counts_from_dense, random_counts, random_topics, topic_graph
from oracles import rank_oracle, strength_oracle, weight_oracle


def test_strength_examples():
    cc = CooccurrenceCounts.from_pairs(3, {(0, 1): 3, (0, 2): 5})
    assert compute_strength(cc, 0) == 8
    cc = CooccurrenceCounts.from_pairs(3, {(0, 1): 3})
    assert compute_strength(cc, 2) == 0
    with pytest.raises(KeyError):
        compute_strength(cc, 3)


def test_strength_matches_row_sums():
    rng = np.random.default_rng(0)
    dense = random_counts(rng, 20)
    cc = counts_from_dense(dense)
    assert list(all_strengths(cc)) == strength_oracle(dense)
    assert [compute_strength(cc, i) for i in range(20)] == strength_oracle(dense)


def test_rank_single_neighbour():
    cc = CooccurrenceCounts.from_pairs(2, {(0, 1): 4})
    assert conditional_rank(cc, all_strengths(cc), 0, 1) == 1


def test_rank_synthetic_competitors():
    # t_j = 0; competitors a=1 (10), b=2 (7), c=3 (7), i=4 (5); all stronger than t_j via extra edges
    pairs = {(0, 1): 10, (0, 2): 7, (0, 3): 7, (0, 4): 5}
    for h in range(1, 5):
        pairs[(h, 5)] = 100
    cc = CooccurrenceCounts.from_pairs(6, pairs)
    s = all_strengths(cc)
    assert all(s[h] > s[0] for h in range(1, 5))
    assert conditional_rank(cc, s, 4, 0) == 4
    # tied counts do not push each other down
    assert conditional_rank(cc, s, 2, 0) == 2
    assert conditional_rank(cc, s, 3, 0) == 2


def test_rank_undefined_without_cooccurrence():
    cc = CooccurrenceCounts.from_pairs(3, {(0, 1): 1})
    with pytest.raises(ValueError):
        conditional_rank(cc, all_strengths(cc), 0, 2)


def vertex_cover_corpus():
    """Abstracts arranged so two strong topics lead the neighbours of "vertex cover"."""
    docs = []
    add = lambda text: docs.append(Document(f"d{len(docs)}", text, ""))
    for _ in range(6):
        add("vertex cover approximation algorithm")
    for _ in range(4):
        add("vertex cover np complete")
    for _ in range(2):
        add("vertex cover graph theory")
    for _ in range(20):
        add("approximation algorithm np complete linear programming")
    return docs


def test_vertex_cover_anchor():
    ts = TopicSet(("approximation algorithm", "graph theory", "linear programming", "np complete", "vertex cover"))
    cc = count_cooccurrence(vertex_cover_corpus(), ts)
    s = all_strengths(cc)
    vc = ts.id_of("vertex cover")
    assert conditional_rank(cc, s, ts.id_of("approximation algorithm"), vc) == 1
    assert conditional_rank(cc, s, ts.id_of("np complete"), vc) == 2
    g = build_graph(ts, cc)
    assert g.rank(ts.id_of("np complete"), given=vc) == 2


def test_jaccard_examples():
    assert jaccard("machine translation", "statistical machine translation") == pytest.approx(2 / 3)
    assert jaccard("graph cut", "graph cut") == 1.0
    assert jaccard("graph cut", "vertex cover") == 0.0


def test_edge_weight_formula():
    # count 10, i is t_j's only neighbour (rank 1), no shared words
    cc = CooccurrenceCounts.from_pairs(2, {(0, 1): 10})
    ts = TopicSet(("graph cut", "vertex cover"))
    s = all_strengths(cc)
    assert edge_weight(0, 1, ts, cc, s, GraphConfig()) == 20.0
    assert edge_weight(0, 1, ts, cc, s, GraphConfig(0.0, 0.0)) == 10.0
    with pytest.raises(ValueError):
        edge_weight(0, 0, ts, cc, s, GraphConfig())


def test_config_validation():
    with pytest.raises(ValueError):
        GraphConfig(-1.0, 0.0)
    with pytest.raises(ValueError):
        GraphConfig(float("nan"), 0.0)


def test_build_small_examples():
    g = topic_graph(["a b", "c d"], {("a b", "c d"): 1}, GraphConfig(0, 0))
    assert g.n_edges == 1 and g.weight(0, 1) == 1.0
    assert list(g.strength) == [1, 1] and list(g.degree) == [1, 1]
    g = topic_graph(["a", "b", "c"], {("a", "b"): 3, ("a", "c"): 4, ("b", "c"): 5}, GraphConfig(0, 0))
    assert list(g.strength) == [7, 8, 9]


def test_build_rejects_dangling_ids():
    cc = CooccurrenceCounts.from_pairs(3, {(0, 2): 1})
    with pytest.raises(ValueError):
        build_graph(TopicSet(("a b", "c d")), cc)


@pytest.mark.parametrize("seed", range(5))
def test_build_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    ts = random_topics(rng, 30)
    dense = random_counts(rng, 30, density=0.25, high=8)
    lam1, lam2 = float(rng.uniform(0, 2)), float(rng.uniform(0, 2))
    g = build_graph(ts, counts_from_dense(dense), GraphConfig(lam1, lam2))
    assert list(g.strength) == strength_oracle(dense)
    assert list(g.degree) == [int(np.count_nonzero(r)) for r in dense]
    for i in range(30):
        for j in range(30):
            if dense[i, j]:
                assert g.count(i, j) == dense[i, j]
                assert g.rank(i, given=j) == rank_oracle(dense, i, j)
                assert g.weight(i, j) == pytest.approx(weight_oracle(dense, ts.topics, i, j, lam1, lam2), rel=1e-12)
                assert g.weight(i, j) == g.weight(j, i)
                assert g.weight(i, j) >= dense[i, j]
            else:
                assert g.weight(i, j) == 0.0
    # handshake
    assert g.strength.sum() == 2 * sum(c for *_, c, _ in g.edges())


def test_graph_file_roundtrip(tmp_path):
    rng = np.random.default_rng(7)
    ts = random_topics(rng, 15)
    g = build_graph(ts, counts_from_dense(random_counts(rng, 15)), GraphConfig(0.5, 0.25))
    write_graph(tmp_path / "g.tsv", g)
    h = read_graph(tmp_path / "g.tsv", expect=GraphConfig(0.5, 0.25))
    assert h.topics.topics == g.topics.topics
    assert np.array_equal(h.weights, g.weights)
    assert np.array_equal(h.ranks, g.ranks)
    assert list(h.edges()) == list(g.edges())
    write_graph(tmp_path / "g2.tsv", h)
    assert (tmp_path / "g.tsv").read_bytes() == (tmp_path / "g2.tsv").read_bytes()


def test_graph_file_lambda_stamp(tmp_path):
    g = topic_graph(["a b", "c d"], {("a b", "c d"): 2})
    write_graph(tmp_path / "g.tsv", g)
    with pytest.raises(GraphConfigMismatch):
        read_graph(tmp_path / "g.tsv", expect=GraphConfig(1.0, 0.0))


def test_graph_file_errors(tmp_path):
    p = tmp_path / "g.tsv"
    p.write_text("V\t0\t1\t1\ta b\n")
    with pytest.raises(GraphFormatError, match="header"):
        read_graph(p)
    p.write_text("H\tlambda1\t1.0\tlambda2\t1.0\nX\t1\n")
    with pytest.raises(GraphFormatError):
        read_graph(p)
