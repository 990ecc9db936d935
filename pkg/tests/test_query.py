import numpy as np
import pytest

from taxograph.graph import GraphConfig, build_graph
from taxograph.query import QueryConfig, QueryError, expand_query, query_subgraph, select_subgraph

from conftest import counts_from_dense, random_counts, random_topics, topic_graph
from oracles import rank_oracle, strength_oracle


def filter_oracle(dense, t0, cfg):
    s = strength_oracle(dense)
    out = []
    for i in range(len(dense)):
        if i == t0 or not dense[t0][i]:
            continue
        k = int(np.count_nonzero(dense[i]))
        if rank_oracle(dense, t0, i) <= cfg.r_max and k >= cfg.k_min and s[i] >= cfg.s_min and s[i] < s[t0]:
            out.append(i)
    return out


@pytest.mark.parametrize("seed", range(6))
def test_membership_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    dense = random_counts(rng, 40, density=0.4, high=12)
    # make topic 0 the hub so it has plenty of weaker neighbours
    dense[0, 1:] = dense[1:, 0] = rng.integers(5, 30, size=39)
    g = build_graph(random_topics(rng, 40), counts_from_dense(dense), GraphConfig())
    cfg = QueryConfig(r_max=3, k_min=int(rng.integers(5, 15)), s_min=int(rng.integers(20, 120)), max_vertices=None)
    sub = select_subgraph(g, 0, cfg)
    assert list(sub.vertices) == filter_oracle(dense, 0, cfg)
    assert 0 not in sub.vertices
    members = set(sub.vertices.tolist())
    induced = {(i, j) for i, j, _ in sub.edges()}
    assert induced == {(i, j) for i, j, *_ in g.edges() if i in members and j in members}


def test_monotone_in_thresholds():
    rng = np.random.default_rng(1)
    dense = random_counts(rng, 40, density=0.5, high=10)
    dense[0, 1:] = dense[1:, 0] = rng.integers(5, 30, size=39)
    g = build_graph(random_topics(rng, 40), counts_from_dense(dense))
    base = set(select_subgraph(g, 0, QueryConfig(3, 8, 40, max_vertices=None)).vertices.tolist())
    for cfg in (QueryConfig(3, 12, 40, max_vertices=None), QueryConfig(3, 8, 80, max_vertices=None),
                QueryConfig(1, 8, 40, max_vertices=None)):
        assert set(select_subgraph(g, 0, cfg).vertices.tolist()) <= base


def star_fixture(extra_degree=10):
    """Hub "machine translation" with spokes that each have their own leaves."""
    pairs = {}
    names = ["machine translation"]
    for s in range(3):
        spoke = f"spoke{s} topic"
        names.append(spoke)
        pairs[("machine translation", spoke)] = 50
        for leaf in range(extra_degree):
            name = f"leaf{s}x{leaf} item"
            names.append(name)
            pairs[(spoke, name)] = 2
    return names, pairs


def test_degree_threshold_boundary():
    names, pairs = star_fixture(extra_degree=9)  # spokes have degree 10
    g = topic_graph(names, pairs)
    t0 = g.topics.id_of("machine translation")
    assert len(select_subgraph(g, t0, QueryConfig(k_min=10, s_min=1)).vertices) == 3
    assert len(select_subgraph(g, t0, QueryConfig(k_min=11, s_min=1)).vertices) == 0


def test_only_strong_neighbour_is_rank_one():
    names, pairs = star_fixture()
    g = topic_graph(names, pairs)
    t0 = g.topics.id_of("machine translation")
    spoke = g.topics.id_of("spoke0 topic")
    assert g.rank(t0, given=spoke) == 1
    assert spoke in select_subgraph(g, t0, QueryConfig(s_min=1)).vertices


def test_cap_keeps_highest_query_counts():
    names, pairs = star_fixture()
    pairs[("machine translation", "spoke1 topic")] = 60
    g = topic_graph(names, pairs)
    t0 = g.topics.id_of("machine translation")
    sub = select_subgraph(g, t0, QueryConfig(s_min=1, max_vertices=1))
    assert [g.topic(v) for v in sub.vertices] == ["spoke1 topic"]


def test_unknown_topic_id():
    g = topic_graph(["a b", "c d"], {("a b", "c d"): 1})
    with pytest.raises(QueryError):
        select_subgraph(g, 5)


def expansion_fixture():
    heads = ["database system", "relational database", "large database", "database tuning"]
    pairs = {}
    names = list(heads) + ["query optimization"]
    for h_i, h in enumerate(heads):
        pairs[(h, "query optimization")] = 1
        for leaf in range(12):
            name = f"topic{h_i}x{leaf} thing"
            if name not in names:
                names.append(name)
            pairs[(h, name)] = 30 - h_i
            for other in range(12):
                if other != leaf:
                    pairs[(name, f"topic{h_i}x{other} thing")] = 1
    return topic_graph(names, pairs)


def test_unigram_expansion_picks_top_three():
    g = expansion_fixture()
    sub = query_subgraph(g, "database", QueryConfig(k_min=5, s_min=1))
    chosen = [g.topic(t) for t in sub.expansion]
    # all share one word out of two, so strength decides
    assert chosen == ["database system", "relational database", "large database"]
    assert sub.query == "database" and sub.query_id is None
    union = set()
    for t in sub.expansion:
        union |= set(select_subgraph(g, t, QueryConfig(k_min=5, s_min=1, max_vertices=None)).vertices.tolist())
    assert set(sub.vertices.tolist()) == union
    assert len(sub.vertices) == len(set(sub.vertices.tolist()))


def test_expansion_with_single_candidate():
    g = expansion_fixture()
    sub = expand_query(g, "tuning", QueryConfig(k_min=5, s_min=1))
    assert [g.topic(t) for t in sub.expansion] == ["database tuning"]


def test_query_dispatch_errors():
    g = expansion_fixture()
    with pytest.raises(QueryError, match="no expansion"):
        query_subgraph(g, "zebra")
    with pytest.raises(QueryError, match="unknown topic"):
        query_subgraph(g, "zebra crossing")
    with pytest.raises(QueryError):
        expand_query(g, "database system")
