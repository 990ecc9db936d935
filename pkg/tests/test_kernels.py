import numpy as np
import pytest

from taxograph import kernels
from taxograph.partition import WorkGraph, edge_cut

py = kernels.get_backend("python")
needs_compiled = pytest.mark.skipif(not kernels.compiled_available(), reason="compiled kernels not built")


def graph(seed, n=40, p=0.15):
    rng = np.random.default_rng(seed)
    edges = [(i, j, float(rng.integers(1, 9))) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return WorkGraph.from_edges(n, edges), rng


def backends():
    out = [py]
    if kernels.compiled_available():
        out.append(kernels.get_backend("cython"))
    return out


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@pytest.mark.parametrize("impl", backends(), ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_pair_keys(impl):
    keys = impl.pair_keys(np.array([0, 3, 3, 5]), np.array([1, 4, 7, 0, 2]), 10)
    assert list(keys) == [14, 17, 47, 2]


@pytest.mark.parametrize("impl", backends(), ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_matching_is_valid(impl):
    g, rng = graph(1)
    match = impl.heavy_edge_matching(g.indptr, g.indices, g.adjwgt, g.vwgt, rng.permutation(g.n), 1e18)
    for v, u in enumerate(match):
        assert match[u] == v
        if u != v:
            assert g.adj[v, u] > 0


@pytest.mark.parametrize("impl", backends(), ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_greedy_refine_reduces_cut(impl):
    g, rng = graph(2)
    part = rng.integers(0, 3, size=g.n)
    before = edge_cut(g, part)
    out = part.copy()
    impl.greedy_refine(g.indptr, g.indices, g.adjwgt, g.vwgt, out, 3, 1e18, 1e-9)
    assert edge_cut(g, out) <= before


@needs_compiled
@pytest.mark.parametrize("seed", range(20))
def test_backends_agree(seed):
    cy = kernels.get_backend("cython")
    g, rng = graph(seed, n=int(np.random.default_rng(seed).integers(10, 60)))
    order = rng.permutation(g.n)
    maxv = float(g.vwgt.sum()) / 5
    assert np.array_equal(py.heavy_edge_matching(g.indptr, g.indices, g.adjwgt, g.vwgt, order, maxv),
                          cy.heavy_edge_matching(g.indptr, g.indices, g.adjwgt, g.vwgt, order, maxv))
    k = int(rng.integers(2, 5))
    part = rng.integers(0, k, size=g.n)
    bound = 1.2 * g.total_vwgt / k
    a, b = part.copy(), part.copy()
    ma = py.greedy_refine(g.indptr, g.indices, g.adjwgt, g.vwgt, a, k, bound, 1e-10)
    mb = cy.greedy_refine(g.indptr, g.indices, g.adjwgt, g.vwgt, b, k, bound, 1e-10)
    assert ma == mb and np.array_equal(a, b)
    a, b = part.copy(), part.copy()
    ga = py.fm_pass(g.indptr, g.indices, g.adjwgt, g.vwgt, a, k, bound, float(g.vwgt.max()), 1e-10, 50)
    gb = cy.fm_pass(g.indptr, g.indices, g.adjwgt, g.vwgt, b, k, bound, float(g.vwgt.max()), 1e-10, 50)
    assert ga == gb and np.array_equal(a, b)
    ids = np.sort(rng.choice(30, size=8, replace=False))
    indptr = np.array([0, 3, 3, 8])
    assert np.array_equal(py.pair_keys(indptr, ids, 30), cy.pair_keys(indptr, ids, 30))


@pytest.mark.parametrize("impl", backends(), ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_fm_pass_keeps_balance_and_cut(impl):
    for seed in range(30):
        g, rng = graph(seed + 100, n=30)
        k = 2
        part = np.arange(g.n) % 2
        bound = 1.2 * g.total_vwgt / k
        start_cut = edge_cut(g, part)
        gain = impl.fm_pass(g.indptr, g.indices, g.adjwgt, g.vwgt, part, k, bound, float(g.vwgt.max()), 1e-10, 50)
        assert gain >= 0
        assert edge_cut(g, part) == pytest.approx(start_cut - gain)
        pw = np.bincount(part, weights=g.vwgt, minlength=k)
        assert pw.max() <= bound + 1e-9 or np.bincount(np.arange(g.n) % 2, weights=g.vwgt).max() > bound


@needs_compiled
def test_benchmark_smoke(capsys):
    import sys
    from pathlib import Path

    sys.path.insert(0, str(Path(__file__).parents[1] / "benchmarks"))
    import bench_kernels

    assert bench_kernels.main(["--n", "60", "--repeat", "1"]) == 0
    out = capsys.readouterr().out
    assert "fm_pass" in out and "partition_kway" in out
