"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--n 2000] [--repeat 3]

Also times partition_kway end to end under each backend (the backend is
picked at import, so that part runs in a subprocess per backend).
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from taxograph.kernels import compiled_available, get_backend
from taxograph.partition import PartitionConfig, WorkGraph, balance_bound


def random_graph(n, avg_degree, seed):
    rng = np.random.default_rng(seed)
    m = n * avg_degree // 2
    i = rng.integers(0, n, size=m)
    j = rng.integers(0, n, size=m)
    keep = i != j
    edges = {(min(a, b), max(a, b)): float(w) for a, b, w in zip(i[keep], j[keep], rng.integers(1, 20, size=m))}
    return WorkGraph.from_edges(n, [(a, b, w) for (a, b), w in edges.items()])


def doc_topics(n_docs, n_topics, per_doc, seed):
    rng = np.random.default_rng(seed)
    indptr, ids = [0], []
    for _ in range(n_docs):
        ids.extend(sorted(rng.choice(n_topics, size=per_doc, replace=False)))
        indptr.append(len(ids))
    return np.array(indptr, dtype=np.int64), np.array(ids, dtype=np.int64)


def cases(n, seed):
    g = random_graph(n, 8, seed)
    k = 4
    bound = balance_bound(g, k, PartitionConfig())
    start = np.random.default_rng(seed).integers(0, k, size=g.n).astype(np.int64)
    order = np.random.default_rng(seed).permutation(g.n)
    indptr, ids = doc_topics(20 * n, n, 6, seed)
    maxv = 1.5 * g.total_vwgt / 20
    slack = float(g.vwgt.max())
    return {
        "pair_keys": lambda m: m.pair_keys(indptr, ids, n),
        "heavy_edge_matching": lambda m: m.heavy_edge_matching(g.indptr, g.indices, g.adjwgt, g.vwgt, order, maxv),
        "greedy_refine": lambda m: m.greedy_refine(g.indptr, g.indices, g.adjwgt, g.vwgt, start.copy(), k,
                                                   bound, 1e-9),
        "fm_pass": lambda m: m.fm_pass(g.indptr, g.indices, g.adjwgt, g.vwgt, start.copy(), k, bound, slack,
                                       1e-9, 50),
    }


def partition_time(backend, n, seed, repeat):
    code = (
        "import timeit, sys; sys.path.insert(0, %r)\n"
        "from bench_kernels import random_graph\n"
        "from taxograph.partition import partition_kway, PartitionConfig\n"
        "g = random_graph(%d, 8, %d)\n"
        "print(min(timeit.repeat(lambda: partition_kway(g, 8, PartitionConfig()), number=1, repeat=%d)))\n"
    ) % (os.path.dirname(os.path.abspath(__file__)), n, seed, repeat)
    env = dict(os.environ, TAXOGRAPH_PURE_PYTHON="1" if backend == "python" else "0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000, help="vertices / topics")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if not compiled_available():
        print("compiled kernels not built; only the python backend is available", file=sys.stderr)
        return 1
    py, cy = get_backend("python"), get_backend("cython")
    print(f"{'kernel':<22}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for name, fn in cases(args.n, args.seed).items():
        t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat))
        t_cy = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat))
        print(f"{name:<22}{t_py:>12.4f}{t_cy:>12.4f}{t_py / t_cy:>9.1f}x")
    t_py = partition_time("python", args.n, args.seed, args.repeat)
    t_cy = partition_time("cython", args.n, args.seed, args.repeat)
    print(f"{'partition_kway k=8':<22}{t_py:>12.4f}{t_cy:>12.4f}{t_py / t_cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
