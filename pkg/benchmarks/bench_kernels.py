"""Compare the compiled and pure-Python kernels on identical inputs.

    python benchmarks/bench_kernels.py [--repeat 3] [--n 200]

Each row reports the best-of-``repeat`` wall time per backend and the speedup.
Results are checked for agreement before timing is reported.
"""

import argparse
import time

import numpy as np

from corrclust import _backend, _kernels, _pykernels
from corrclust.pseudo_boolean import BinaryEnergy, _doubled_network
from corrclust.solvers import SolveConfig, solve
from corrclust.synthgen import SynthParams, generate


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _random_network(rng, n_nodes, n_arcs):
    tail = rng.integers(0, n_nodes, n_arcs)
    head = rng.integers(0, n_nodes, n_arcs)
    keep = tail != head
    return tail[keep], head[keep], rng.random(keep.sum()) * 10.0


def _random_energy(rng, m, n_pairs):
    pairs = {}
    while len(pairs) < n_pairs:
        a, b = sorted(rng.choice(m, 2, replace=False))
        pairs[(int(a), int(b))] = tuple(rng.normal(size=4))
    return BinaryEnergy.from_terms(
        m, rng.normal(size=(m, 2)), [(a, b, t) for (a, b), t in pairs.items()]
    )


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--n", type=int, default=200)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    rows = []

    n_nodes = 2000
    tail, head, cap = _random_network(rng, n_nodes, 8 * n_nodes)
    eps = 1e-12 * cap.sum()
    runs = {}
    for name, mod in (("cython", _kernels), ("python", _pykernels)):
        runs[name] = _best(lambda: mod.maxflow(n_nodes, tail, head, cap, 0, 1, eps), args.repeat)
    assert np.isclose(runs["cython"][1][0], runs["python"][1][0])
    rows.append(("maxflow", runs))

    e = _random_energy(rng, 400, 1600)
    _, t_arr, h_arr, c_arr = _doubled_network(e)
    nodes, s, t = 2 * e.m + 2, 2 * e.m, 2 * e.m + 1
    _, flow = _kernels.maxflow(nodes, t_arr, h_arr, c_arr, s, t, 1e-12)
    half = len(flow) // 2
    flow = np.tile(0.5 * (flow[:half] + flow[half:]), 2)
    runs = {}
    for name, mod in (("cython", _kernels), ("python", _pykernels)):
        runs[name] = _best(
            lambda: mod.roof_labels(nodes, t_arr, h_arr, c_arr, flow, s, e.m, 1e-12), args.repeat
        )
    assert np.array_equal(runs["cython"][1], runs["python"][1])
    rows.append(("roof_labels", runs))

    W, _ = generate(SynthParams(n=750, k=15, sparsity=0.1, seed=0))
    indptr, indices, data = W.csr
    runs = {}
    for name, mod in (("cython", _kernels), ("python", _pykernels)):
        def sweep(mod=mod):
            labels = np.zeros(W.n, dtype=np.int64)
            mod.icm_sweep(indptr, indices, data, labels, 1e-12)
            return labels

        runs[name] = _best(sweep, args.repeat)
    assert np.array_equal(runs["cython"][1], runs["python"][1])
    rows.append(("icm_sweep", runs))

    W, _ = generate(SynthParams(n=args.n, k=5, sparsity=0.3, seed=0))
    runs = {}
    for name in ("cython", "python"):
        previous = _backend.select(name)
        try:
            runs[name] = _best(lambda: solve(W, "swap", SolveConfig(seed=0)).labels, 1)
        finally:
            _backend.select(previous)
    assert np.array_equal(runs["cython"][1], runs["python"][1])
    rows.append((f"swap solve n={args.n}", runs))

    print(f"{'kernel':<20} {'cython [s]':>12} {'python [s]':>12} {'speedup':>9}")
    for label, runs in rows:
        fast, slow = runs["cython"][0], runs["python"][0]
        print(f"{label:<20} {fast:>12.5f} {slow:>12.5f} {slow / fast:>8.1f}x")


if __name__ == "__main__":
    main()
