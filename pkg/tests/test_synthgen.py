import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrclust.partition import cc_energy
from corrclust.synthgen import (
    InfeasibleParams,
    SynthParams,
    cluster_sizes,
    generate,
    sparsity_sweep,
)
from oracles import brute_cc, dense


def _degrees(W):
    return np.bincount(W.rows, minlength=W.n) + np.bincount(W.cols, minlength=W.n)


@pytest.fixture(scope="module")
def default_instance():
    return generate(SynthParams())


@pytest.mark.parametrize("seed", range(5))
def test_noiseless_sign_matches_truth(seed):
    W, truth = generate(SynthParams(n=120, k=6, noise=0.0, sparsity=0.2, seed=seed))
    same = truth[W.rows] == truth[W.cols]
    assert np.array_equal(W.weights > 0, same)


def test_default_positive_fraction(default_instance):
    W, _ = default_instance
    assert 0.25 <= np.mean(W.weights > 0) <= 0.40


def test_default_within_fraction(default_instance):
    W, truth = default_instance
    assert np.mean(truth[W.rows] == truth[W.cols]) == pytest.approx(0.25, abs=0.02)


def test_single_cluster_all_positive():
    W, truth = generate(SynthParams(n=50, k=1, noise=0.0, sparsity=0.3))
    assert np.all(W.weights > 0) and np.all(truth == 0)


def test_magnitudes_in_unit_interval(default_instance):
    W, _ = default_instance
    assert np.all(np.abs(W.weights) <= 1.0) and np.all(W.weights != 0.0)


def test_deterministic():
    p = SynthParams(n=200, k=5, sparsity=0.1, seed=9)
    (Wa, ta), (Wb, tb) = generate(p), generate(p)
    assert Wa == Wb and np.array_equal(ta, tb)


def test_flip_model_positive_fraction():
    W, _ = generate(SynthParams(noise_model="flip"))
    # clean 25% positive; flips move 0.2 of each side: 0.25*0.8 + 0.75*0.2
    assert np.mean(W.weights > 0) == pytest.approx(0.35, abs=0.02)


def test_sweep_sparsity_levels():
    levels = [0.05, 0.10, 0.20]
    out = sparsity_sweep(SynthParams(), levels)
    assert len(out) == 3
    n = 750
    for (W, _), level in zip(out, levels):
        measured = W.nnz / (n * (n - 1) / 2)
        assert measured == pytest.approx(level, rel=0.10)


def test_sweep_empty_and_duplicates():
    assert sparsity_sweep(SynthParams(n=60, k=3), []) == []
    (Wa, _), (Wb, _) = sparsity_sweep(SynthParams(n=60, k=3, sparsity=0.3), [0.3, 0.3])
    assert Wa != Wb


@pytest.mark.parametrize("seed", range(6))
def test_noiseless_truth_is_map(seed):
    W, truth = generate(SynthParams(n=9, k=2, noise=0.0, sparsity=0.7, within_frac=0.4, size_ratio=1.0, seed=seed))
    within = truth[W.rows] == truth[W.cols]
    assert cc_energy(W, truth) == pytest.approx(-np.abs(W.weights[within]).sum())
    best, _ = brute_cc(dense(W.n, W.entries))
    assert cc_energy(W, truth) == pytest.approx(best, abs=1e-12)


@pytest.mark.parametrize("n, k, ratio", [(750, 15, 5.0), (150, 5, 5.0), (100, 10, 3.0), (40, 4, 2.0)])
def test_cluster_size_ratio(n, k, ratio):
    sizes = cluster_sizes(n, k, ratio)
    assert sizes.sum() == n
    assert np.all(np.diff(sizes) >= 0)
    assert ratio * 0.7 <= sizes.max() / sizes.min() <= ratio * 1.3


@settings(max_examples=40)
@given(st.integers(1, 500), st.integers(1, 20), st.floats(1.0, 8.0))
def test_cluster_sizes_sum(n, k, ratio):
    if k > n:
        return
    try:
        sizes = cluster_sizes(n, k, ratio)
    except InfeasibleParams:
        return
    assert sizes.sum() == n and sizes.min() >= 1 and len(sizes) == k


def test_degree_near_target(default_instance):
    W, truth = default_instance
    target = 0.1 * (W.n - 1)
    deg = _degrees(W)
    for c in range(15):
        assert deg[truth == c].mean() == pytest.approx(target, rel=0.20)
    assert np.mean(np.abs(deg / target - 1) <= 0.20) >= 0.95


@pytest.mark.parametrize(
    "overrides",
    [
        dict(within_frac=0.0),
        dict(within_frac=1.0),
        dict(noise=1.0),
        dict(sparsity=0.0),
        dict(k=0),
        dict(k=800),
        dict(size_ratio=0.5),
        dict(noise_model="gaussian"),
        # each point wants 0.9 * 149 mates but clusters hold at most 29
        dict(n=150, k=5, size_ratio=1.0, sparsity=1.0, within_frac=0.9),
    ],
)
def test_infeasible(overrides):
    with pytest.raises(InfeasibleParams):
        generate(SynthParams(**overrides))
