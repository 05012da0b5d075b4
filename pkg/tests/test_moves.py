import itertools

import numpy as np
import pytest

from corrclust.affinity import build
from corrclust.moves import (
    apply,
    build_expand,
    build_swap,
    current_assignment,
    expand_targets,
    swap_targets,
)
from corrclust.pseudo_boolean import UNLABELED, qpbo_solve
from oracles import dense, potts_dense, random_triplets


def _instance(seed, n=None):
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(2, 7))
    trips = random_triplets(rng, n, 0.6)
    labels = rng.integers(0, 3, n)
    return rng, build(n, trips), dense(n, trips), labels


def _all_x(m):
    return [np.array(x, dtype=np.int64) for x in itertools.product((0, 1), repeat=m)]


@pytest.mark.parametrize("seed", range(30))
def test_expand_exact_exhaustive(seed):
    rng, W, M, L = _instance(seed)
    for alpha in range(int(L.max()) + 2):
        e, mapping = build_expand(W, L, alpha)
        for x in _all_x(e.m):
            new = apply(L, mapping, x, expand_targets(alpha))
            assert e.eval(x) == pytest.approx(potts_dense(M, new), abs=1e-9)


@pytest.mark.parametrize("seed", range(30))
def test_swap_exact_exhaustive(seed):
    rng, W, M, L = _instance(seed)
    top = int(L.max()) + 1
    for alpha in range(top):
        for beta in range(top + 1):
            if alpha == beta:
                continue
            e, mapping = build_swap(W, L, alpha, beta)
            for x in _all_x(e.m):
                new = apply(L, mapping, x, swap_targets(alpha, beta))
                assert e.eval(x) == pytest.approx(potts_dense(M, new), abs=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_no_change_assignment_is_current_energy(seed):
    rng, W, M, L = _instance(seed, n=20)
    current = potts_dense(M, L)
    e, mapping = build_expand(W, L, 1)
    assert e.eval(current_assignment(L, mapping, expand_targets(1))) == pytest.approx(current)
    e, mapping = build_swap(W, L, 0, 2)
    assert e.eval(current_assignment(L, mapping, swap_targets(0, 2))) == pytest.approx(current)


def test_expand_fresh_label_on_constant_labeling():
    W = build(3, [(0, 1, 1.0), (1, 2, -2.0)])
    e, mapping = build_expand(W, [0, 0, 0], 1)
    assert e.eval(np.zeros(3, dtype=np.int64)) == 0.0
    assert mapping.tolist() == [0, 1, 2]


def test_expand_negative_pair_is_not_submodular():
    W = build(2, [(0, 1, -1.0)])
    e, _ = build_expand(W, [0, 0], 1)
    assert e.pair_table.tolist() == [[0.0, -1.0, -1.0, 0.0]]
    assert not e.is_submodular()


def test_expand_skips_alpha_points():
    W = build(3, [(0, 1, 1.0), (1, 2, 1.0)])
    e, mapping = build_expand(W, [0, 1, 0], 0)
    assert mapping.tolist() == [1]
    assert e.unary.tolist() == [[2.0, 0.0]]


def test_swap_empty_set():
    W = build(3, [(0, 1, 1.0), (1, 2, -2.0)])
    L = [0, 1, 0]
    e, mapping = build_swap(W, L, 5, 6)
    assert e.m == 0 and len(mapping) == 0
    assert e.constant == -1.0


def test_swap_pair_moves_jointly():
    W = build(3, [(0, 1, 1.0)])
    e, mapping = build_swap(W, [0, 0, 1], 0, 2)
    values = {x: e.eval(np.array(x)) for x in itertools.product((0, 1), repeat=2)}
    assert values[(0, 0)] == values[(1, 1)] == 0.0
    assert values[(0, 1)] == values[(1, 0)] == 1.0


def test_swap_rejects_equal_labels():
    with pytest.raises(ValueError):
        build_swap(build(2, []), [0, 0], 1, 1)


def test_apply_rules():
    L = np.array([0, 1, 1, 2])
    e, mapping = build_expand(build(4, []), L, 1)
    assert apply(L, mapping, np.zeros(len(mapping)), expand_targets(1)).tolist() == L.tolist()
    assert apply(L, mapping, np.ones(len(mapping)), expand_targets(1)).tolist() == [1, 1, 1, 1]
    x = np.array([1, UNLABELED])
    assert apply(L, mapping, x, expand_targets(1)).tolist() == [1, 1, 1, 2]
    _, mapping = build_swap(build(4, []), L, 1, 2)
    assert apply(L, mapping, np.zeros(3), swap_targets(1, 2)).tolist() == [0, 1, 1, 1]


@pytest.mark.parametrize("seed", range(10))
def test_qpbo_partial_move_never_hurts_optimum(seed):
    # labeled variables from a move energy agree with some optimal move
    rng, W, M, L = _instance(seed, n=6)
    e, mapping = build_expand(W, L, int(L.max()) + 1)
    labels, _ = qpbo_solve(e)
    best = min(e.eval(x) for x in _all_x(e.m))
    fixed = labels != UNLABELED
    cands = [x for x in _all_x(e.m) if np.all(x[fixed] == labels[fixed])]
    assert min(e.eval(x) for x in cands) == pytest.approx(best, abs=1e-9)
