"""Independent reference implementations used as test oracles.

Nothing here imports the energy code under test; the oracles work from
dense matrices and explicit enumeration.
"""

import itertools

import numpy as np


def all_partitions(n):
    """Every set partition of ``n`` points as restricted growth strings, one row each."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    rows = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)
    for _ in range(1, n):
        fan = top.astype(np.int64) + 2
        parent = np.repeat(np.arange(len(rows)), fan)
        offsets = np.arange(fan.sum()) - np.repeat(np.cumsum(fan) - fan, fan)
        rows = np.column_stack([rows[parent], offsets.astype(np.int8)])
        top = np.maximum(top[parent], offsets.astype(np.int8))
    return rows


def dense(n, triplets):
    M = np.zeros((n, n))
    for i, j, w in triplets:
        M[i, j] += w
        M[j, i] += w
    return M


def cc_dense(M, labels):
    """CC energy by a plain double loop over unordered pairs."""
    n = len(labels)
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            if labels[i] == labels[j]:
                total -= M[i, j]
    return total


def potts_dense(M, labels):
    n = len(labels)
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            if labels[i] != labels[j]:
                total += M[i, j]
    return total


def brute_cc(M):
    """Minimum CC energy over all partitions and the count of minimizers' rows."""
    n = M.shape[0]
    parts = all_partitions(n)
    energy = np.zeros(len(parts))
    for i, j in zip(*np.triu_indices(n, 1)):
        if M[i, j] != 0.0:
            energy -= M[i, j] * (parts[:, i] == parts[:, j])
    return float(energy.min()), parts[energy <= energy.min() + 1e-9]


def random_triplets(rng, n, density, low=-1.0, high=1.0):
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                w = rng.uniform(low, high)
                if w != 0.0:
                    out.append((i, j, w))
    return out


def binary_eval(m, unary, pairs, constant, x):
    total = constant
    for i in range(m):
        total += unary[i][x[i]]
    for a, b, table in pairs:
        total += table[2 * x[a] + x[b]]
    return total


def brute_binary(m, unary, pairs, constant):
    """All ``2**m`` assignments with their energies, as ``(assignments, energies)``."""
    xs = np.array(list(itertools.product((0, 1), repeat=m)), dtype=np.int64).reshape(-1, m)
    values = np.full(len(xs), float(constant))
    for i in range(m):
        values += np.where(xs[:, i] == 1, unary[i][1], unary[i][0])
    for a, b, table in pairs:
        values += np.asarray(table, dtype=float)[2 * xs[:, a] + xs[:, b]]
    return xs, values


def random_binary_terms(rng, m, density=0.5, submodular=False, scale=1.0):
    unary = [tuple(rng.normal(scale=scale, size=2)) for _ in range(m)]
    pairs = []
    for a in range(m):
        for b in range(a + 1, m):
            if rng.random() < density:
                t = list(rng.normal(scale=scale, size=4))
                if submodular and t[1] + t[2] < t[0] + t[3]:
                    t[1], t[0] = t[0], t[1]
                    t[2], t[3] = t[3], t[2]
                pairs.append((a, b, tuple(t)))
    constant = float(rng.normal())
    return unary, pairs, constant
