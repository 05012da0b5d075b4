"""Labelings, the correlation-clustering and Potts energies, and purity.

A labeling is an integer array assigning each point a cluster id. The two
energies differ by a constant::

    potts_energy(W, L) == cc_energy(W, L) + W.total_weight()

so they share minimizers.
"""

import numpy as np

__all__ = [
    "as_labels",
    "cc_energy",
    "potts_energy",
    "compact",
    "purity",
    "load_labels",
    "save_labels",
]


def as_labels(labels, n=None):
    """Return ``labels`` as an int64 array, checking length and sign."""
    arr = np.asarray(labels)
    if arr.ndim != 1:
        raise ValueError("labeling must be one-dimensional")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ValueError("labels must be integers")
    arr = arr.astype(np.int64)
    if n is not None and len(arr) != n:
        raise ValueError(f"labeling has length {len(arr)}, expected {n}")
    if arr.size and arr.min() < 0:
        raise ValueError("labels must be nonnegative")
    return arr


def cc_energy(W, labels):
    """Negative total weight of pairs that share a cluster."""
    labels = as_labels(labels, W.n)
    same = labels[W.rows] == labels[W.cols]
    return -float(W.weights[same].sum())


def potts_energy(W, labels):
    """Total weight of pairs whose endpoints are in different clusters."""
    labels = as_labels(labels, W.n)
    cut = labels[W.rows] != labels[W.cols]
    return float(W.weights[cut].sum())


def compact(labels):
    """Relabel to ``0..k-1`` in order of first appearance.

    >>> compact([5, 5, 9, 5])
    (array([0, 0, 1, 0]), 2)
    """
    labels = as_labels(labels)
    if labels.size == 0:
        return labels, 0
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse], len(first)


def compact_sorted(labels):
    # order-preserving: surviving ids keep their relative order
    _, inverse = np.unique(labels, return_inverse=True)
    inverse = inverse.astype(np.int64)
    return inverse, int(inverse.max()) + 1 if inverse.size else 0


def purity(labels, truth):
    """Fraction of points belonging to the majority true class of their cluster."""
    labels = as_labels(labels)
    truth = as_labels(truth)
    if len(labels) != len(truth):
        raise ValueError(
            f"labeling has length {len(labels)}, ground truth {len(truth)}"
        )
    if len(labels) == 0:
        raise ValueError("purity undefined for an empty labeling")
    lab, _ = compact(labels)
    gt, k_gt = compact(truth)
    counts = np.zeros((int(lab.max()) + 1, k_gt), dtype=np.int64)
    np.add.at(counts, (lab, gt), 1)
    return float(counts.max(axis=1).sum()) / len(labels)


def load_labels(path):
    """Read a labeling file: one nonnegative integer per line."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                value = int(line)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not an integer: {line!r}") from None
            if value < 0:
                raise ValueError(f"{path}:{lineno}: negative label {value}")
            values.append(value)
    return np.array(values, dtype=np.int64)


def save_labels(path, labels):
    labels = as_labels(labels)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(f"{int(v)}\n" for v in labels)
