"""Binary sub-problems for expansion and swap moves on the Potts energy.

Both builders return ``(energy, mapping)`` where ``mapping[v]`` is the point
behind binary variable ``v``. The energies are exact: for every assignment
``x``, ``energy.eval(x) == potts_energy(W, apply(L, mapping, x, targets))``.
"""

import numpy as np

from corrclust.partition import as_labels
from corrclust.pseudo_boolean import BinaryEnergy

__all__ = [
    "build_expand",
    "build_swap",
    "apply",
    "current_assignment",
    "expand_targets",
    "swap_targets",
]


def _var_index(n, mapping):
    local = np.full(n, -1, dtype=np.int64)
    local[mapping] = np.arange(len(mapping))
    return local


def build_expand(W, labels, alpha):
    """Expansion of label ``alpha``: ``x = 0`` keeps a point's label, ``x = 1`` takes ``alpha``.

    Points already labeled ``alpha`` get no variable. ``alpha`` may be an
    unused id, which opens a new cluster.
    """
    labels = as_labels(labels, W.n)
    alpha = int(alpha)
    mapping = np.flatnonzero(labels != alpha)
    local = _var_index(W.n, mapping)

    i, j, w = W.rows, W.cols, W.weights
    li, lj = labels[i], labels[j]
    mi, mj = li != alpha, lj != alpha

    both = mi & mj
    wb = w[both]
    table = np.column_stack(
        [wb * (li[both] != lj[both]), wb, wb, np.zeros_like(wb)]
    )
    unary = np.zeros((len(mapping), 2))
    # the other endpoint already has alpha: cut unless this one joins it
    np.add.at(unary[:, 0], local[i[mi & ~mj]], w[mi & ~mj])
    np.add.at(unary[:, 0], local[j[~mi & mj]], w[~mi & mj])
    energy = BinaryEnergy(
        len(mapping), unary, local[i[both]], local[j[both]], table, 0.0, check=False
    )
    return energy, mapping


def build_swap(W, labels, alpha, beta):
    """Swap between ``alpha`` (``x = 0``) and ``beta`` (``x = 1``).

    Only points currently labeled ``alpha`` or ``beta`` get a variable; the
    rest stay fixed and enter through unary terms and the constant. ``beta``
    may be an unused id, which lets part of ``alpha`` split off.
    """
    alpha, beta = int(alpha), int(beta)
    if alpha == beta:
        raise ValueError("swap needs two distinct labels")
    labels = as_labels(labels, W.n)
    inside = (labels == alpha) | (labels == beta)
    mapping = np.flatnonzero(inside)
    local = _var_index(W.n, mapping)

    i, j, w = W.rows, W.cols, W.weights
    li, lj = labels[i], labels[j]
    mi, mj = inside[i], inside[j]

    both = mi & mj
    wb = w[both]
    table = np.column_stack([np.zeros_like(wb), wb, wb, np.zeros_like(wb)])

    unary = np.zeros((len(mapping), 2))
    for sel, var, other in ((mi & ~mj, i, lj), (~mi & mj, j, li)):
        v = local[var[sel]]
        np.add.at(unary[:, 0], v, w[sel] * (other[sel] != alpha))
        np.add.at(unary[:, 1], v, w[sel] * (other[sel] != beta))

    none = ~mi & ~mj
    constant = float(w[none][li[none] != lj[none]].sum())
    energy = BinaryEnergy(
        len(mapping), unary, local[i[both]], local[j[both]], table, constant, check=False
    )
    return energy, mapping


def expand_targets(alpha):
    return (None, int(alpha))


def swap_targets(alpha, beta):
    return (int(alpha), int(beta))


def apply(labels, mapping, x, targets):
    """Relabel the mapped points according to ``x``.

    ``targets = (label_for_0, label_for_1)``; ``None`` means "keep the
    current label". Entries of ``x`` equal to ``UNLABELED`` also keep the
    current label. Unmapped points are untouched.
    """
    out = as_labels(labels).copy()
    x = np.asarray(x)
    mapping = np.asarray(mapping, dtype=np.int64)
    for value, target in zip((0, 1), targets):
        if target is not None:
            out[mapping[x == value]] = target
    return out


def current_assignment(labels, mapping, targets):
    """The binary assignment that encodes "no change"."""
    labels = as_labels(labels)
    zero_label = targets[0]
    if zero_label is None:
        return np.zeros(len(mapping), dtype=np.int64)
    return (labels[mapping] != zero_label).astype(np.int64)

