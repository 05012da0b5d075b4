"""Sparse signed affinity matrices.

A :class:`SparseAffinity` stores each unordered pair ``(i, j)``, ``i < j``,
once, with a finite nonzero weight. Positive weights pull two points into
the same cluster, negative weights push them apart; a missing pair carries
no information.
"""

import math
from functools import cached_property
from pathlib import Path

import numpy as np

__all__ = [
    "AffinityError",
    "MatrixFormatError",
    "SparseAffinity",
    "build",
    "from_probabilities",
    "load_matrix",
    "save_matrix",
]

MM_HEADER = "%%MatrixMarket matrix coordinate real symmetric"


class AffinityError(ValueError):
    """Invalid affinity data (bad index, self-loop, duplicate, bad value)."""


class MatrixFormatError(AffinityError):
    """Malformed matrix file."""


class SparseAffinity:
    """Symmetric signed sparse weight matrix over ``n`` points.

    Entries are kept sorted by ``(i, j)`` with ``i < j``. Instances are
    immutable; use :func:`build` to construct one from raw triplets.

    Attributes:
        n (int): number of points.
        rows, cols (ndarray of int64): endpoints of each stored pair.
        weights (ndarray of float64): weight of each stored pair.
    """

    def __init__(self, n, rows, cols, weights):
        n = int(n)
        if n < 0:
            raise AffinityError(f"number of points must be nonnegative, got {n}")
        rows = np.array(rows, dtype=np.int64).reshape(-1)
        cols = np.array(cols, dtype=np.int64).reshape(-1)
        weights = np.array(weights, dtype=np.float64).reshape(-1)
        if not (len(rows) == len(cols) == len(weights)):
            raise AffinityError("rows, cols and weights differ in length")
        if len(rows):
            if rows.min() < 0 or cols.max() >= n:
                raise AffinityError("index out of range")
            if np.any(rows >= cols):
                raise AffinityError("entries must satisfy i < j")
            key = rows * n + cols
            if np.any(np.diff(key) <= 0):
                raise AffinityError("entries must be sorted and unique")
            if not np.all(np.isfinite(weights)) or np.any(weights == 0.0):
                raise AffinityError("weights must be finite and nonzero")
        for arr in (rows, cols, weights):
            arr.setflags(write=False)
        self.n = n
        self.rows = rows
        self.cols = cols
        self.weights = weights

    def __repr__(self):
        return f"SparseAffinity(n={self.n}, nnz={self.nnz})"

    def __eq__(self, other):
        if not isinstance(other, SparseAffinity):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.rows, other.rows)
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None

    @property
    def nnz(self):
        """Number of stored unordered pairs."""
        return len(self.weights)

    @property
    def entries(self):
        """List of ``(i, j, w)`` triplets with ``i < j``."""
        return [
            (int(i), int(j), float(w))
            for i, j, w in zip(self.rows, self.cols, self.weights)
        ]

    def total_weight(self):
        """Sum of the weights over all stored pairs."""
        return float(self.weights.sum())

    def abs_weight(self):
        return float(np.abs(self.weights).sum())

    @cached_property
    def csr(self):
        """Symmetric adjacency as ``(indptr, indices, data)``.

        Row ``i`` lists every neighbour of ``i`` in ascending order.
        """
        src = np.concatenate([self.rows, self.cols])
        dst = np.concatenate([self.cols, self.rows])
        val = np.concatenate([self.weights, self.weights])
        order = np.lexsort((dst, src))
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        out = (indptr, dst[order], val[order])
        for arr in out:
            arr.setflags(write=False)
        return out

    def neighbors(self, i):
        """All ``(j, w)`` incident to point ``i``, by ascending ``j``."""
        if not 0 <= i < self.n:
            raise AffinityError(f"point index {i} out of range [0, {self.n})")
        indptr, indices, data = self.csr
        lo, hi = indptr[i], indptr[i + 1]
        return [(int(j), float(w)) for j, w in zip(indices[lo:hi], data[lo:hi])]


def build(n, triplets):
    """Build a canonical :class:`SparseAffinity` from ``(i, j, w)`` triplets.

    Pairs may be given in either orientation. Zero weights are dropped.

    Raises:
        AffinityError: on an out-of-range index, a self-loop, a duplicate
            pair (in either orientation) or a non-finite weight.
    """
    n = int(n)
    rows, cols, weights = [], [], []
    seen = set()
    for i, j, w in triplets:
        i, j, w = int(i), int(j), float(w)
        if not (0 <= i < n and 0 <= j < n):
            raise AffinityError(f"index out of range in pair ({i}, {j}) for n={n}")
        if i == j:
            raise AffinityError(f"self-loop at point {i}")
        if not math.isfinite(w):
            raise AffinityError(f"non-finite weight {w} on pair ({i}, {j})")
        a, b = (i, j) if i < j else (j, i)
        if (a, b) in seen:
            raise AffinityError(f"duplicate pair ({a}, {b})")
        seen.add((a, b))
        if w != 0.0:
            rows.append(a)
            cols.append(b)
            weights.append(w)
    rows = np.array(rows, dtype=np.int64)
    cols = np.array(cols, dtype=np.int64)
    weights = np.array(weights, dtype=np.float64)
    order = np.lexsort((cols, rows))
    return SparseAffinity(n, rows[order], cols[order], weights[order])


def log_odds(p):
    """``log(p / (1 - p))``, elementwise."""
    p = np.asarray(p, dtype=np.float64)
    return np.log(p) - np.log1p(-p)


def from_probabilities(n, triplets):
    """Build an affinity from same-cluster probabilities.

    Each probability ``p`` becomes the weight ``log(p / (1 - p))``; a pair
    with ``p = 0.5`` carries no evidence and is dropped.
    """
    converted = []
    for i, j, p in triplets:
        p = float(p)
        if not 0.0 < p < 1.0:
            raise AffinityError(f"probability {p} on pair ({i}, {j}) not in (0, 1)")
        converted.append((i, j, float(log_odds(p))))
    return build(n, converted)


def _data_lines(lines):
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        yield lineno, line


def load_matrix(path):
    """Read a symmetric sparse coordinate file (1-based indices).

    The ``%%MatrixMarket`` banner is optional. The first data line is
    ``n n m``, followed by ``m`` lines ``i j w``. Either triangle may be used.
    """
    with open(path, encoding="utf-8") as fh:
        lines = _data_lines(fh)
        try:
            lineno, header = next(lines)
        except StopIteration:
            raise MatrixFormatError(f"{path}: missing size line") from None
        parts = header.split()
        try:
            if len(parts) != 3:
                raise ValueError
            n_rows, n_cols, m = (int(p) for p in parts)
        except ValueError:
            raise MatrixFormatError(f"{path}:{lineno}: bad size line {header!r}") from None
        if n_rows != n_cols or n_rows < 0 or m < 0:
            raise MatrixFormatError(f"{path}:{lineno}: expected 'n n m', got {header!r}")
        n = n_rows
        triplets = []
        for lineno, line in lines:
            parts = line.split()
            try:
                if len(parts) != 3:
                    raise ValueError
                i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise MatrixFormatError(f"{path}:{lineno}: bad entry {line!r}") from None
            if not (1 <= i <= n and 1 <= j <= n):
                raise MatrixFormatError(
                    f"{path}:{lineno}: index out of bounds in {line!r} (n={n})"
                )
            if not math.isfinite(w):
                raise MatrixFormatError(f"{path}:{lineno}: non-finite value {parts[2]!r}")
            triplets.append((i - 1, j - 1, w))
    if len(triplets) != m:
        raise MatrixFormatError(f"{path}: header declares {m} entries, found {len(triplets)}")
    try:
        return build(n, triplets)
    except MatrixFormatError:
        raise
    except AffinityError as err:
        raise MatrixFormatError(f"{path}: {err}") from None


def save_matrix(path, W, comments=()):
    """Write ``W`` in the coordinate format read by :func:`load_matrix`.

    Weights are written with 17 significant digits so a reload is exact.
    """
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(MM_HEADER + "\n")
        for line in comments:
            fh.write(f"% {line}\n")
        fh.write(f"{W.n} {W.n} {W.nnz}\n")
        for i, j, w in zip(W.rows.tolist(), W.cols.tolist(), W.weights.tolist()):
            fh.write(f"{j + 1} {i + 1} {w:.17g}\n")
