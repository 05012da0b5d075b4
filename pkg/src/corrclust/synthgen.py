"""Planted-partition generator for signed sparse affinities.

Points are split into ``k`` clusters whose sizes grow linearly from the
smallest to ``size_ratio`` times the smallest. Every point gets roughly
``sparsity * (n - 1)`` neighbours, a ``within_frac`` share of them from its
own cluster. A clean pair weighs ``+m`` inside a cluster and ``-m`` across,
with ``m ~ U(0, 1]``; with probability ``noise`` the sign is flipped and
``m`` redrawn.
"""

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from corrclust.affinity import SparseAffinity

__all__ = ["SynthParams", "InfeasibleParams", "cluster_sizes", "generate", "sparsity_sweep"]


NOISE_MODELS = ("resample", "flip")


class InfeasibleParams(ValueError):
    """Parameters that no graph can satisfy."""


@dataclass(frozen=True)
class SynthParams:
    n: int = 750
    k: int = 15
    size_ratio: float = 5.0
    within_frac: float = 0.25
    noise: float = 0.2
    sparsity: float = 0.1
    seed: int = 0
    noise_model: str = "resample"

    def validate(self):
        if self.n < 1:
            raise InfeasibleParams(f"n must be positive, got {self.n}")
        if not 1 <= self.k <= self.n:
            raise InfeasibleParams(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if not 0.0 < self.within_frac < 1.0:
            raise InfeasibleParams(f"within_frac must be in (0, 1), got {self.within_frac}")
        if not 0.0 <= self.noise < 1.0:
            raise InfeasibleParams(f"noise must be in [0, 1), got {self.noise}")
        if not 0.0 < self.sparsity <= 1.0:
            raise InfeasibleParams(f"sparsity must be in (0, 1], got {self.sparsity}")
        if self.noise_model not in NOISE_MODELS:
            raise InfeasibleParams(
                f"noise_model must be one of {NOISE_MODELS}, got {self.noise_model!r}"
            )
        if self.size_ratio < 1.0:
            raise InfeasibleParams(f"size_ratio must be >= 1, got {self.size_ratio}")

    def to_dict(self):
        return asdict(self)


def cluster_sizes(n, k, size_ratio):
    """Sizes interpolating linearly from smallest to ``size_ratio * smallest``, summing to ``n``."""
    if k == 1:
        return np.array([n], dtype=np.int64)
    raw = 1.0 + (size_ratio - 1.0) * np.arange(k) / (k - 1)
    raw = raw * n / raw.sum()
    sizes = np.floor(raw).astype(np.int64)
    short = n - sizes.sum()
    # largest remainders, ties to the larger cluster
    order = np.lexsort((-np.arange(k), -(raw - sizes)))
    sizes[order[:short]] += 1
    if sizes.min() < 1:
        raise InfeasibleParams(f"cannot fit {k} nonempty clusters in {n} points")
    return sizes


def _within_targets(sizes, demand):
    """Per-cluster within degree: ``min(size - 1, tau)`` with the total matching ``demand`` per point."""
    caps = (sizes - 1).astype(np.float64)
    n = sizes.sum()
    total = demand * n
    if float((sizes * caps).sum()) < total - 1e-9:
        raise InfeasibleParams(
            f"within-cluster demand of {demand:.3g} neighbours per point exceeds "
            "what the clusters can hold"
        )
    lo, hi = 0.0, float(caps.max()) if len(caps) else 0.0
    for _ in range(100):
        tau = 0.5 * (lo + hi)
        if float((sizes * np.minimum(caps, tau)).sum()) < total:
            lo = tau
        else:
            hi = tau
    return np.minimum(caps, hi)


def _draws_for(target, pool):
    """Draws per point so the symmetrized degree averages ``target``.

    With ``h`` uniform draws from a pool of ``pool`` candidates, two points
    pick each other with probability ``(h / pool)**2``, so the merged degree
    is ``2h - h**2 / pool``.
    """
    if pool <= 0 or target <= 0:
        return 0.0
    frac = min(target / pool, 1.0)
    return pool * (1.0 - math.sqrt(1.0 - frac))


def _stochastic_round(rng, values):
    base = np.floor(values)
    return (base + (rng.random(len(values)) < values - base)).astype(np.int64)


def generate(params):
    """Draw ``(W, truth)`` for the planted-partition model.

    Raises:
        InfeasibleParams: for out-of-range parameters or neighbour demands
            the cluster sizes cannot meet.
    """
    params.validate()
    n, k = params.n, params.k
    rng = np.random.default_rng(params.seed)
    sizes = cluster_sizes(n, k, params.size_ratio)
    degree = params.sparsity * (n - 1)

    if k == 1:
        within = np.array([degree])
    else:
        within = _within_targets(sizes, params.within_frac * degree)
    across = degree - within
    if np.any(across > (n - sizes) + 1e-9):
        raise InfeasibleParams("across-cluster demand exceeds the points outside the cluster")

    perm = rng.permutation(n)
    truth = np.empty(n, dtype=np.int64)
    truth[perm] = np.repeat(np.arange(k), sizes)
    members = [np.flatnonzero(truth == c) for c in range(k)]
    outsiders = [np.flatnonzero(truth != c) for c in range(k)]

    h_in = np.array([_draws_for(within[c], sizes[c] - 1) for c in range(k)])
    h_out = np.array([_draws_for(across[c], n - sizes[c]) for c in range(k)])
    n_in = _stochastic_round(rng, h_in[truth])
    n_out = _stochastic_round(rng, h_out[truth])

    src, dst = [], []
    for i in range(n):
        c = truth[i]
        mates = members[c][members[c] != i]
        if n_in[i]:
            picked = rng.choice(mates, size=min(int(n_in[i]), len(mates)), replace=False)
            src.append(np.full(len(picked), i))
            dst.append(picked)
        if n_out[i]:
            pool = outsiders[c]
            picked = rng.choice(pool, size=min(int(n_out[i]), len(pool)), replace=False)
            src.append(np.full(len(picked), i))
            dst.append(picked)
    if src:
        src = np.concatenate(src).astype(np.int64)
        dst = np.concatenate(dst).astype(np.int64)
    else:
        src = dst = np.zeros(0, dtype=np.int64)

    lo, hi = np.minimum(src, dst), np.maximum(src, dst)
    # merge pairs drawn from both ends, keeping the first draw
    _, first = np.unique(lo * n + hi, return_index=True)
    first.sort()
    lo, hi = lo[first], hi[first]

    sign = np.where(truth[lo] == truth[hi], 1.0, -1.0)
    mag = 1.0 - rng.random(len(lo))
    hit = rng.random(len(lo)) < params.noise
    mag[hit] = 1.0 - rng.random(int(hit.sum()))
    if params.noise_model == "flip":
        sign[hit] = -sign[hit]
    else:
        sign[hit] = np.where(rng.random(int(hit.sum())) < 0.5, 1.0, -1.0)
    weights = sign * mag

    order = np.lexsort((hi, lo))
    W = SparseAffinity(n, lo[order], hi[order], weights[order])
    return W, truth


def sparsity_sweep(base, levels):
    """One instance per sparsity level; level ``i`` is seeded from ``(base.seed, i)``."""
    out = []
    for idx, level in enumerate(levels):
        seed = int(np.random.SeedSequence([base.seed, idx]).generate_state(1)[0])
        out.append(generate(replace(base, sparsity=float(level), seed=seed)))
    return out
