"""Expand-and-Explore, Swap-and-Explore and adaptive-label ICM.

All three start from a single cluster and never take the number of
clusters as input: expansion and swap moves are also tried against one
currently unused label, and ICM may move a point to a fresh singleton, so
clusters appear and disappear as the energy dictates.

A move is accepted only if it strictly lowers the Potts energy, so every
run terminates and the recorded energies never increase.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from corrclust import _backend
from corrclust.moves import (
    apply,
    build_expand,
    build_swap,
    current_assignment,
    expand_targets,
    swap_targets,
)
from corrclust.partition import as_labels, cc_energy, compact, compact_sorted, potts_energy
from corrclust.pseudo_boolean import qpbo_improve

__all__ = [
    "ALGORITHMS",
    "SolveConfig",
    "SolveResult",
    "expand_and_explore",
    "swap_and_explore",
    "adaptive_icm",
    "solve",
]

_REL_TOL = 1e-12


@dataclass
class SolveConfig:
    """Run controls shared by all solvers.

    Attributes:
        seed: seeds the randomized binary-step solver.
        max_sweeps: cap on full passes over the labels (or points, for ICM).
        time_budget: optional wall-clock cap in seconds, checked between moves.
        record_trace: keep ``(move, energy after)`` for every accepted move.
        init: optional warm-start labeling; defaults to a single cluster.
    """

    seed: int = 0
    max_sweeps: int = 1000
    time_budget: float | None = None
    record_trace: bool = False
    init: np.ndarray | None = None

    def __post_init__(self):
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError("time_budget must be positive")


@dataclass
class SolveResult:
    labels: np.ndarray
    k: int
    potts_energy: float
    cc_energy: float
    sweeps: int
    converged: bool
    algorithm: str
    trace: list = field(default_factory=list)


class _Run:
    """Mutable state of one solve: labels, energy, trace, clocks."""

    def __init__(self, W, config, algorithm):
        self.W = W
        self.config = config
        self.algorithm = algorithm
        self.tol = _REL_TOL * (1.0 + W.abs_weight())
        if config.init is None:
            labels = np.zeros(W.n, dtype=np.int64)
        else:
            labels = as_labels(config.init, W.n)
        self.labels, self.k = compact_sorted(labels)
        self.energy = potts_energy(W, self.labels)
        self.trace = []
        if config.record_trace:
            self.trace.append(("init", self.energy))
        self.rng = np.random.default_rng(config.seed)
        self.start = time.perf_counter()
        self.timed_out = False

    def out_of_time(self):
        budget = self.config.time_budget
        if budget is not None and time.perf_counter() - self.start > budget:
            self.timed_out = True
        return self.timed_out

    def accept(self, labels, what):
        self.labels, self.k = compact_sorted(labels)
        self.energy = potts_energy(self.W, self.labels)
        if self.config.record_trace:
            self.trace.append((what, self.energy))

    def try_move(self, energy, mapping, targets, what):
        """Improve the "no change" assignment of a binary move; True if accepted."""
        if energy.m == 0:
            return False
        x0 = current_assignment(self.labels, mapping, targets)
        seed = int(self.rng.integers(2**63))
        x = qpbo_improve(energy, x0, seed=seed)
        if energy.eval(x) < energy.eval(x0) - self.tol:
            self.accept(apply(self.labels, mapping, x, targets), what)
            return True
        return False

    def result(self, sweeps, converged):
        labels, k = compact(self.labels)
        return SolveResult(
            labels=labels,
            k=k,
            potts_energy=potts_energy(self.W, labels),
            cc_energy=cc_energy(self.W, labels),
            sweeps=sweeps,
            converged=converged,
            algorithm=self.algorithm,
            trace=self.trace,
        )


def expand_and_explore(W, config=None):
    """Expansion moves over every live label plus one empty label.

    Each sweep expands ``alpha = 0, 1, ..., k`` where ``k`` (recomputed
    after every accepted move) is the live cluster count, so the last
    expansion opens a new cluster. Stops after a sweep with no accepted move.
    """
    config = config or SolveConfig()
    run = _Run(W, config, "expand")
    sweeps = 0
    converged = False
    while sweeps < config.max_sweeps and not run.out_of_time():
        sweeps += 1
        changed = False
        alpha = 0
        while alpha <= run.k and not run.out_of_time():
            energy, mapping = build_expand(W, run.labels, alpha)
            if run.try_move(energy, mapping, expand_targets(alpha), f"expand {alpha}"):
                changed = True
            alpha += 1
        if not changed and not run.timed_out:
            converged = True
            break
    return run.result(sweeps, converged)


def swap_and_explore(W, config=None):
    """Swap moves over all label pairs, the second label ranging up to an empty one.

    ``(alpha, alpha)`` is a no-op and skipped; ``beta = k`` swaps against the
    unused label so part of ``alpha`` can split off.
    """
    config = config or SolveConfig()
    run = _Run(W, config, "swap")
    sweeps = 0
    converged = False
    while sweeps < config.max_sweeps and not run.out_of_time():
        sweeps += 1
        changed = False
        alpha = 0
        while alpha < run.k and not run.out_of_time():
            beta = alpha + 1
            while beta <= run.k and not run.out_of_time():
                energy, mapping = build_swap(W, run.labels, alpha, beta)
                what = f"swap {alpha} {beta}"
                if run.try_move(energy, mapping, swap_targets(alpha, beta), what):
                    changed = True
                beta += 1
            alpha += 1
        if not changed and not run.timed_out:
            converged = True
            break
    return run.result(sweeps, converged)


def adaptive_icm(W, config=None):
    """Greedy pointwise updates with an adaptive number of labels.

    Points are visited in index order. Each joins the cluster with the
    largest positive total weight to it, or becomes a singleton when every
    cluster repels it; ties keep the current label or go to the lowest id.
    """
    config = config or SolveConfig()
    run = _Run(W, config, "icm")
    indptr, indices, data = W.csr
    sweeps = 0
    converged = False
    while sweeps < config.max_sweeps and not run.out_of_time():
        sweeps += 1
        labels = run.labels.copy()
        moves, _ = _backend.icm_sweep(indptr, indices, data, labels, run.tol)
        if moves == 0:
            converged = True
            break
        run.accept(labels, f"icm sweep {sweeps}: {moves} moves")
    return run.result(sweeps, converged)


ALGORITHMS = {
    "swap": swap_and_explore,
    "expand": expand_and_explore,
    "icm": adaptive_icm,
}


def solve(W, algorithm="swap", config=None):
    try:
        fn = ALGORITHMS[algorithm]
    except KeyError:
        raise ValueError(
            f"unknown algorithm {algorithm!r}; choose from {sorted(ALGORITHMS)}"
        ) from None
    return fn(W, config)
