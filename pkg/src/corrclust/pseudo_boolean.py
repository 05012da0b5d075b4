"""Quadratic pseudo-boolean energies and their graph-cut solvers.

:func:`qpbo_solve` computes the roof-dual partial labeling of an arbitrary
(possibly non-submodular) binary energy from a max-flow on the doubled
graph, in which every variable ``x_i`` has a node for ``x_i`` and one for
its complement. :func:`qpbo_improve` takes a complete labeling and returns
one of no higher energy by repeatedly conditioning on part of it and
merging in the roof-dual labels of the rest.
"""

from dataclasses import InitVar, dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from corrclust import _backend

__all__ = [
    "UNLABELED",
    "BinaryEnergy",
    "FlowNetwork",
    "condition",
    "max_flow",
    "qpbo_solve",
    "qpbo_improve",
]

UNLABELED = -1

_REL_EPS = 1e-12


@dataclass(eq=False)
class BinaryEnergy:
    """``E(x) = constant + sum_i unary[i, x_i] + sum_p table_p[2 x_a + x_b]``.

    Attributes:
        m: number of variables.
        unary: ``(m, 2)`` array, ``unary[i] = (theta_i(0), theta_i(1))``.
        pair_a, pair_b: variable indices of each pairwise term, ``a < b``.
        pair_table: ``(P, 4)`` array of ``(theta(0,0), theta(0,1), theta(1,0), theta(1,1))``.
        constant: additive offset.
    """

    m: int
    unary: np.ndarray = None
    pair_a: np.ndarray = None
    pair_b: np.ndarray = None
    pair_table: np.ndarray = None
    constant: float = 0.0
    check: InitVar[bool] = True

    def __post_init__(self, check):
        m = self.m = int(self.m)
        self.unary = (
            np.zeros((m, 2)) if self.unary is None
            else np.asarray(self.unary, dtype=np.float64).reshape(m, 2)
        )
        self.pair_a = np.asarray(
            [] if self.pair_a is None else self.pair_a, dtype=np.int64
        ).reshape(-1)
        self.pair_b = np.asarray(
            [] if self.pair_b is None else self.pair_b, dtype=np.int64
        ).reshape(-1)
        self.pair_table = np.asarray(
            [] if self.pair_table is None else self.pair_table, dtype=np.float64
        ).reshape(-1, 4)
        self.constant = float(self.constant)
        if check:
            self._validate()

    def _validate(self):
        a, b = self.pair_a, self.pair_b
        if not (len(a) == len(b) == len(self.pair_table)):
            raise ValueError("pairwise arrays differ in length")
        if len(a):
            if a.min() < 0 or b.max() >= self.m or np.any(a >= b):
                raise ValueError("pairwise terms need 0 <= a < b < m")
            key = np.sort(a * self.m + b)
            if np.any(key[1:] == key[:-1]):
                raise ValueError("duplicate pairwise term")
        if not (
            np.all(np.isfinite(self.unary))
            and np.all(np.isfinite(self.pair_table))
            and np.isfinite(self.constant)
        ):
            raise ValueError("energy values must be finite")

    @classmethod
    def from_terms(cls, m, unary=None, pairwise=(), constant=0.0):
        """Build from ``unary = [(t0, t1), ...]`` and ``pairwise = [(a, b, table), ...]``."""
        pairwise = list(pairwise)
        a = [p[0] for p in pairwise]
        b = [p[1] for p in pairwise]
        tab = [list(p[2]) for p in pairwise]
        return cls(m, unary, a, b, tab, constant)

    @property
    def n_pairs(self):
        return len(self.pair_a)

    def lambdas(self):
        """``theta(0,1) + theta(1,0) - theta(0,0) - theta(1,1)`` per pair; >= 0 is submodular."""
        t = self.pair_table
        return t[:, 1] + t[:, 2] - t[:, 0] - t[:, 3]

    def is_submodular(self):
        return bool(np.all(self.lambdas() >= 0.0))

    def scale(self):
        """Sum of absolute term values; sets the float tolerance."""
        return (
            float(np.abs(self.unary).sum())
            + float(np.abs(self.pair_table).sum())
            + abs(self.constant)
        )

    def eval(self, x):
        """Energy of the full 0/1 assignment ``x``."""
        x = np.asarray(x, dtype=np.int64)
        if x.shape != (self.m,):
            raise ValueError(f"assignment has shape {x.shape}, expected ({self.m},)")
        total = self.constant + self.unary[np.arange(self.m), x].sum()
        if self.n_pairs:
            idx = 2 * x[self.pair_a] + x[self.pair_b]
            total += self.pair_table[np.arange(self.n_pairs), idx].sum()
        return float(total)


def condition(e, free, x):
    """Restrict ``e`` to the variables in ``free``, the rest fixed to ``x``.

    Returns ``(reduced, index)`` where ``index[r]`` is the original variable
    behind reduced variable ``r``. For any completion ``y`` of the free
    variables, ``reduced.eval(y[index]) == e.eval(y)``.
    """
    free = np.asarray(free, dtype=bool)
    x = np.asarray(x, dtype=np.int64)
    index = np.flatnonzero(free)
    local = np.full(e.m, -1, dtype=np.int64)
    local[index] = np.arange(len(index))

    fixed = ~free
    const = e.constant + e.unary[fixed, x[fixed]].sum()
    unary = e.unary[index].copy()

    a, b, tab = e.pair_a, e.pair_b, e.pair_table
    fa, fb = free[a], free[b]
    both = fa & fb
    rows = np.arange(len(a))

    none = ~fa & ~fb
    const += tab[rows[none], 2 * x[a[none]] + x[b[none]]].sum()

    # a free, b fixed: theta(x_a, x_b) as a unary on a
    sel = fa & ~fb
    xb = x[b[sel]]
    np.add.at(unary[:, 0], local[a[sel]], tab[rows[sel], xb])
    np.add.at(unary[:, 1], local[a[sel]], tab[rows[sel], 2 + xb])

    sel = ~fa & fb
    xa = x[a[sel]]
    np.add.at(unary[:, 0], local[b[sel]], tab[rows[sel], 2 * xa])
    np.add.at(unary[:, 1], local[b[sel]], tab[rows[sel], 2 * xa + 1])

    reduced = BinaryEnergy(
        len(index), unary, local[a[both]], local[b[both]], tab[both], const, check=False
    )
    return reduced, index


# ---------------------------------------------------------------------------
# max-flow


@dataclass(eq=False)
class FlowNetwork:
    """Directed network with nonnegative float capacities."""

    n_nodes: int
    tail: np.ndarray
    head: np.ndarray
    capacity: np.ndarray
    source: int
    sink: int

    def __post_init__(self):
        self.tail = np.asarray(self.tail, dtype=np.int64).reshape(-1)
        self.head = np.asarray(self.head, dtype=np.int64).reshape(-1)
        self.capacity = np.asarray(self.capacity, dtype=np.float64).reshape(-1)
        if not (len(self.tail) == len(self.head) == len(self.capacity)):
            raise ValueError("arc arrays differ in length")
        if len(self.tail) and (
            min(self.tail.min(), self.head.min()) < 0
            or max(self.tail.max(), self.head.max()) >= self.n_nodes
        ):
            raise ValueError("arc endpoint out of range")
        if not np.all(np.isfinite(self.capacity)) or np.any(self.capacity < 0):
            raise ValueError("capacities must be finite and nonnegative")
        if self.source == self.sink:
            raise ValueError("source and sink must differ")

    @classmethod
    def from_arcs(cls, n_nodes, arcs, source, sink):
        arcs = list(arcs)
        return cls(
            n_nodes,
            [a[0] for a in arcs],
            [a[1] for a in arcs],
            [a[2] for a in arcs],
            source,
            sink,
        )

    def eps(self):
        top = float(self.capacity.max()) if len(self.capacity) else 0.0
        return _REL_EPS * top


def max_flow(g):
    """Maximum ``source -> sink`` flow of ``g``.

    Returns ``(value, cut)``: the flow value and the set of nodes reachable
    from the source in the final residual graph, a minimum cut's source side.
    """
    eps = g.eps()
    value, flow = _backend.maxflow(
        g.n_nodes, g.tail, g.head, g.capacity, g.source, g.sink, eps
    )
    reach = _backend.residual_reach(
        g.n_nodes, g.tail, g.head, g.capacity, flow, g.source, eps
    )
    return float(value), set(np.flatnonzero(reach).tolist())


# ---------------------------------------------------------------------------
# roof duality


def _normal_form(e):
    """Rewrite ``e`` as ``const + sum lin_i x_i + sum lam (1-x_a) x_b + sum mu x_a x_b``.

    Returns ``(const, lin, sub_mask, lam)``; pairs with ``lam < 0`` are the
    non-submodular ones and carry ``mu = -lam`` on ``x_a x_b``.
    """
    m = e.m
    tab = e.pair_table
    A, B, C, D = tab[:, 0], tab[:, 1], tab[:, 2], tab[:, 3]
    const = e.constant + e.unary[:, 0].sum() + A.sum()
    lin = e.unary[:, 1] - e.unary[:, 0]
    lin = lin + np.bincount(e.pair_a, C - A, minlength=m)
    lin = lin + np.bincount(e.pair_b, D - C, minlength=m)
    lam = B + C - A - D
    sub = lam >= 0.0
    # lam (1 - x_a) x_b = lam x_b + (-lam) x_a x_b
    lin = lin + np.bincount(e.pair_b[~sub], lam[~sub], minlength=m)
    return float(const), lin, sub, lam


def _doubled_network(e):
    """Arcs of the roof-dual network; arc ``k`` and ``k + K`` are mirrors.

    Node ``i`` stands for ``x_i``, node ``m + i`` for its complement;
    source-side means value 0.
    """
    m = e.m
    s, t = 2 * m, 2 * m + 1
    const, lin, sub, lam = _normal_form(e)
    a, b = e.pair_a, e.pair_b
    var = np.arange(m)

    pos = lin > 0.0
    neg = lin < 0.0
    const += lin[neg].sum()
    tails = [np.full(pos.sum(), s), var[neg], a[sub], m + b[~sub]]
    heads = [var[pos], np.full(neg.sum(), t), b[sub], a[~sub]]
    caps = [lin[pos] / 2, -lin[neg] / 2, lam[sub] / 2, -lam[~sub] / 2]
    tail = np.concatenate(tails).astype(np.int64)
    head = np.concatenate(heads).astype(np.int64)
    cap = np.concatenate(caps)
    keep = cap > 0.0
    tail, head, cap = tail[keep], head[keep], cap[keep]

    def mirror(v):
        out = np.where(v < m, v + m, v - m)
        out[v == s] = t
        out[v == t] = s
        return out

    tail, head = np.concatenate([tail, mirror(head)]), np.concatenate([head, mirror(tail)])
    cap = np.concatenate([cap, cap])
    return const, tail, head, cap


def _roof_dual(e):
    """Partial labeling and lower bound from the doubled network."""
    m = e.m
    s, t = 2 * m, 2 * m + 1
    const, tail, head, cap = _doubled_network(e)
    eps = _REL_EPS * max(e.scale(), 1.0)
    value, flow = _backend.maxflow(2 * m + 2, tail, head, cap, s, t, eps)
    # average with the mirrored flow so the residual graph is symmetric
    half = len(cap) // 2
    sym = 0.5 * (flow[:half] + flow[half:])
    flow = np.concatenate([sym, sym])
    labels = _backend.roof_labels(2 * m + 2, tail, head, cap, flow, s, m, eps)
    return labels, const + float(value)


def qpbo_solve(e):
    """Roof-duality partial labeling of a binary energy.

    Returns ``(labels, lower_bound)``. ``labels`` is an int8 array holding
    0, 1 or :data:`UNLABELED`; some global minimizer of ``e`` agrees with
    every labeled variable, and ``lower_bound`` never exceeds the minimum.
    Labels come from the largest symmetric minimum cut reachable from the
    residual graph's component structure, so a submodular energy always
    comes back fully labeled at its minimum.
    """
    if e.m == 0:
        return np.zeros(0, dtype=np.int8), e.constant
    return _roof_dual(e)


def _components(e, free):
    """Connected components of the pairwise graph restricted to ``free``."""
    both = free[e.pair_a] & free[e.pair_b]
    graph = coo_matrix(
        (np.ones(both.sum()), (e.pair_a[both], e.pair_b[both])), shape=(e.m, e.m)
    )
    _, comp = connected_components(graph, directed=False)
    return comp


def _improve_pass(e, x, order, tol):
    """One probing pass; returns a labeling no worse than ``x``."""
    x = x.copy()
    labels, _ = qpbo_solve(e)
    done = labels != UNLABELED
    cand = np.where(done, labels, x)
    if e.eval(cand) < e.eval(x) - tol:
        x = cand
    for p in order:
        if done[p]:
            continue
        done[p] = True
        free = ~done
        if not free.any():
            break
        comp = _components(e, free | (np.arange(e.m) == p))
        region = free & (comp == comp[p])
        if not region.any():
            continue
        reduced, index = condition(e, region, x)
        labels, _ = qpbo_solve(reduced)
        hit = labels != UNLABELED
        if not hit.any():
            continue
        done[index[hit]] = True
        before = x[index]
        after = np.where(hit, labels, before)
        if reduced.eval(after) < reduced.eval(before) - tol:
            x[index] = after
    return x


def qpbo_improve(e, x0, seed=0):
    """Improve the complete labeling ``x0`` of ``e`` (QPBO-I).

    Variables are visited in a seeded random order. Each visit fixes the
    variable to its current value and solves the roof dual of the connected
    region of still-undecided variables around it; the labels it returns
    replace the current ones only if the energy strictly drops. Passes repeat
    until one makes no change, so the result is a fixed point: calling again
    with the same seed returns it unchanged.
    """
    x = np.asarray(x0, dtype=np.int64).copy()
    if x.shape != (e.m,):
        raise ValueError(f"assignment has shape {x.shape}, expected ({e.m},)")
    if not np.all((x == 0) | (x == 1)):
        raise ValueError("assignment must be 0/1")
    if e.m == 0:
        return x
    order = np.random.default_rng(seed).permutation(e.m)
    tol = _REL_EPS * max(e.scale(), 1.0)
    while True:
        nxt = _improve_pass(e, x, order, tol)
        if np.array_equal(nxt, x):
            return x
        x = nxt
