"""Pure-Python versions of the hot kernels.

Used when the compiled ``_kernels`` extension is missing, or when
``CORRCLUST_PURE_PYTHON`` is set. Signatures and results match the
compiled module exactly; the test-suite checks both.
"""

from collections import deque

import numpy as np


def _residual_graph(n_nodes, tail, head):
    """CSR over the 2*E residual arcs; arc 2e is forward, 2e+1 its reverse."""
    n_arcs = 2 * len(tail)
    frm = np.empty(n_arcs, dtype=np.int64)
    to = np.empty(n_arcs, dtype=np.int64)
    frm[0::2] = tail
    frm[1::2] = head
    to[0::2] = head
    to[1::2] = tail
    order = np.argsort(frm, kind="stable")
    start = np.zeros(n_nodes + 1, dtype=np.int64)
    np.add.at(start, frm + 1, 1)
    np.cumsum(start, out=start)
    return start.tolist(), order.tolist(), to.tolist()


def maxflow(n_nodes, tail, head, cap, source, sink, eps):
    """Dinic max-flow with float capacities.

    Returns ``(value, flow)`` where ``flow[e]`` is the flow on input arc ``e``.
    Residual capacities at or below ``eps`` are treated as saturated.
    """
    n_edges = len(tail)
    start, adj, to = _residual_graph(n_nodes, tail, head)
    res = [0.0] * (2 * n_edges)
    for e in range(n_edges):
        res[2 * e] = float(cap[e])
    value = 0.0
    while True:
        level = [-1] * n_nodes
        level[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for k in range(start[u], start[u + 1]):
                a = adj[k]
                v = to[a]
                if level[v] < 0 and res[a] > eps:
                    level[v] = level[u] + 1
                    queue.append(v)
        if level[sink] < 0:
            break
        it = start[:-1]
        while True:
            # walk one augmenting path in the level graph
            path = []
            u = source
            while u != sink:
                end = start[u + 1]
                k = it[u]
                while k < end:
                    a = adj[k]
                    v = to[a]
                    if res[a] > eps and level[v] == level[u] + 1:
                        break
                    k += 1
                it[u] = k
                if k == end:
                    if u == source:
                        break
                    level[u] = -1
                    a = path.pop()
                    u = to[a ^ 1]
                    it[u] += 1
                else:
                    path.append(adj[k])
                    u = to[adj[k]]
            if u != sink:
                break
            push = min(res[a] for a in path)
            for a in path:
                res[a] -= push
                res[a ^ 1] += push
            value += push
    flow = np.array([cap[e] - res[2 * e] for e in range(n_edges)], dtype=np.float64)
    return value, flow


def residual_reach(n_nodes, tail, head, cap, flow, source, eps):
    """Nodes reachable from ``source`` in the residual graph of ``flow``."""
    start, adj, to = _residual_graph(n_nodes, tail, head)
    seen = np.zeros(n_nodes, dtype=bool)
    seen[source] = True
    stack = [source]
    while stack:
        u = stack.pop()
        for k in range(start[u], start[u + 1]):
            a = adj[k]
            e = a >> 1
            r = cap[e] - flow[e] if (a & 1) == 0 else flow[e]
            v = to[a]
            if r > eps and not seen[v]:
                seen[v] = True
                stack.append(v)
    return seen


def icm_sweep(indptr, indices, weights, labels, tol):
    """One in-place adaptive-label ICM sweep over points in index order.

    ``labels`` must hold ids in ``[0, n)``. Returns ``(moves, gain)`` where
    ``gain`` is the total Potts energy decrease.
    """
    n = len(labels)
    sizes = np.bincount(labels, minlength=n).tolist()
    free = [c for c in range(n - 1, -1, -1) if sizes[c] == 0]
    moves = 0
    gain = 0.0
    for i in range(n):
        cur = int(labels[i])
        acc = {}
        for k in range(indptr[i], indptr[i + 1]):
            c = int(labels[indices[k]])
            acc[c] = acc.get(c, 0.0) + weights[k]
        best_c = -1
        best_a = 0.0
        for c, a in acc.items():
            if best_c < 0 or a > best_a or (a == best_a and c < best_c):
                best_c, best_a = c, a
        a_cur = acc.get(cur, 0.0)
        if best_c >= 0 and best_a > 0.0:
            target, a_target = best_c, best_a
        else:
            target, a_target = -1, 0.0
        delta = a_target - a_cur
        if delta <= tol:
            continue
        if target < 0:
            if sizes[cur] == 1:
                continue
            target = free.pop()
        sizes[cur] -= 1
        if sizes[cur] == 0:
            free.append(cur)
        sizes[target] += 1
        labels[i] = target
        moves += 1
        gain += delta
    return moves, gain


def _mirror(u, m):
    if u < m:
        return u + m
    if u < 2 * m:
        return u - m
    return 4 * m + 1 - u  # source 2m <-> sink 2m+1


def roof_labels(n_nodes, tail, head, cap, flow, source, m, eps):
    """Partial labeling from a symmetric max-flow of the doubled network.

    Nodes ``0..m-1`` are the variables, ``m..2m-1`` their complements,
    ``2m``/``2m+1`` source/sink. Strongly connected components of the
    residual graph come out of Tarjan's algorithm successors-first; each is
    put on the source side when all of its successors already are and its
    mirror is not, which grows the source-reachable set into the largest
    closed set it can without ever holding a node and its complement.
    Returns an int8 array: 0, 1, or -1 for unlabeled.
    """
    start, adj, to = _residual_graph(n_nodes, tail, head)

    def residual(a):
        e = a >> 1
        return cap[e] - flow[e] if (a & 1) == 0 else flow[e]

    reach = residual_reach(n_nodes, tail, head, cap, flow, source, eps)
    index = [-1] * n_nodes
    low = [0] * n_nodes
    on_stack = [False] * n_nodes
    comp = [-1] * n_nodes
    in_s = []
    stack = []
    counter = 0
    for root in range(n_nodes):
        if index[root] != -1:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        it = {root: start[root]}
        calls = [root]
        while calls:
            v = calls[-1]
            if it[v] < start[v + 1]:
                a = adj[it[v]]
                it[v] += 1
                if residual(a) <= eps:
                    continue
                w = to[a]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    it[w] = start[w]
                    calls.append(w)
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            calls.pop()
            if calls:
                low[calls[-1]] = min(low[calls[-1]], low[v])
            if low[v] != index[v]:
                continue
            cid = len(in_s)
            members = []
            while True:
                w = stack.pop()
                on_stack[w] = False
                comp[w] = cid
                members.append(w)
                if w == v:
                    break
            in_s.append(_decide(members, cid, comp, in_s, reach, m, start, adj, to, residual, eps))
    labels = np.full(m, -1, dtype=np.int8)
    for p in range(m):
        a, b = in_s[comp[p]], in_s[comp[p + m]]
        if a and not b:
            labels[p] = 0
        elif b and not a:
            labels[p] = 1
    return labels


def _decide(members, cid, comp, in_s, reach, m, start, adj, to, residual, eps):
    if reach[members[0]]:
        return True
    for u in members:
        mu = _mirror(u, m)
        if reach[mu] or comp[mu] == cid:
            return False
        if comp[mu] != -1 and in_s[comp[mu]]:
            return False
    for u in members:
        for k in range(start[u], start[u + 1]):
            a = adj[k]
            if residual(a) <= eps:
                continue
            c = comp[to[a]]
            if c != cid and not in_s[c]:
                return False
    return True
