# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Dinic max-flow, residual reachability, ICM sweep.

Behaviour is identical to ``_pykernels``; only speed differs.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


cdef void _build_residual(i64 n_nodes, const i64[:] tail, const i64[:] head,
                          i64[:] start, i64[:] adj, i64[:] to) noexcept:
    cdef i64 n_edges = tail.shape[0]
    cdef i64 e, u, a
    cdef i64[:] fill
    for u in range(n_nodes + 1):
        start[u] = 0
    for e in range(n_edges):
        to[2 * e] = head[e]
        to[2 * e + 1] = tail[e]
        start[tail[e] + 1] += 1
        start[head[e] + 1] += 1
    for u in range(n_nodes):
        start[u + 1] += start[u]
    fill = np.array(start[:n_nodes], dtype=np.int64)
    # stable by arc id, same order as the pure-Python argsort
    for a in range(2 * n_edges):
        u = to[a ^ 1]
        adj[fill[u]] = a
        fill[u] += 1


def maxflow(i64 n_nodes, tail, head, cap, i64 source, i64 sink, double eps):
    cdef const i64[:] t = np.ascontiguousarray(tail, dtype=np.int64)
    cdef const i64[:] h = np.ascontiguousarray(head, dtype=np.int64)
    cdef const double[:] c = np.ascontiguousarray(cap, dtype=np.float64)
    cdef i64 n_edges = t.shape[0]
    cdef i64[:] start = np.empty(n_nodes + 1, dtype=np.int64)
    cdef i64[:] adj = np.empty(2 * n_edges, dtype=np.int64)
    cdef i64[:] to = np.empty(2 * n_edges, dtype=np.int64)
    _build_residual(n_nodes, t, h, start, adj, to)

    cdef double[:] res = np.zeros(2 * n_edges, dtype=np.float64)
    cdef i64[:] level = np.empty(n_nodes, dtype=np.int64)
    cdef i64[:] queue = np.empty(n_nodes, dtype=np.int64)
    cdef i64[:] it = np.empty(n_nodes, dtype=np.int64)
    cdef i64[:] path = np.empty(n_nodes + 1, dtype=np.int64)
    cdef i64 e, u, v, k, a, end, qh, qt, depth
    cdef double value = 0.0, push
    for e in range(n_edges):
        res[2 * e] = c[e]

    while True:
        for u in range(n_nodes):
            level[u] = -1
        level[source] = 0
        queue[0] = source
        qh = 0
        qt = 1
        while qh < qt:
            u = queue[qh]
            qh += 1
            for k in range(start[u], start[u + 1]):
                a = adj[k]
                v = to[a]
                if level[v] < 0 and res[a] > eps:
                    level[v] = level[u] + 1
                    queue[qt] = v
                    qt += 1
        if level[sink] < 0:
            break
        for u in range(n_nodes):
            it[u] = start[u]
        while True:
            depth = 0
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
                    depth -= 1
                    a = path[depth]
                    u = to[a ^ 1]
                    it[u] += 1
                else:
                    a = adj[k]
                    path[depth] = a
                    depth += 1
                    u = to[a]
            if u != sink:
                break
            push = res[path[0]]
            for k in range(1, depth):
                if res[path[k]] < push:
                    push = res[path[k]]
            for k in range(depth):
                a = path[k]
                res[a] -= push
                res[a ^ 1] += push
            value += push

    flow = np.empty(n_edges, dtype=np.float64)
    cdef double[:] f = flow
    for e in range(n_edges):
        f[e] = c[e] - res[2 * e]
    return value, flow


def residual_reach(i64 n_nodes, tail, head, cap, flow, i64 source, double eps):
    cdef const i64[:] t = np.ascontiguousarray(tail, dtype=np.int64)
    cdef const i64[:] h = np.ascontiguousarray(head, dtype=np.int64)
    cdef const double[:] c = np.ascontiguousarray(cap, dtype=np.float64)
    cdef const double[:] f = np.ascontiguousarray(flow, dtype=np.float64)
    cdef i64 n_edges = t.shape[0]
    cdef i64[:] start = np.empty(n_nodes + 1, dtype=np.int64)
    cdef i64[:] adj = np.empty(2 * n_edges, dtype=np.int64)
    cdef i64[:] to = np.empty(2 * n_edges, dtype=np.int64)
    _build_residual(n_nodes, t, h, start, adj, to)

    seen_arr = np.zeros(n_nodes, dtype=bool)
    cdef cnp.npy_bool[:] seen = seen_arr
    cdef i64[:] stack = np.empty(n_nodes, dtype=np.int64)
    cdef i64 top = 1, u, v, k, a, e
    cdef double r
    seen[source] = 1
    stack[0] = source
    while top > 0:
        top -= 1
        u = stack[top]
        for k in range(start[u], start[u + 1]):
            a = adj[k]
            e = a >> 1
            if (a & 1) == 0:
                r = c[e] - f[e]
            else:
                r = f[e]
            v = to[a]
            if r > eps and not seen[v]:
                seen[v] = 1
                stack[top] = v
                top += 1
    return seen_arr


def icm_sweep(indptr, indices, weights, cnp.ndarray labels, double tol):
    cdef const i64[:] ptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const i64[:] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef const double[:] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef i64[:] lab = labels
    cdef i64 n = lab.shape[0]
    cdef i64[:] sizes = np.bincount(labels, minlength=n).astype(np.int64)
    cdef i64[:] free = np.empty(n, dtype=np.int64)
    cdef double[:] acc = np.zeros(n, dtype=np.float64)
    cdef cnp.npy_bool[:] hit = np.zeros(n, dtype=bool)
    cdef i64[:] touched = np.empty(n, dtype=np.int64)
    cdef i64 n_free = 0, n_touched, i, k, c, cur, best_c, target, moves = 0
    cdef double best_a, a_cur, a_target, delta, gain = 0.0

    for c in range(n - 1, -1, -1):
        if sizes[c] == 0:
            free[n_free] = c
            n_free += 1

    for i in range(n):
        cur = lab[i]
        n_touched = 0
        for k in range(ptr[i], ptr[i + 1]):
            c = lab[idx[k]]
            if not hit[c]:
                hit[c] = 1
                acc[c] = 0.0
                touched[n_touched] = c
                n_touched += 1
            acc[c] += w[k]
        best_c = -1
        best_a = 0.0
        for k in range(n_touched):
            c = touched[k]
            if best_c < 0 or acc[c] > best_a or (acc[c] == best_a and c < best_c):
                best_c = c
                best_a = acc[c]
        a_cur = acc[cur] if hit[cur] else 0.0
        for k in range(n_touched):
            hit[touched[k]] = 0
        if best_c >= 0 and best_a > 0.0:
            target = best_c
            a_target = best_a
        else:
            target = -1
            a_target = 0.0
        delta = a_target - a_cur
        if delta <= tol:
            continue
        if target < 0:
            if sizes[cur] == 1:
                continue
            n_free -= 1
            target = free[n_free]
        sizes[cur] -= 1
        if sizes[cur] == 0:
            free[n_free] = cur
            n_free += 1
        sizes[target] += 1
        lab[i] = target
        moves += 1
        gain += delta
    return moves, gain


cdef inline i64 _mirror(i64 u, i64 m) noexcept:
    if u < m:
        return u + m
    if u < 2 * m:
        return u - m
    return 4 * m + 1 - u


def roof_labels(i64 n_nodes, tail, head, cap, flow, i64 source, i64 m, double eps):
    cdef const i64[:] t = np.ascontiguousarray(tail, dtype=np.int64)
    cdef const i64[:] h = np.ascontiguousarray(head, dtype=np.int64)
    cdef const double[:] c = np.ascontiguousarray(cap, dtype=np.float64)
    cdef const double[:] f = np.ascontiguousarray(flow, dtype=np.float64)
    cdef i64 n_edges = t.shape[0]
    cdef i64[:] start = np.empty(n_nodes + 1, dtype=np.int64)
    cdef i64[:] adj = np.empty(2 * n_edges, dtype=np.int64)
    cdef i64[:] to = np.empty(2 * n_edges, dtype=np.int64)
    _build_residual(n_nodes, t, h, start, adj, to)

    cdef cnp.npy_bool[:] reach = residual_reach(n_nodes, tail, head, cap, flow, source, eps)
    cdef i64[:] index = np.full(n_nodes, -1, dtype=np.int64)
    cdef i64[:] low = np.zeros(n_nodes, dtype=np.int64)
    cdef cnp.npy_bool[:] on_stack = np.zeros(n_nodes, dtype=bool)
    cdef i64[:] comp = np.full(n_nodes, -1, dtype=np.int64)
    cdef cnp.npy_bool[:] in_s = np.zeros(n_nodes, dtype=bool)
    cdef i64[:] stack = np.empty(n_nodes, dtype=np.int64)
    cdef i64[:] calls = np.empty(n_nodes, dtype=np.int64)
    cdef i64[:] it = np.empty(n_nodes, dtype=np.int64)
    cdef i64 sp = 0, cp = 0, counter = 0, n_comp = 0
    cdef i64 root, v, w, a, e, k, u, mu, cid, first, j
    cdef double r
    cdef bint ok

    for root in range(n_nodes):
        if index[root] != -1:
            continue
        index[root] = counter
        low[root] = counter
        counter += 1
        stack[sp] = root
        sp += 1
        on_stack[root] = 1
        it[root] = start[root]
        calls[0] = root
        cp = 1
        while cp > 0:
            v = calls[cp - 1]
            if it[v] < start[v + 1]:
                a = adj[it[v]]
                it[v] += 1
                e = a >> 1
                r = c[e] - f[e] if (a & 1) == 0 else f[e]
                if r <= eps:
                    continue
                w = to[a]
                if index[w] == -1:
                    index[w] = counter
                    low[w] = counter
                    counter += 1
                    stack[sp] = w
                    sp += 1
                    on_stack[w] = 1
                    it[w] = start[w]
                    calls[cp] = w
                    cp += 1
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            cp -= 1
            if cp > 0 and low[v] < low[calls[cp - 1]]:
                low[calls[cp - 1]] = low[v]
            if low[v] != index[v]:
                continue
            cid = n_comp
            n_comp += 1
            # members are stack[first:sp]
            first = sp
            while True:
                first -= 1
                w = stack[first]
                on_stack[w] = 0
                comp[w] = cid
                if w == v:
                    break
            ok = True
            if reach[stack[first]]:
                ok = True
            else:
                for j in range(first, sp):
                    u = stack[j]
                    mu = _mirror(u, m)
                    if reach[mu] or comp[mu] == cid:
                        ok = False
                        break
                    if comp[mu] != -1 and in_s[comp[mu]]:
                        ok = False
                        break
                if ok:
                    for j in range(first, sp):
                        u = stack[j]
                        for k in range(start[u], start[u + 1]):
                            a = adj[k]
                            e = a >> 1
                            r = c[e] - f[e] if (a & 1) == 0 else f[e]
                            if r <= eps:
                                continue
                            w = comp[to[a]]
                            if w != cid and not in_s[w]:
                                ok = False
                                break
                        if not ok:
                            break
            in_s[cid] = ok
            sp = first

    labels = np.full(m, -1, dtype=np.int8)
    cdef cnp.int8_t[:] lab = labels
    cdef bint x, y
    for u in range(m):
        x = in_s[comp[u]]
        y = in_s[comp[u + m]]
        if x and not y:
            lab[u] = 0
        elif y and not x:
            lab[u] = 1
    return labels
