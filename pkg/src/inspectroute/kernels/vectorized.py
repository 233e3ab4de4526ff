"""Pure numpy kernels, the path taken with ``INSPECTROUTE_DISABLE_NUMBA=1``.

Each function reproduces the arithmetic of its counterpart in ``loops``
operation for operation, so both paths return bit-identical results on the
same input. Annealing and branch and bound have no useful vectorized form;
they are re-exported from ``loops`` and run interpreted when numba is off.
"""
from itertools import islice, permutations

import numpy as np

from .loops import (  # noqa: F401  (re-exported)
    FW_SHRINK,
    anneal_chunk,
    bnb_fill_candidates,
    bnb_search,
    completion_bound,
    held_karp_route,
    or_opt_apply,
    reverse_segment,
    two_opt_delta,
    or_opt_delta,
)


def route_cost(D, order):
    if order.shape[0] < 2:
        return 0.0
    # cumsum is a strictly left-to-right accumulation
    return float(np.cumsum(D[order[:-1], order[1:]])[-1])


def floyd_warshall(D):
    n = D.shape[0]
    dist = D.copy()
    idx = np.arange(n)
    pred = np.where(np.isfinite(dist) | np.eye(n, dtype=bool), idx[:, None], -1).astype(np.int64)
    for k in range(n):
        cand = dist[:, k, None] + dist[None, k, :]
        better = cand < dist * FW_SHRINK
        dist = np.where(better, cand, dist)
        pred = np.where(better, pred[k][None, :], pred)
    return dist, pred


def _popcount(a):
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(a)
    c = np.zeros_like(a)
    while np.any(a):
        c += a & 1
        a = a >> 1
    return c


def held_karp_table(D):
    n = D.shape[0]
    full = 1 << n
    dp = np.full((full, n), np.inf)
    idx = np.arange(n)
    dp[1 << idx, idx] = 0.0
    masks = np.arange(full, dtype=np.int64)
    pc = _popcount(masks)
    for size in range(2, n + 1):
        layer = masks[pc == size]
        for j in range(n):
            Mj = layer[(layer >> j) & 1 == 1]
            prev = Mj ^ (1 << j)
            dp[Mj, j] = (dp[prev] + D[:, j]).min(axis=1)
    return dp


def nearest_neighbor(D, start):
    n = D.shape[0]
    visited = np.zeros(n, dtype=bool)
    order = np.empty(n, dtype=np.int64)
    order[0] = start
    visited[start] = True
    cur = start
    for t in range(1, n):
        row = np.where(visited, np.inf, D[cur])
        bi = int(np.argmin(row))
        if not row[bi] < np.inf:
            return order[:t]
        order[t] = bi
        visited[bi] = True
        cur = bi
    return order


def brute_force(D, chunk=200_000):
    n = D.shape[0]
    if n == 1:
        return np.zeros(1, dtype=np.int64), 0.0
    best = None
    best_cost = np.inf
    it = permutations(range(n))
    while True:
        block = np.array(list(islice(it, chunk)), dtype=np.int64)
        if block.size == 0:
            break
        block = block[block[:, 0] < block[:, -1]]
        if block.size == 0:
            continue
        costs = np.cumsum(D[block[:, :-1], block[:, 1:]], axis=1)[:, -1]
        k = int(np.argmin(costs))
        if costs[k] < best_cost:
            best_cost = float(costs[k])
            best = block[k].copy()
    return best, best_cost


def _two_opt_grid(n):
    I, J = np.triu_indices(n, 1)
    keep = ~((I == 0) & (J == n - 1))
    return I[keep], J[keep]


def two_opt_deltas(D, order, I, J):
    n = order.shape[0]
    o = order
    Ip = np.maximum(I - 1, 0)
    Jn = np.minimum(J + 1, n - 1)
    d = 0.0 + np.where(I > 0, D[o[Ip], o[J]] - D[o[Ip], o[I]], 0.0)
    return d + np.where(J < n - 1, D[o[I], o[Jn]] - D[o[J], o[Jn]], 0.0)


def two_opt_pass(D, order, thr):
    # same scan order and move sequence as the loop version: after applying
    # a move, resume at the next (i, j) on the updated route
    n = order.shape[0]
    if n < 3:
        return False
    I, J = _two_opt_grid(n)
    improved = False
    start = 0
    while start < I.shape[0]:
        d = two_opt_deltas(D, order, I[start:], J[start:])
        hits = np.flatnonzero(d < -thr)
        if hits.size == 0:
            break
        at = start + int(hits[0])
        reverse_segment(order, int(I[at]), int(J[at]))
        improved = True
        start = at + 1
    return improved


def _or_opt_grid(n, seg):
    m = n - seg
    nrev = 2 if seg > 1 else 1
    i, k, rev = np.meshgrid(np.arange(m + 1), np.arange(m + 1), np.arange(nrev), indexing="ij")
    i, k, rev = i.ravel(), k.ravel(), rev.ravel()
    keep = ~((k == i) & (rev == 0))
    return i[keep], k[keep], rev[keep] == 1


def or_opt_deltas(D, order, seg, i, k, rev):
    n = order.shape[0]
    m = n - seg
    o = order
    a = o[i]
    b = o[i + seg - 1]
    has_prev = i > 0
    has_next = i + seg < n
    prev = o[np.maximum(i - 1, 0)]
    nxt = o[np.minimum(i + seg, n - 1)]
    rm = 0.0 + np.where(has_prev, D[prev, a], 0.0)
    rm = rm + np.where(has_next, D[b, nxt], 0.0)
    rm = rm - np.where(has_prev & has_next, D[prev, nxt], 0.0)
    f = np.where(rev, b, a)
    last = np.where(rev, a, b)
    kp = np.maximum(k - 1, 0)
    p = np.where(kp < i, o[kp], o[np.minimum(kp + seg, n - 1)])
    kq = np.minimum(k, m - 1)
    q = np.where(kq < i, o[kq], o[np.minimum(kq + seg, n - 1)])
    add = 0.0 + np.where(k > 0, D[p, f], 0.0)
    add = add + np.where(k < m, D[last, q], 0.0)
    add = add - np.where((k > 0) & (k < m), D[p, q], 0.0)
    return add - rm


def or_opt_pass(D, order, seg, thr, buf):
    n = order.shape[0]
    if n <= seg:
        return False
    gi, gk, grev = _or_opt_grid(n, seg)
    improved = False
    start = 0
    while start < gi.shape[0]:
        d = or_opt_deltas(D, order, seg, gi[start:], gk[start:], grev[start:])
        hits = np.flatnonzero(d < -thr)
        if hits.size == 0:
            break
        at = start + int(hits[0])
        or_opt_apply(order, int(gi[at]), seg, int(gk[at]), bool(grev[at]), buf)
        improved = True
        start = at + 1
    return improved


def local_search(D, order, use_two_opt, use_or1, use_or2, rel_eps):
    buf = np.empty_like(order)
    while True:
        improved = False
        if use_two_opt and two_opt_pass(D, order, rel_eps * route_cost(D, order)):
            improved = True
        if use_or1 and or_opt_pass(D, order, 1, rel_eps * route_cost(D, order), buf):
            improved = True
        if use_or2 and or_opt_pass(D, order, 2, rel_eps * route_cost(D, order), buf):
            improved = True
        if not improved:
            return order
