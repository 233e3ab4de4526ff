"""Loop-form kernels, jitted with numba unless ``INSPECTROUTE_DISABLE_NUMBA`` is set.

With numba disabled the decorator is a no-op and the functions run
interpreted; ``vectorized`` replaces the ones that vectorize well and reuses
the rest (annealing, branch and bound).

Cost matrices are dense float64 with ``inf`` for absent edges. Routes are
int64 arrays of node indices.
"""
import math

import numpy as np

from .._accel import njit

# Floyd-Warshall only replaces an entry when the detour is shorter by more
# than this relative margin, so completion is idempotent and metric input is
# left bit-identical.
FW_SHRINK = 1.0 - 1e-12


@njit
def route_cost(D, order):
    total = 0.0
    for t in range(order.shape[0] - 1):
        total += D[order[t], order[t + 1]]
    return total


@njit
def floyd_warshall(D):
    n = D.shape[0]
    dist = D.copy()
    pred = np.full((n, n), -1, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if i == j or dist[i, j] < np.inf:
                pred[i, j] = i
    for k in range(n):
        for i in range(n):
            dik = dist[i, k]
            if dik == np.inf:
                continue
            for j in range(n):
                c = dik + dist[k, j]
                if c < dist[i, j] * FW_SHRINK:
                    dist[i, j] = c
                    pred[i, j] = pred[k, j]
    return dist, pred


@njit
def held_karp_table(D):
    n = D.shape[0]
    full = 1 << n
    dp = np.full((full, n), np.inf)
    for j in range(n):
        dp[1 << j, j] = 0.0
    for mask in range(1, full):
        if mask & (mask - 1) == 0:
            continue
        for j in range(n):
            if not (mask >> j) & 1:
                continue
            prev = mask ^ (1 << j)
            best = np.inf
            for k in range(n):
                if (prev >> k) & 1:
                    v = dp[prev, k] + D[k, j]
                    if v < best:
                        best = v
            dp[mask, j] = best
    return dp


@njit
def held_karp_route(D, dp):
    n = D.shape[0]
    mask = (1 << n) - 1
    j = 0
    for t in range(1, n):
        if dp[mask, t] < dp[mask, j]:
            j = t
    order = np.empty(n, dtype=np.int64)
    pos = n - 1
    order[pos] = j
    while mask & (mask - 1):
        prev = mask ^ (1 << j)
        best = np.inf
        bk = -1
        for k in range(n):
            if (prev >> k) & 1:
                v = dp[prev, k] + D[k, j]
                if v < best:
                    best = v
                    bk = k
        pos -= 1
        order[pos] = bk
        mask = prev
        j = bk
    return order


@njit
def nearest_neighbor(D, start):
    n = D.shape[0]
    visited = np.zeros(n, dtype=np.bool_)
    order = np.empty(n, dtype=np.int64)
    order[0] = start
    visited[start] = True
    cur = start
    for t in range(1, n):
        best = np.inf
        bi = -1
        for j in range(n):
            if not visited[j] and D[cur, j] < best:
                best = D[cur, j]
                bi = j
        if bi < 0:
            return order[:t]
        order[t] = bi
        visited[bi] = True
        cur = bi
    return order


@njit
def brute_force(D):
    """Lexicographic enumeration of open paths with first < last."""
    n = D.shape[0]
    perm = np.arange(n)
    best = perm.copy()
    best_cost = np.inf
    while True:
        if perm[0] < perm[n - 1]:
            c = route_cost(D, perm)
            if c < best_cost:
                best_cost = c
                best[:] = perm
        # next permutation
        i = n - 2
        while i >= 0 and perm[i] >= perm[i + 1]:
            i -= 1
        if i < 0:
            break
        j = n - 1
        while perm[j] <= perm[i]:
            j -= 1
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
        lo = i + 1
        hi = n - 1
        while lo < hi:
            tmp = perm[lo]
            perm[lo] = perm[hi]
            perm[hi] = tmp
            lo += 1
            hi -= 1
    return best, best_cost


# ---------------------------------------------------------------- moves


@njit
def two_opt_delta(D, order, i, j):
    # reverse order[i..j] of an open path, i < j
    n = order.shape[0]
    d = 0.0
    if i > 0:
        d += D[order[i - 1], order[j]] - D[order[i - 1], order[i]]
    if j < n - 1:
        d += D[order[i], order[j + 1]] - D[order[j], order[j + 1]]
    return d


@njit
def reverse_segment(order, i, j):
    while i < j:
        tmp = order[i]
        order[i] = order[j]
        order[j] = tmp
        i += 1
        j -= 1


@njit
def or_opt_delta(D, order, i, seg, k, rev):
    """Cost change of moving order[i:i+seg] into gap ``k`` of the remainder.

    Gap k sits between remainder[k-1] and remainder[k]; gaps 0 and n-seg are
    the two path ends. ``rev`` inserts the segment reversed.
    """
    n = order.shape[0]
    m = n - seg
    a = order[i]
    b = order[i + seg - 1]
    rm = 0.0
    if i > 0:
        rm += D[order[i - 1], a]
    if i + seg < n:
        rm += D[b, order[i + seg]]
    if i > 0 and i + seg < n:
        rm -= D[order[i - 1], order[i + seg]]
    if rev:
        f = b
        last = a
    else:
        f = a
        last = b
    add = 0.0
    p = 0
    q = 0
    if k > 0:
        p = order[k - 1] if k - 1 < i else order[k - 1 + seg]
        add += D[p, f]
    if k < m:
        q = order[k] if k < i else order[k + seg]
        add += D[last, q]
    if k > 0 and k < m:
        add -= D[p, q]
    return add - rm


@njit
def or_opt_apply(order, i, seg, k, rev, buf):
    n = order.shape[0]
    m = n - seg
    w = 0
    for t in range(m + 1):
        if t == k:
            for s in range(seg):
                buf[w] = order[i + seg - 1 - s] if rev else order[i + s]
                w += 1
        if t < m:
            buf[w] = order[t] if t < i else order[t + seg]
            w += 1
    for t in range(n):
        order[t] = buf[t]


@njit
def two_opt_pass(D, order, thr):
    n = order.shape[0]
    improved = False
    for i in range(n - 1):
        for j in range(i + 1, n):
            if i == 0 and j == n - 1:
                continue
            if two_opt_delta(D, order, i, j) < -thr:
                reverse_segment(order, i, j)
                improved = True
    return improved


@njit
def or_opt_pass(D, order, seg, thr, buf):
    n = order.shape[0]
    if n <= seg:
        return False
    m = n - seg
    improved = False
    nrev = 2 if seg > 1 else 1
    for i in range(m + 1):
        for k in range(m + 1):
            for rev in range(nrev):
                if k == i and rev == 0:
                    continue
                if or_opt_delta(D, order, i, seg, k, rev == 1) < -thr:
                    or_opt_apply(order, i, seg, k, rev == 1, buf)
                    improved = True
    return improved


@njit
def local_search(D, order, use_two_opt, use_or1, use_or2, rel_eps):
    """First-improvement descent; ``order`` is modified in place."""
    buf = np.empty_like(order)
    while True:
        improved = False
        if use_two_opt:
            thr = rel_eps * route_cost(D, order)
            if two_opt_pass(D, order, thr):
                improved = True
        if use_or1:
            thr = rel_eps * route_cost(D, order)
            if or_opt_pass(D, order, 1, thr, buf):
                improved = True
        if use_or2:
            thr = rel_eps * route_cost(D, order)
            if or_opt_pass(D, order, 2, thr, buf):
                improved = True
        if not improved:
            return order


# ---------------------------------------------------------------- annealing


@njit
def anneal_chunk(D, cur, best, fstate, istate, rnd, use_two_opt, use_or1, use_or2,
                 moves_per_temp, cooling, buf):
    """Run ``rnd.shape[0]`` Metropolis moves.

    fstate = [current cost, best cost, temperature]; istate = [moves done at
    the current temperature]. Each move consumes one row of four uniforms:
    move kind, two positions, acceptance.
    """
    n = cur.shape[0]
    cur_cost = fstate[0]
    best_cost = fstate[1]
    temp = fstate[2]
    at_temp = istate[0]
    n_or = 0
    if use_or1:
        n_or += 1
    if use_or2:
        n_or += 1
    for r in range(rnd.shape[0]):
        u0 = rnd[r, 0]
        if use_two_opt and n_or > 0:
            do_two = u0 < 0.5
            w = (u0 - 0.5) * 2.0
        else:
            do_two = use_two_opt
            w = u0
        if do_two:
            i = min(int(rnd[r, 1] * n), n - 1)
            j = min(int(rnd[r, 2] * n), n - 1)
            if i > j:
                tmp = i
                i = j
                j = tmp
            if i != j and not (i == 0 and j == n - 1):
                delta = two_opt_delta(D, cur, i, j)
                if delta <= 0.0 or rnd[r, 3] < math.exp(-delta / temp):
                    reverse_segment(cur, i, j)
                    cur_cost += delta
        elif n_or > 0:
            if n_or == 2:
                seg = 1 if w < 0.5 else 2
            elif use_or1:
                seg = 1
            else:
                seg = 2
            if seg < n:
                gaps = n - seg + 1
                i = min(int(rnd[r, 1] * gaps), gaps - 1)
                k = min(int(rnd[r, 2] * gaps), gaps - 1)
                if k != i:
                    delta = or_opt_delta(D, cur, i, seg, k, False)
                    if delta <= 0.0 or rnd[r, 3] < math.exp(-delta / temp):
                        or_opt_apply(cur, i, seg, k, False, buf)
                        cur_cost += delta
        if cur_cost < best_cost:
            best_cost = cur_cost
            best[:] = cur
        at_temp += 1
        if at_temp >= moves_per_temp:
            temp *= cooling
            at_temp = 0
    fstate[0] = cur_cost
    fstate[1] = best_cost
    fstate[2] = temp
    istate[0] = at_temp


# ---------------------------------------------------------------- branch and bound


@njit
def completion_bound(D, visited, end):
    """Admissible lower bound on finishing an open path that currently ends at ``end``.

    Max of two bounds over the unvisited set U:
      * every node of U is entered once, from U or ``end``;
      * half the degree sum: ``end`` has degree one, every node of U degree
        two except the unknown terminal, so drop the largest second-cheapest
        incident edge.
    """
    n = D.shape[0]
    r = 0
    for u in range(n):
        if not visited[u]:
            r += 1
    if r == 0:
        return 0.0
    enter = 0.0
    deg = 0.0
    max_m2 = 0.0
    end_min = np.inf
    for u in range(n):
        if visited[u]:
            continue
        if D[end, u] < end_min:
            end_min = D[end, u]
        m1 = D[end, u]
        m2 = np.inf
        for v in range(n):
            if v == u or visited[v]:
                continue
            c = D[v, u]
            if c < m1:
                m2 = m1
                m1 = c
            elif c < m2:
                m2 = c
        enter += m1
        if r > 1:
            deg += m1 + m2
            if m2 > max_m2:
                max_m2 = m2
    if r == 1:
        return enter
    half = 0.5 * (end_min + deg - max_m2)
    return enter if enter > half else half


@njit
def bnb_fill_candidates(D, visited, last, cand_row):
    # unvisited nodes sorted by edge cost from ``last``, ties to lowest index
    n = D.shape[0]
    cnt = 0
    for v in range(n):
        if visited[v]:
            continue
        c = D[last, v]
        pos = cnt
        while pos > 0 and D[last, cand_row[pos - 1]] > c:
            cand_row[pos] = cand_row[pos - 1]
            pos -= 1
        cand_row[pos] = v
        cnt += 1
    return cnt


@njit
def bnb_search(D, path, visited, cost_at, cand, ncand, ptr, istate, fstate, best, budget, rel_tol):
    """Resumable depth-first search over open paths with first < last node.

    istate = [depth, exhausted flag, expanded nodes]; fstate = [incumbent cost].
    Returns after ``budget`` expansions or when the tree is exhausted.
    """
    n = D.shape[0]
    d = istate[0]
    inc = fstate[0]
    spent = 0
    while spent < budget:
        t = d
        if ptr[t] >= ncand[t]:
            if t == 0:
                istate[1] = 1
                break
            d -= 1
            visited[path[d]] = False
            continue
        v = cand[t, ptr[t]]
        ptr[t] += 1
        tol = rel_tol * inc
        if t == 0:
            newcost = 0.0
        else:
            newcost = cost_at[t - 1] + D[path[t - 1], v]
            if newcost >= inc - tol:
                # candidates are sorted by edge cost: the rest are no better
                ptr[t] = ncand[t]
                continue
        if t == n - 1:
            if v > path[0] and newcost < inc - tol:
                inc = newcost
                path[t] = v
                best[:] = path
            continue
        path[t] = v
        visited[v] = True
        feasible = False
        for u in range(path[0] + 1, n):
            if not visited[u]:
                feasible = True
                break
        if not feasible or newcost + completion_bound(D, visited, v) >= inc - tol:
            visited[v] = False
            continue
        cost_at[t] = newcost
        d = t + 1
        ncand[d] = bnb_fill_candidates(D, visited, v, cand[d])
        ptr[d] = 0
        spent += 1
    istate[0] = d
    istate[2] += spent
    fstate[0] = inc
