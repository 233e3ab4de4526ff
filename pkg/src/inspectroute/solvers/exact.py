"""Exact open-path solvers: enumeration, Held-Karp and branch and bound."""
from __future__ import annotations

import math
import time

import numpy as np

from .. import kernels
from ..core import Instance, SolveResult, as_order, canonical, evaluate_route
from ..errors import NotComplete, TooLarge
from .config import SolverConfig

BRUTE_FORCE_MAX_N = 10
HELD_KARP_MAX_N = 24
# node expansions per kernel call, scaled so a call stays around a few ms
BNB_WORK_PER_CALL = 2_000_000
BNB_REL_TOL = 1e-12


def cost_matrix(instance: Instance) -> np.ndarray:
    if not instance.is_complete:
        raise NotComplete(f"instance {instance.name!r} has absent edges; run metric_completion first")
    return np.ascontiguousarray(instance.costs)


def _result(instance, route, solver_id, seed, t0, optimal, lower_bound=None, **stats):
    route = canonical(route)
    cost = evaluate_route(instance, route)
    if optimal and lower_bound is None:
        lower_bound = cost
    return SolveResult(route, cost, solver_id, int(seed), time.perf_counter() - t0, optimal, lower_bound, stats)


def brute_force(instance: Instance, config: SolverConfig | None = None) -> SolveResult:
    """Enumerate every open path once per orientation (n!/2); n <= 10."""
    t0 = time.perf_counter()
    seed = config.seed if config else 0
    D = cost_matrix(instance)
    n = instance.n
    if n > BRUTE_FORCE_MAX_N:
        raise TooLarge(n, BRUTE_FORCE_MAX_N)
    if n == 1:
        return _result(instance, (0,), "brute_force", seed, t0, True)
    order, _ = kernels.brute_force(D)
    return _result(instance, order.tolist(), "brute_force", seed, t0, True)


def held_karp(instance: Instance, config: SolverConfig | None = None) -> SolveResult:
    """Subset dynamic program with a free start: every singleton starts at cost 0."""
    t0 = time.perf_counter()
    seed = config.seed if config else 0
    D = cost_matrix(instance)
    n = instance.n
    if n > HELD_KARP_MAX_N:
        raise TooLarge(n, HELD_KARP_MAX_N)
    if n == 1:
        return _result(instance, (0,), "held_karp", seed, t0, True)
    dp = kernels.held_karp_table(D)
    order = kernels.held_karp_route(D, dp)
    return _result(instance, order.tolist(), "held_karp", seed, t0, True)


def _frontier_bound(D, path, cost_at, cand, ncand, ptr, depth, incumbent):
    """Smallest bound among subtrees the search has not opened yet."""
    n = D.shape[0]
    lb = incumbent
    visited = np.zeros(n, dtype=np.bool_)
    for t in range(depth + 1):
        if t > 0:
            visited[path[t - 1]] = True
        for idx in range(ptr[t], ncand[t]):
            v = int(cand[t, idx])
            partial = 0.0 if t == 0 else cost_at[t - 1] + D[path[t - 1], v]
            if t < n - 1:
                visited[v] = True
                partial += kernels.completion_bound(D, visited, v)
                visited[v] = False
            lb = min(lb, partial)
    return lb


def branch_and_bound(instance: Instance, config: SolverConfig | None = None, initial=None) -> SolveResult:
    """Depth-first branch and bound over open paths.

    Children are tried cheapest edge first. A partial path is pruned when its
    cost plus :func:`kernels.completion_bound` reaches the incumbent. Without
    a warm start the incumbent is nearest neighbour plus local search. The
    result carries the final global lower bound; ``optimal`` is true only if
    the tree was exhausted inside the time limit.
    """
    from .heuristics import local_search, nearest_neighbor

    config = config or SolverConfig()
    t0 = time.perf_counter()
    deadline = t0 + config.time_limit
    D = cost_matrix(instance)
    n = instance.n
    if n <= 2:
        return _result(instance, tuple(range(n)), "branch_and_bound", config.seed, t0, True)
    if initial is not None:
        start = as_order(canonical(initial))
    else:
        start = as_order(canonical(local_search(instance, nearest_neighbor(instance, 0), config)))
    path = np.zeros(n, dtype=np.int64)
    visited = np.zeros(n, dtype=np.bool_)
    cost_at = np.zeros(n)
    cand = np.zeros((n, n), dtype=np.int64)
    ncand = np.zeros(n, dtype=np.int64)
    ptr = np.zeros(n, dtype=np.int64)
    cand[0, : n - 1] = np.arange(n - 1)  # a path's first node is its smaller end
    ncand[0] = n - 1
    istate = np.zeros(3, dtype=np.int64)
    fstate = np.array([kernels.route_cost(D, start)])
    best = start.copy()
    budget = max(1, BNB_WORK_PER_CALL // (n * n))
    timed_out = False
    while not istate[1]:
        if time.perf_counter() >= deadline:
            timed_out = True
            break
        kernels.bnb_search(D, path, visited, cost_at, cand, ncand, ptr, istate, fstate, best, budget, BNB_REL_TOL)
    if timed_out:
        lb = _frontier_bound(D, path, cost_at, cand, ncand, ptr, int(istate[0]), float(fstate[0]))
    else:
        lb = None
    res = _result(instance, best.tolist(), "branch_and_bound", config.seed, t0, not timed_out,
                  lower_bound=lb, expanded=int(istate[2]))
    if res.lower_bound is not None and res.lower_bound > res.cost:
        res = SolveResult(res.route, res.cost, res.solver_id, res.seed, res.runtime_seconds,
                          res.optimal, res.cost, res.stats)
    return res


def brute_force_tour(instance: Instance) -> tuple[tuple, float]:
    """Cheapest closed tour by enumeration with node 0 fixed first; n <= 10.

    Returns ``(tour, cost)``. Used to check the dummy-node reduction, so it
    ignores absent edges only in the sense that they cost ``inf``.
    """
    from itertools import permutations

    n = instance.n
    if n > BRUTE_FORCE_MAX_N:
        raise TooLarge(n, BRUTE_FORCE_MAX_N)
    if n == 1:
        return (0,), 0.0
    D = np.asarray(instance.costs)
    rest = np.array(list(permutations(range(1, n))), dtype=np.int64)
    tours = np.hstack([np.zeros((rest.shape[0], 1), dtype=np.int64), rest])
    closed = np.hstack([tours, tours[:, :1]])
    costs = D[closed[:, :-1], closed[:, 1:]].sum(axis=1)
    k = int(np.argmin(costs))
    tour = tuple(int(v) for v in tours[k])
    legs = [float(D[a, b]) for a, b in zip(tour, tour[1:] + tour[:1])]
    return tour, math.fsum(legs)
