"""Constructive, local-search and annealing heuristics for open paths."""
from __future__ import annotations

import math
import time

import numpy as np

from .. import kernels
from ..core import Instance, Route, SolveResult, as_order, canonical, evaluate_route
from ..errors import BadStart
from ..ingest.generate import make_rng
from .config import SolverConfig
from .exact import cost_matrix

# improvement threshold relative to the current route cost
LS_REL_EPS = 1e-12
CHUNK_MOVES = 1000
CHUNKS_PER_DRAW = 64


def nearest_neighbor(instance: Instance, start: int = 0) -> Route:
    D = cost_matrix(instance)
    if not 0 <= start < instance.n:
        raise BadStart(f"start node {start} not in [0, {instance.n})")
    return tuple(kernels.nearest_neighbor(D, int(start)).tolist())


def local_search(instance: Instance, route, config: SolverConfig | None = None) -> Route:
    """First-improvement 2-opt / Or-opt descent to a local optimum.

    Passes over the enabled move kinds repeat until one full round finds no
    move improving the cost by more than 1e-12 relative.
    """
    config = config or SolverConfig()
    D = cost_matrix(instance)
    order = as_order(route).copy()
    if order.shape[0] < 3:
        return tuple(order.tolist())
    kernels.local_search(D, order, *config.move_flags, LS_REL_EPS)
    return tuple(order.tolist())


def mean_edge_cost(D: np.ndarray) -> float:
    n = D.shape[0]
    if n < 2:
        return 0.0
    return float(D[~np.eye(n, dtype=bool)].mean())


def anneal(D, start, config: SolverConfig, rng, deadline, guide=None):
    """Metropolis search from ``start``; returns (best order, stats).

    Uniforms are drawn from ``rng`` in fixed blocks, so the trajectory depends
    only on the seed unless the deadline cuts it short. ``guide`` is an
    optional callable ``(cur, fstate) -> None`` run every
    ``config.guidance_interval`` moves; it may overwrite the current route.
    """
    n = D.shape[0]
    cur = as_order(start).copy()
    best = cur.copy()
    stats = {"moves": 0, "stopped": "cold"}
    t0 = config.initial_temperature_factor * mean_edge_cost(D)
    if n < 3 or not t0 > 0:
        return best, stats
    t_final = t0 * config.final_temperature_factor
    mpt = config.moves_per_temperature or 50 * n
    use2, use1, use_or2 = config.move_flags
    c = kernels.route_cost(D, cur)
    fstate = np.array([c, c, t0])
    istate = np.zeros(1, dtype=np.int64)
    buf = np.empty_like(cur)
    guide_every = max(1, math.ceil(config.guidance_interval / CHUNK_MOVES))
    chunk = 0
    block = None
    while fstate[2] > t_final:
        if time.perf_counter() >= deadline:
            stats["stopped"] = "time"
            break
        k = chunk % CHUNKS_PER_DRAW
        if k == 0:
            block = rng.random((CHUNKS_PER_DRAW * CHUNK_MOVES, 4))
            # re-anchor the incrementally tracked costs
            fstate[0] = kernels.route_cost(D, cur)
            fstate[1] = kernels.route_cost(D, best)
        rnd = block[k * CHUNK_MOVES:(k + 1) * CHUNK_MOVES]
        kernels.anneal_chunk(D, cur, best, fstate, istate, rnd, use2, use1, use_or2, mpt, config.cooling_rate, buf)
        chunk += 1
        if guide is not None and chunk % guide_every == 0:
            guide(cur, best, fstate)
    stats["moves"] = chunk * CHUNK_MOVES
    stats["final_temperature"] = float(fstate[2])
    return best, stats


def simulated_annealing(instance: Instance, config: SolverConfig | None = None, initial=None) -> SolveResult:
    """Anneal from nearest neighbour (node 0) or ``initial``; returns the best route seen."""
    config = config or SolverConfig()
    t0 = time.perf_counter()
    D = cost_matrix(instance)
    start = as_order(initial if initial is not None else nearest_neighbor(instance, 0))
    best, stats = anneal(D, start, config, make_rng(config.seed), t0 + config.time_limit)
    route = canonical(best.tolist())
    return SolveResult(route, evaluate_route(instance, route), "simulated_annealing", config.seed,
                       time.perf_counter() - t0, False, None, stats)


def nearest_neighbor_solver(instance: Instance, config: SolverConfig | None = None, initial=None) -> SolveResult:
    config = config or SolverConfig()
    t0 = time.perf_counter()
    route = canonical(nearest_neighbor(instance, 0))
    return SolveResult(route, evaluate_route(instance, route), "nearest_neighbor", config.seed,
                       time.perf_counter() - t0)


def local_search_solver(instance: Instance, config: SolverConfig | None = None, initial=None) -> SolveResult:
    config = config or SolverConfig()
    t0 = time.perf_counter()
    start = initial if initial is not None else nearest_neighbor(instance, 0)
    route = canonical(local_search(instance, start, config))
    return SolveResult(route, evaluate_route(instance, route), "local_search", config.seed,
                       time.perf_counter() - t0)
