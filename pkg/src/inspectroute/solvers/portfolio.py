"""Parallel annealing workers guided by a pluggable proposal oracle."""
from __future__ import annotations

import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .. import kernels
from ..core import Instance, SolveResult, as_order, canonical, evaluate_route
from ..ingest.generate import make_rng
from .config import GuidanceOracle, RuinRecreateOracle, SolverConfig, derive_seed
from .exact import cost_matrix
from .heuristics import anneal, local_search, nearest_neighbor


class BestRegister:
    """Lock-protected best-so-far (cost, worker, route); equal costs go to the lower worker."""

    def __init__(self):
        self._lock = threading.Lock()
        self.cost = math.inf
        self.worker = -1
        self.route = None

    def offer(self, cost, worker, route):
        with self._lock:
            if cost < self.cost or (cost == self.cost and worker < self.worker):
                self.cost, self.worker, self.route = cost, worker, tuple(route)
                return True
            return False


def worker_seed(seed: int, worker: int) -> int:
    return derive_seed(seed, worker)


def _is_permutation(p, n):
    return p.shape[0] == n and np.array_equal(np.sort(p), np.arange(n))


def _run_worker(instance, D, start, config, oracle, worker, deadline, register):
    seed = worker_seed(config.seed, worker)
    rng = make_rng(seed)
    orng = make_rng(derive_seed(seed, 1))
    n = D.shape[0]
    tally = {"proposals": 0, "accepted": 0}

    def guide(cur, best, fstate):
        proposal = oracle.propose(instance, tuple(cur.tolist()), orng)
        if proposal is None:
            return
        p = as_order(proposal)
        if not _is_permutation(p, n):
            raise ValueError(f"oracle proposed an invalid route: {proposal!r}")
        tally["proposals"] += 1
        pc = kernels.route_cost(D, p)
        delta = pc - fstate[0]
        if delta <= 0 or orng.random() < math.exp(-delta / fstate[2]):
            cur[:] = p
            fstate[0] = pc
            tally["accepted"] += 1
            if pc < fstate[1]:
                best[:] = p
                fstate[1] = pc

    best, stats = anneal(D, start, config, rng, deadline, guide)
    route = canonical(local_search(instance, best.tolist(), config))
    cost = evaluate_route(instance, route)
    register.offer(cost, worker, route)
    return {"worker": worker, "seed": seed, "cost": cost, "route": route, **stats, **tally}


def portfolio_solve(
    instance: Instance,
    config: SolverConfig | None = None,
    oracle: GuidanceOracle | None = None,
    initial=None,
) -> SolveResult:
    """Run ``config.threads`` annealing + local-search workers and keep the best.

    Worker ``w`` anneals with its own stream seeded by
    ``worker_seed(config.seed, w)`` and a second stream for the oracle, so
    the outcome does not depend on thread scheduling. Every
    ``config.guidance_interval`` moves a worker hands its current route to
    ``oracle`` and adopts the proposal under the Metropolis rule at the
    current temperature. Workers only write to the shared register.
    """
    config = config or SolverConfig()
    oracle = oracle if oracle is not None else RuinRecreateOracle()
    t0 = time.perf_counter()
    deadline = t0 + config.time_limit
    D = cost_matrix(instance)
    start = as_order(initial if initial is not None else nearest_neighbor(instance, 0))
    register = BestRegister()
    if config.threads == 1:
        reports = [_run_worker(instance, D, start, config, oracle, 0, deadline, register)]
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            futures = [
                pool.submit(_run_worker, instance, D, start, config, oracle, w, deadline, register)
                for w in range(config.threads)
            ]
            reports = [f.result() for f in futures]
    stats = {
        "worker_costs": [r["cost"] for r in reports],
        "worker_seeds": [r["seed"] for r in reports],
        "oracle_accepted": [r["accepted"] for r in reports],
        "best_worker": register.worker,
        "stopped": [r["stopped"] for r in reports],
    }
    return SolveResult(register.route, register.cost, "portfolio", config.seed,
                       time.perf_counter() - t0, False, None, stats)
