"""Open-path TSP solvers on metric-completed instances."""
from __future__ import annotations


from ..core import Instance, SolveResult
from .config import (
    MOVES,
    GuidanceOracle,
    NullOracle,
    RuinRecreateOracle,
    SolverConfig,
    derive_seed,
)
from .exact import (
    BRUTE_FORCE_MAX_N,
    HELD_KARP_MAX_N,
    branch_and_bound,
    brute_force,
    brute_force_tour,
    held_karp,
)
from .heuristics import (
    local_search,
    local_search_solver,
    nearest_neighbor,
    nearest_neighbor_solver,
    simulated_annealing,
)
from .portfolio import BestRegister, portfolio_solve, worker_seed

SOLVERS = {
    "brute_force": brute_force,
    "held_karp": held_karp,
    "branch_and_bound": branch_and_bound,
    "nearest_neighbor": nearest_neighbor_solver,
    "local_search": local_search_solver,
    "simulated_annealing": simulated_annealing,
    "portfolio": portfolio_solve,
}
EXACT_SOLVERS = ("brute_force", "held_karp", "branch_and_bound")


def solve(instance: Instance, solver_id: str, config: SolverConfig | None = None, initial=None) -> SolveResult:
    """Dispatch by solver id; ``initial`` is a warm start where the solver takes one."""
    try:
        fn = SOLVERS[solver_id]
    except KeyError:
        raise ValueError(f"unknown solver {solver_id!r}; choose from {', '.join(SOLVERS)}") from None
    config = config or SolverConfig()
    if solver_id in ("brute_force", "held_karp"):
        return fn(instance, config)
    return fn(instance, config, initial=initial)


__all__ = [
    "BRUTE_FORCE_MAX_N", "BestRegister", "EXACT_SOLVERS", "GuidanceOracle", "HELD_KARP_MAX_N",
    "MOVES", "NullOracle", "RuinRecreateOracle", "SOLVERS", "SolverConfig", "branch_and_bound",
    "brute_force", "brute_force_tour", "derive_seed", "held_karp", "local_search", "local_search_solver",
    "nearest_neighbor", "nearest_neighbor_solver", "portfolio_solve", "simulated_annealing",
    "solve", "worker_seed",
]
