"""Hot numeric kernels behind a single dispatch point.

``loops`` holds the numba-jitted versions and ``vectorized`` the pure numpy
ones; which set is bound here is decided once, at import, by
``INSPECTROUTE_DISABLE_NUMBA``. Both modules stay importable so tests and the
benchmark can compare them directly.
"""
from .._accel import USE_NUMBA
from . import loops, vectorized

_impl = loops if USE_NUMBA else vectorized

route_cost = _impl.route_cost
floyd_warshall = _impl.floyd_warshall
held_karp_table = _impl.held_karp_table
held_karp_route = _impl.held_karp_route
nearest_neighbor = _impl.nearest_neighbor
brute_force = _impl.brute_force
local_search = _impl.local_search
two_opt_delta = _impl.two_opt_delta
or_opt_delta = _impl.or_opt_delta
anneal_chunk = _impl.anneal_chunk
completion_bound = _impl.completion_bound
bnb_fill_candidates = _impl.bnb_fill_candidates
bnb_search = _impl.bnb_search

BACKEND = "numba" if USE_NUMBA else "numpy"

__all__ = [
    "BACKEND", "USE_NUMBA", "loops", "vectorized",
    "route_cost", "floyd_warshall", "held_karp_table", "held_karp_route",
    "nearest_neighbor", "brute_force", "local_search", "two_opt_delta",
    "or_opt_delta", "anneal_chunk", "completion_bound", "bnb_fill_candidates",
    "bnb_search",
]
