"""Problem model: instances, open routes, costs and graph transforms.

An :class:`Instance` stores its cost matrix densely with ``inf`` marking an
absent edge. Routes are plain sequences of node indices; solvers hand them
back as tuples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import (
    Disconnected,
    DummyMissing,
    DuplicateNode,
    IndexOutOfRange,
    InconsistentVia,
    InvalidRoute,
    MissingEdge,
    NotComplete,
    WrongLength,
)

Route = tuple  # tuple[int, ...]

REL_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Instance:
    """Named set of 3D inspection points with a symmetric, possibly incomplete cost matrix."""

    name: str
    points: np.ndarray
    costs: np.ndarray
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        pts = _frozen(self.points).reshape(-1, 3)
        C = _frozen(self.costs)
        n = pts.shape[0]
        if n < 1:
            raise ValueError("instance needs at least one node")
        if C.shape != (n, n):
            raise ValueError(f"cost matrix shape {C.shape} does not match {n} points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point coordinates must be finite")
        if np.any(np.isnan(C)) or np.any(C < 0):
            raise ValueError("costs must be non-negative (inf marks an absent edge)")
        if np.any(np.diagonal(C) != 0):
            raise ValueError("diagonal costs must be zero")
        if not np.array_equal(C, C.T):
            raise ValueError("cost matrix must be symmetric")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "costs", C)
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def edge_count(self) -> int:
        iu = np.triu_indices(self.n, 1)
        return int(np.count_nonzero(np.isfinite(self.costs[iu])))

    @property
    def is_complete(self) -> bool:
        return bool(np.all(np.isfinite(self.costs)))

    def has_edge(self, i: int, j: int) -> bool:
        return i != j and bool(np.isfinite(self.costs[i, j]))

    def edges(self) -> list[tuple[int, int, float]]:
        """Present edges as ``(i, j, cost)`` with ``i < j``, row-major."""
        I, J = np.triu_indices(self.n, 1)
        c = self.costs[I, J]
        keep = np.isfinite(c)
        return [(int(i), int(j), float(v)) for i, j, v in zip(I[keep], J[keep], c[keep])]

    def components(self) -> list[list[int]]:
        adj = np.isfinite(self.costs)
        seen = np.zeros(self.n, dtype=bool)
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                u = stack.pop()
                comp.append(u)
                for v in np.flatnonzero(adj[u] & ~seen):
                    seen[v] = True
                    stack.append(int(v))
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.name == other.name
            and self.points.tobytes() == other.points.tobytes()
            and self.costs.tobytes() == other.costs.tobytes()
            and self.metadata == other.metadata
        )

    __hash__ = None

    def __repr__(self):
        return f"Instance(name={self.name!r}, n={self.n}, edges={self.edge_count})"


@dataclass(frozen=True)
class ExpandedRoute:
    """Physical waypoint sequence over the original graph; nodes may repeat."""

    waypoints: tuple
    cost: float


@dataclass(frozen=True)
class SolveResult:
    route: Route
    cost: float
    solver_id: str
    seed: int
    runtime_seconds: float
    optimal: bool = False
    lower_bound: float | None = None
    stats: Mapping[str, Any] = field(default_factory=dict, compare=False)


def as_order(route: Sequence[int]) -> np.ndarray:
    return np.asarray(route, dtype=np.int64).reshape(-1)


def validate_route(instance: Instance, route: Sequence[int], require_edges: bool = True) -> InvalidRoute | None:
    """Return the first violation found, or ``None`` for a valid full route.

    Checked in order: length, index range, duplicates, then (optionally)
    edge presence between consecutive nodes.
    """
    order = [int(v) for v in route]
    n = instance.n
    if len(order) != n:
        return WrongLength(n, len(order))
    for v in order:
        if not 0 <= v < n:
            return IndexOutOfRange(v, n)
    seen = set()
    for v in order:
        if v in seen:
            return DuplicateNode(v)
        seen.add(v)
    if require_edges:
        C = instance.costs
        for a, b in zip(order, order[1:]):
            if not np.isfinite(C[a, b]):
                return MissingEdge(a, b)
    return None


def evaluate_route(instance: Instance, route: Sequence[int]) -> float:
    """Open-path cost: sum of the n-1 consecutive edge costs, no closing edge."""
    problem = validate_route(instance, route, require_edges=True)
    if problem is not None:
        raise problem
    order = as_order(route)
    # fsum is exactly rounded, so a route and its reverse cost the same
    return math.fsum(instance.costs[order[:-1], order[1:]].tolist())


def metric_completion(instance: Instance) -> tuple[Instance, np.ndarray]:
    """All-pairs shortest paths over present edges.

    Returns the completed instance and the predecessor table ``via``, where
    ``via[i, j]`` is the node preceding ``j`` on the chosen path from ``i``.
    A direct edge is replaced only when a detour is shorter by more than a
    1e-12 relative margin.
    """
    comps = instance.components()
    if len(comps) > 1:
        raise Disconnected(comps)
    # the relaxation keeps a symmetric matrix exactly symmetric
    dist, pred = kernels.floyd_warshall(np.ascontiguousarray(instance.costs))
    pred.setflags(write=False)
    completed = Instance(instance.name, instance.points, dist, instance.metadata)
    return completed, pred


def _leg(via: np.ndarray, i: int, j: int) -> list[int]:
    n = via.shape[0]
    nodes = [j]
    cur = j
    steps = 0
    while cur != i:
        cur = int(via[i, cur])
        steps += 1
        if cur < 0 or steps >= n:
            raise InconsistentVia(f"predecessor table does not lead from {j} back to {i}")
        nodes.append(cur)
    nodes.reverse()
    return nodes


def expand_route(route: Sequence[int], via: np.ndarray, original: Instance) -> ExpandedRoute:
    """Insert the intermediate waypoints of every shortest-path leg."""
    order = [int(v) for v in route]
    if not order:
        return ExpandedRoute((), 0.0)
    waypoints = [order[0]]
    for a, b in zip(order, order[1:]):
        waypoints.extend(_leg(via, a, b)[1:])
    C = original.costs
    legs = []
    for a, b in zip(waypoints, waypoints[1:]):
        c = C[a, b]
        if not np.isfinite(c) or a == b:
            raise InconsistentVia(f"expanded leg {a}-{b} is not an edge of the original graph")
        legs.append(float(c))
    return ExpandedRoute(tuple(waypoints), math.fsum(legs))


def close_with_dummy(instance: Instance, endpoints: Sequence[int] | None = None) -> Instance:
    """Add node ``n`` joined to every node at zero cost.

    A closed tour on the result, cut at the dummy, is an open path on the
    input with the same cost. ``endpoints`` restricts which nodes may start or
    end the path (the dummy edge to every other node is left absent).
    """
    if not instance.is_complete:
        raise NotComplete("close_with_dummy needs a metric-completed instance")
    n = instance.n
    C = np.zeros((n + 1, n + 1))
    C[:n, :n] = instance.costs
    if endpoints is not None:
        allowed = np.zeros(n, dtype=bool)
        allowed[list(endpoints)] = True
        C[n, :n] = np.where(allowed, 0.0, np.inf)
        C[:n, n] = C[n, :n]
    pts = np.vstack([instance.points, instance.points.mean(axis=0)])
    meta = dict(instance.metadata)
    meta["dummy_node"] = n
    return Instance(f"{instance.name}+dummy", pts, C, meta)


def strip_dummy(tour: Sequence[int], dummy: int | None = None) -> Route:
    """Rotate a closed tour so the dummy leads, then drop it."""
    tour = [int(v) for v in tour]
    if dummy is None:
        dummy = len(tour) - 1
    if dummy not in tour:
        raise DummyMissing(f"dummy node {dummy} not in tour")
    k = tour.index(dummy)
    rotated = tour[k:] + tour[:k]
    return tuple(rotated[1:])


def closed_tour_cost(instance: Instance, tour: Sequence[int]) -> float:
    order = [int(v) for v in tour]
    C = instance.costs
    return math.fsum(float(C[a, b]) for a, b in zip(order, order[1:] + order[:1])) if len(order) > 1 else 0.0


def canonical(route: Sequence[int]) -> Route:
    """Orientation with the smaller endpoint first."""
    r = tuple(int(v) for v in route)
    if len(r) > 1 and r[0] > r[-1]:
        r = r[::-1]
    return r
