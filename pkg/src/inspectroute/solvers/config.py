from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Protocol, Sequence

import numpy as np

from ..core import Instance

MOVES = ("two-opt", "or-opt-1", "or-opt-2")


@dataclass(frozen=True)
class SolverConfig:
    """Knobs shared by the heuristic and exact solvers.

    ``moves_per_temperature=None`` means 50 moves per node. Annealing stops
    when the temperature falls below ``final_temperature_factor`` times its
    start value or the time limit expires, whichever is first.
    ``guidance_interval`` counts annealing moves between two oracle queries
    in the portfolio solver.
    """

    time_limit: float = 5.0
    seed: int = 0
    threads: int = 4
    initial_temperature_factor: float = 1.0
    cooling_rate: float = 0.995
    moves_per_temperature: int | None = None
    final_temperature_factor: float = 1e-4
    moves: tuple = MOVES
    guidance_interval: int = 20_000

    def __post_init__(self):
        if not self.time_limit > 0:
            raise ValueError("time_limit must be positive")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.threads < 1:
            raise ValueError("threads must be positive")
        if not 0 < self.cooling_rate < 1:
            raise ValueError("cooling_rate must lie in (0, 1)")
        if not self.initial_temperature_factor > 0 or not 0 < self.final_temperature_factor < 1:
            raise ValueError("temperature factors must be positive (final factor below 1)")
        if self.moves_per_temperature is not None and self.moves_per_temperature < 1:
            raise ValueError("moves_per_temperature must be positive")
        if self.guidance_interval < 1:
            raise ValueError("guidance_interval must be positive")
        moves = tuple(self.moves)
        if not moves or any(m not in MOVES for m in moves):
            raise ValueError(f"moves must be a non-empty subset of {MOVES}")
        object.__setattr__(self, "moves", moves)

    def with_seed(self, seed: int) -> "SolverConfig":
        return replace(self, seed=int(seed))

    @property
    def move_flags(self) -> tuple[bool, bool, bool]:
        return tuple(m in self.moves for m in MOVES)


def derive_seed(seed: int, *keys: int) -> int:
    """Independent 64-bit child seed for ``(seed, *keys)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


class GuidanceOracle(Protocol):
    """Source of non-local candidate routes for the portfolio workers.

    ``propose`` must be deterministic given ``rng`` and return either a full
    permutation of the instance's nodes or ``None``.
    """

    def propose(self, instance: Instance, incumbent: Sequence[int], rng: np.random.Generator) -> Sequence[int] | None:
        ...


class NullOracle:
    def propose(self, instance, incumbent, rng):
        return None


class RuinRecreateOracle:
    """Cut a random contiguous stretch of ``ceil(fraction * n)`` nodes and reinsert greedily.

    Removed nodes go back one at a time, in their old order, each at the
    cheapest gap of the current partial path (path ends included, ties to the
    earliest gap).
    """

    def __init__(self, fraction: float = 0.2):
        self.fraction = fraction

    def propose(self, instance, incumbent, rng):
        order = [int(v) for v in incumbent]
        n = len(order)
        if n < 3:
            return None
        D = instance.costs
        L = min(n - 1, max(1, math.ceil(self.fraction * n)))
        s = int(rng.integers(0, n - L + 1))
        removed = order[s:s + L]
        path = order[:s] + order[s + L:]
        for v in removed:
            p = np.array(path)
            inner = D[p[:-1], v] + D[v, p[1:]] - D[p[:-1], p[1:]]
            gains = np.concatenate([[D[v, p[0]]], inner, [D[p[-1], v]]])
            g = int(np.argmin(gains))
            path.insert(g, v)
        return tuple(path)
