"""Benchmark harness: repeated seeded runs, approximation ratio, Table-style summaries."""
from __future__ import annotations

import csv
import hashlib
import io
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .core import ExpandedRoute, Instance, metric_completion
from .errors import BaselineUnavailable, BaselineWorse
from .ingest.instance_io import read_instance
from .solvers import EXACT_SOLVERS, SolverConfig, solve

log = logging.getLogger(__name__)

DEFAULT_RUNS = 15
AR_REL_TOL = 1e-9
CSV_COLUMNS = ("instance", "nodes", "edges", "solver", "run", "seed", "cost", "runtime_seconds", "ar")


def compute_ar(obtained_cost: float, baseline_cost: float) -> float:
    """Approximation ratio ``baseline / obtained`` (1.0 is optimal, lower is worse).

    Raises :class:`BaselineWorse` when the baseline is beaten by more than the
    1e-9 relative tolerance, since the baseline is meant to be the best known.
    """
    if obtained_cost == baseline_cost:
        return 1.0
    if not (obtained_cost > 0 and baseline_cost > 0):
        raise ValueError("approximation ratio needs positive costs")
    if baseline_cost > obtained_cost * (1.0 + AR_REL_TOL):
        raise BaselineWorse(f"baseline cost {baseline_cost!r} exceeds obtained cost {obtained_cost!r}")
    return min(1.0, baseline_cost / obtained_cost)


@dataclass
class BenchPlan:
    """Instances x solvers x runs.

    ``instances`` holds :class:`Instance` objects or paths to instance
    documents. ``baseline`` names the solver whose best cost per instance
    defines AR; if it is not among ``solvers`` the instance's stored
    ``metadata["best_known_cost"]`` is used, or the named exact solver is run
    once outside the records. ``clock`` times each solver call.
    """

    instances: list
    solvers: list
    runs_per_pair: int = DEFAULT_RUNS
    baseline: str | None = "held_karp"
    master_seed: int = 0
    clock: Callable[[], float] = field(default=time.perf_counter, repr=False)

    def __post_init__(self):
        if self.runs_per_pair < 1:
            raise ValueError("runs_per_pair must be at least 1")
        self.solvers = [(sid, cfg or SolverConfig()) for sid, cfg in self.solvers]
        ids = [sid for sid, _ in self.solvers]
        if len(set(ids)) != len(ids):
            raise ValueError("solver ids in a plan must be unique")


@dataclass(frozen=True)
class BenchRecord:
    instance: str
    nodes: int
    edges: int
    solver: str
    run: int
    seed: int
    cost: float
    runtime_seconds: float
    ar: float


@dataclass(frozen=True)
class SolverSummary:
    runs: int
    mean_ar: float
    mean_rt: float
    best_ar: float
    mean_cost: float
    cost_std: float


@dataclass(frozen=True)
class SummaryRow:
    instance: str
    nodes: int
    edges: int
    solvers: dict


def run_seed(master_seed: int, instance: str, solver: str, run: int) -> int:
    """Seed for one cell; a pure function of its four keys."""
    digest = hashlib.blake2b(f"{instance}\x00{solver}".encode(), digest_size=8).digest()
    key = int.from_bytes(digest, "little")
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(key, int(run)))
    return int(ss.generate_state(1, np.uint64)[0])


def _load(src) -> Instance:
    if isinstance(src, Instance):
        return src
    return read_instance(Path(src).read_bytes())


def _baseline_cost(plan, inst, completed, costs_by_solver):
    if plan.baseline in costs_by_solver:
        known = [min(costs_by_solver[plan.baseline])]
        if "best_known_cost" in inst.metadata:
            known.append(float(inst.metadata["best_known_cost"]))
        return min(known)
    if "best_known_cost" in inst.metadata:
        return float(inst.metadata["best_known_cost"])
    if plan.baseline in EXACT_SOLVERS:
        cfg = SolverConfig(seed=run_seed(plan.master_seed, inst.name, plan.baseline, 0), time_limit=3600.0)
        try:
            res = solve(completed, plan.baseline, cfg)
        except Exception as e:  # size limits and the like
            raise BaselineUnavailable(inst.name) from e
        if res.optimal:
            return res.cost
    raise BaselineUnavailable(inst.name)


def run_benchmark(plan: BenchPlan) -> list[BenchRecord]:
    """Run every (instance, solver, run) cell; records come back in canonical order.

    Order is instance name, then solver declaration order, then run index.
    Solver timing covers the solve call only; metric completion is logged
    separately.
    """
    records = []
    clock = plan.clock
    for src in plan.instances:
        inst = _load(src)
        t = time.perf_counter()
        completed, _ = metric_completion(inst)
        log.info("%s: metric completion %.3fs", inst.name, time.perf_counter() - t)
        cells = []
        costs_by_solver: dict[str, list[float]] = {}
        for sid, cfg in plan.solvers:
            for r in range(plan.runs_per_pair):
                seed = run_seed(plan.master_seed, inst.name, sid, r)
                start = clock()
                res = solve(completed, sid, cfg.with_seed(seed))
                rt = clock() - start
                cells.append((sid, r, seed, res.cost, max(0.0, rt)))
                costs_by_solver.setdefault(sid, []).append(res.cost)
        base = _baseline_cost(plan, inst, completed, costs_by_solver)
        for sid, r, seed, cost, rt in cells:
            try:
                ar = compute_ar(cost, base)
            except BaselineWorse as e:
                raise BaselineWorse(f"{inst.name}/{sid} run {r}: {e}") from None
            records.append(BenchRecord(inst.name, inst.n, inst.edge_count, sid, r, seed, cost, rt, ar))
    order = {sid: k for k, (sid, _) in enumerate(plan.solvers)}
    records.sort(key=lambda rec: (rec.instance, order[rec.solver], rec.run))
    return records


def summarize(records: Sequence[BenchRecord]) -> list[SummaryRow]:
    """One row per instance (sorted by name); per solver mean AR / rt, best AR, cost spread."""
    groups: dict[str, dict[str, list[BenchRecord]]] = {}
    sizes = {}
    for rec in records:
        groups.setdefault(rec.instance, {}).setdefault(rec.solver, []).append(rec)
        sizes[rec.instance] = (rec.nodes, rec.edges)
    rows = []
    for name in sorted(groups):
        per = {}
        for sid, recs in groups[name].items():
            k = len(recs)
            costs = [r.cost for r in recs]
            mean_cost = math.fsum(costs) / k
            per[sid] = SolverSummary(
                runs=k,
                mean_ar=math.fsum(r.ar for r in recs) / k,
                mean_rt=math.fsum(r.runtime_seconds for r in recs) / k,
                best_ar=max(r.ar for r in recs),
                mean_cost=mean_cost,
                cost_std=math.sqrt(math.fsum((c - mean_cost) ** 2 for c in costs) / k),
            )
        rows.append(SummaryRow(name, sizes[name][0], sizes[name][1], per))
    return rows


def format_rt(seconds: float) -> str:
    """Runtime for display; thousands of seconds get a K suffix."""
    if seconds >= 1000:
        return f"{seconds / 1000:.1f}K"
    if seconds >= 1:
        return f"{seconds:.1f}"
    return f"{seconds:.3f}"


def _csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        # str(float) is the shortest round-trip repr
        w.writerow([r.instance, r.nodes, r.edges, r.solver, r.run, r.seed,
                    repr(float(r.cost)), repr(float(r.runtime_seconds)), repr(float(r.ar))])
    return buf.getvalue()


def _markdown(summary) -> str:
    solvers = []
    for row in summary:
        for sid in row.solvers:
            if sid not in solvers:
                solvers.append(sid)
    head = ["Instance (nodes, edges)"]
    for sid in solvers:
        head += [f"{sid} AR", f"{sid} rt"]
    lines = ["| " + " | ".join(head) + " |", "|" + "|".join(["---"] * len(head)) + "|"]
    for row in summary:
        cells = [f"**{row.instance}** ({row.nodes}, {row.edges})"]
        for sid in solvers:
            s = row.solvers.get(sid)
            cells += ["-", "-"] if s is None else [f"{s.mean_ar:.3f}", format_rt(s.mean_rt)]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def export_results(records, summary=None, format: str = "csv") -> bytes:
    """CSV of the raw records, or a Markdown table shaped like a results table."""
    fmt = format.lower()
    if fmt == "csv":
        return _csv(records).encode()
    if fmt in ("markdown", "md"):
        if summary is None:
            summary = summarize(records)
        return _markdown(summary).encode()
    raise ValueError(f"unknown export format {format!r}")


def export_route_geometry(instance: Instance, expanded: ExpandedRoute) -> bytes:
    """Plain-text nodes / edges / waypoint polyline for external plotting.

    Each section starts with a count line (``nodes N``, ``edges M``,
    ``route K COST``) followed by one whitespace-separated record per line.
    """
    P = instance.points.tolist()
    out = ["# inspectroute route geometry v1", f"name {instance.name}", f"nodes {instance.n}"]
    out += [f"{i} {x!r} {y!r} {z!r}" for i, (x, y, z) in enumerate(P)]
    edges = instance.edges()
    out.append(f"edges {len(edges)}")
    out += [f"{i} {j} {c!r}" for i, j, c in edges]
    out.append(f"route {len(expanded.waypoints)} {float(expanded.cost)!r}")
    out += ["{} {!r} {!r} {!r}".format(v, *P[v]) for v in expanded.waypoints]
    return ("\n".join(out) + "\n").encode()
