import csv
import io
import math
from pathlib import Path

import numpy as np
import pytest

from benchplans import golden_plan, step_clock
from inspectroute import expand_route, metric_completion
from inspectroute.bench import (
    CSV_COLUMNS,
    DEFAULT_RUNS,
    BenchPlan,
    BenchRecord,
    compute_ar,
    export_results,
    export_route_geometry,
    format_rt,
    run_benchmark,
    run_seed,
    summarize,
)
from inspectroute.errors import BaselineUnavailable, BaselineWorse
from inspectroute.ingest import generate_instance, write_instance
from inspectroute.solvers import SolverConfig, held_karp

GOLDEN = Path(__file__).parent / "golden"


def test_ar_identity():
    assert compute_ar(7.5, 7.5) == 1.0


def test_ar_arithmetic():
    assert compute_ar(100.0, 93.0) == 0.93


def test_ar_clamped_within_tolerance():
    assert compute_ar(1.0, 1.0 + 1e-12) == 1.0


def test_ar_rejects_better_than_baseline():
    with pytest.raises(BaselineWorse):
        compute_ar(90.0, 93.0)


def test_ar_rejects_nonpositive():
    with pytest.raises(ValueError):
        compute_ar(0.0, 1.0)


def test_default_runs_is_fifteen():
    assert DEFAULT_RUNS == 15
    assert BenchPlan([], []).runs_per_pair == 15


def test_single_cell():
    inst = generate_instance("sphere", 6, seed=1)
    recs = run_benchmark(BenchPlan([inst], [("held_karp", None)], runs_per_pair=1))
    assert len(recs) == 1 and recs[0].ar == 1.0 and recs[0].runtime_seconds >= 0


def test_cardinality_and_order():
    insts = [generate_instance("torus", 8, seed=2, name="b"), generate_instance("sphere", 7, seed=3, name="a")]
    plan = BenchPlan(insts, [("nearest_neighbor", None), ("held_karp", None)], runs_per_pair=4)
    recs = run_benchmark(plan)
    assert len(recs) == 2 * 2 * 4
    assert [r.instance for r in recs[:8]] == ["a"] * 8
    assert [r.solver for r in recs[:8]] == ["nearest_neighbor"] * 4 + ["held_karp"] * 4
    assert all(0 < r.ar <= 1 for r in recs)
    assert all(r.ar == 1.0 for r in recs if r.solver == "held_karp")


def test_run_seed_is_pure():
    assert run_seed(1, "x", "portfolio", 3) == run_seed(1, "x", "portfolio", 3)
    seeds = {run_seed(1, "x", "portfolio", r) for r in range(15)}
    assert len(seeds) == 15
    assert run_seed(2, "x", "portfolio", 0) != run_seed(1, "x", "portfolio", 0)


def test_instances_from_paths(tmp_path):
    inst = generate_instance("box-panel", 7, seed=5)
    p = tmp_path / "a.instance"
    p.write_bytes(write_instance(inst))
    recs = run_benchmark(BenchPlan([str(p)], [("held_karp", None)], runs_per_pair=2))
    assert recs[0].instance == inst.name


def test_baseline_from_stored_cost():
    inst = generate_instance("sphere", 30, knn=4, seed=4)
    best = 1e-3
    tagged = type(inst)(inst.name, inst.points, inst.costs, {**inst.metadata, "best_known_cost": best})
    recs = run_benchmark(BenchPlan([tagged], [("nearest_neighbor", None)], runs_per_pair=1, baseline="held_karp"))
    assert math.isclose(recs[0].ar, best / recs[0].cost)


def test_baseline_unavailable():
    inst = generate_instance("sphere", 30, knn=4, seed=4)
    with pytest.raises(BaselineUnavailable):
        run_benchmark(BenchPlan([inst], [("nearest_neighbor", None)], runs_per_pair=1, baseline="held_karp"))


def test_baseline_run_outside_records():
    inst = generate_instance("torus", 9, knn=3, seed=6)
    recs = run_benchmark(BenchPlan([inst], [("nearest_neighbor", None)], runs_per_pair=2, baseline="held_karp"))
    opt = held_karp(metric_completion(inst)[0]).cost
    assert recs[0].ar == compute_ar(recs[0].cost, opt)


def test_plan_rejects_duplicate_solvers():
    with pytest.raises(ValueError):
        BenchPlan([], [("held_karp", None), ("held_karp", None)])


def test_plan_rejects_zero_runs():
    with pytest.raises(ValueError):
        BenchPlan([], [], runs_per_pair=0)


def _rec(cost, ar, rt=1.0, solver="s", run=0, inst="i"):
    return BenchRecord(inst, 5, 6, solver, run, 0, cost, rt, ar)


def test_summary_single_record():
    [row] = summarize([_rec(2.0, 0.8, rt=3.5)])
    s = row.solvers["s"]
    assert (s.mean_ar, s.mean_rt, s.best_ar, s.cost_std, s.runs) == (0.8, 3.5, 0.8, 0.0, 1)


def test_summary_identical_runs():
    recs = [_rec(2.0, 0.9123456789, run=r) for r in range(15)]
    assert summarize(recs)[0].solvers["s"].mean_ar == 0.9123456789


def test_summary_matches_csv_recomputation():
    rng = np.random.default_rng(0)
    recs = [_rec(float(c), float(a), float(t), solver=s, run=r, inst=i)
            for i in ("x", "y") for s in ("p", "q") for r, (c, a, t) in
            enumerate(zip(rng.random(15) + 1, rng.random(15) * 0.5 + 0.5, rng.random(15) * 3))]
    rows = list(csv.DictReader(io.StringIO(export_results(recs).decode())))
    summary = summarize(recs)
    for row in summary:
        for sid, s in row.solvers.items():
            mine = [r for r in rows if r["instance"] == row.instance and r["solver"] == sid]
            ars = [float(r["ar"]) for r in mine]
            rts = [float(r["runtime_seconds"]) for r in mine]
            costs = [float(r["cost"]) for r in mine]
            assert math.isclose(s.mean_ar, sum(ars) / len(ars), rel_tol=1e-12)
            assert math.isclose(s.mean_rt, sum(rts) / len(rts), rel_tol=1e-12)
            assert s.best_ar == max(ars)
            assert math.isclose(s.cost_std, float(np.std(costs)), rel_tol=1e-9)
    assert [r.instance for r in summary] == ["x", "y"]


def test_empty_csv_is_header_only():
    assert export_results([]) == (",".join(CSV_COLUMNS) + "\n").encode()


def test_csv_floats_round_trip():
    r = _rec(0.1 + 0.2, 1 / 3)
    row = next(csv.DictReader(io.StringIO(export_results([r]).decode())))
    assert float(row["cost"]) == 0.1 + 0.2 and float(row["ar"]) == 1 / 3


def test_golden_csv_and_markdown():
    recs = run_benchmark(golden_plan(step_clock()))
    assert export_results(recs) == (GOLDEN / "bench-2x2.csv").read_bytes()
    assert export_results(recs, format="markdown") == (GOLDEN / "bench-2x2.md").read_bytes()


def test_wall_clock_only_changes_runtime_column():
    a = run_benchmark(golden_plan())
    b = run_benchmark(golden_plan())
    strip = [(r.instance, r.solver, r.run, r.seed, r.cost, r.ar) for r in a]
    assert strip == [(r.instance, r.solver, r.run, r.seed, r.cost, r.ar) for r in b]


def test_export_unknown_format():
    with pytest.raises(ValueError):
        export_results([], format="xlsx")


def test_format_rt():
    assert format_rt(1200.0) == "1.2K"
    assert format_rt(4.9) == "4.9"
    assert format_rt(0.0123) == "0.012"


def _parse_geometry(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    sections = {}
    k = 0
    while k < len(lines):
        head = lines[k].split()
        if head[0] in ("nodes", "edges", "route"):
            count = int(head[1])
            sections[head[0]] = (head, [ln.split() for ln in lines[k + 1:k + 1 + count]])
            k += 1 + count
        else:
            k += 1
    return sections


def test_geometry_single_node():
    inst = generate_instance("sphere", 1)
    _, via = metric_completion(inst)
    sec = _parse_geometry(export_route_geometry(inst, expand_route([0], via, inst)).decode())
    assert len(sec["nodes"][1]) == 1 and len(sec["edges"][1]) == 0 and len(sec["route"][1]) == 1


def test_geometry_counts_and_polyline_length():
    inst = generate_instance("torus", 25, knn=3, seed=8)
    completed, via = metric_completion(inst)
    route = list(np.random.default_rng(1).permutation(25))
    ex = expand_route(route, via, inst)
    sec = _parse_geometry(export_route_geometry(inst, ex).decode())
    assert len(sec["nodes"][1]) == inst.n
    assert len(sec["edges"][1]) == inst.edge_count
    pts = [tuple(map(float, row[1:])) for row in sec["route"][1]]
    total = math.fsum(math.dist(p, q) for p, q in zip(pts, pts[1:]))
    assert math.isclose(total, ex.cost, rel_tol=1e-9)
    assert math.isclose(float(sec["route"][0][2]), ex.cost, rel_tol=1e-9)


def test_plan_uses_solver_config():
    inst = generate_instance("sphere", 8, seed=3)
    cfg = SolverConfig(time_limit=2.0, moves=("two-opt",))
    recs = run_benchmark(BenchPlan([inst], [("local_search", cfg)], runs_per_pair=1))
    assert recs[0].solver == "local_search"
