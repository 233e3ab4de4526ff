"""Command-line entry point: ``inspectroute {ingest,gen,solve,bench,verify}``.

Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 verification failures.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from . import kernels
from .bench import BenchPlan, compute_ar, export_results, export_route_geometry, run_benchmark, summarize
from .core import close_with_dummy, expand_route, metric_completion, strip_dummy, evaluate_route
from .errors import BaselineWorse, InspectRouteError
from .ingest import KINDS, SegmentationConfig, generate_instance, load_mesh, mesh_to_instance, read_instance, write_instance
from .solvers import EXACT_SOLVERS, SOLVERS, SolverConfig, brute_force, brute_force_tour, solve, branch_and_bound, held_karp

log = logging.getLogger("inspectroute")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3
REL_TOL = 1e-9


class UsageError(Exception):
    def __init__(self, message, usage=""):
        self.usage = usage
        super().__init__(message)


@dataclass
class CommandPlan:
    subcommand: str
    inputs: list = field(default_factory=list)
    output: str | None = None
    segmentation: SegmentationConfig | None = None
    solver: SolverConfig | None = None
    options: dict = field(default_factory=dict)
    verbosity: int = 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, self.format_usage())


def _positive_float(tok):
    try:
        v = float(tok)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {tok!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive: {tok!r}")
    return v


def _nonneg_float(tok):
    try:
        v = float(tok)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {tok!r}") from None
    if not (v >= 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be non-negative: {tok!r}")
    return v


def _positive_int(tok):
    try:
        v = int(tok)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {tok!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer: {tok!r}")
    return v


def _seed(tok):
    try:
        v = int(tok)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {tok!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer: {tok!r}")
    return v


def _seed_range(tok):
    """``0..9`` (inclusive), ``3`` or ``1,4,7``."""
    try:
        if ".." in tok:
            lo, hi = tok.split("..", 1)
            seeds = list(range(int(lo), int(hi) + 1))
        else:
            seeds = [int(s) for s in tok.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed range: {tok!r}") from None
    if not seeds or min(seeds) < 0:
        raise argparse.ArgumentTypeError(f"bad seed range: {tok!r}")
    return seeds


def _solver_opts(p, threads=True):
    p.add_argument("--time-limit", type=_positive_float, default=5.0, help="seconds per solver run (default 5)")
    p.add_argument("--seed", type=_seed, default=0)
    if threads:
        p.add_argument("--threads", type=_positive_int, default=4, help="portfolio workers (default 4)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="inspectroute", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="segment a mesh into an instance file")
    p.add_argument("mesh")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", choices=["stl-ascii", "stl-binary", "obj"], default=None,
                   help="mesh format (sniffed when omitted)")
    p.add_argument("--max-area", type=_positive_float, default=None, help="patch area limit, m^2 (default 5%% of mesh)")
    p.add_argument("--max-angle", type=_positive_float, default=0.35, help="normal deviation limit, rad")
    p.add_argument("--standoff", type=_nonneg_float, default=0.15)
    p.add_argument("--knn", type=_positive_int, default=4)
    p.add_argument("--name", default=None)

    p = sub.add_parser("gen", help="write a synthetic instance")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--knn", type=_positive_int, default=4)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--name", default=None)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("solve", help="solve one instance and print a report")
    p.add_argument("instance")
    p.add_argument("--solver", choices=list(SOLVERS), default="portfolio")
    _solver_opts(p)
    p.add_argument("--baseline", choices=list(EXACT_SOLVERS), default=None,
                   help="exact solver giving the AR reference")
    p.add_argument("--geometry", default=None, help="write route geometry to this path")

    p = sub.add_parser("bench", help="repeated runs with approximation ratios")
    p.add_argument("instances", nargs="+")
    p.add_argument("--solver", action="append", choices=list(SOLVERS), required=True, dest="solvers")
    p.add_argument("--runs", type=_positive_int, default=15)
    p.add_argument("--baseline", default="held_karp")
    _solver_opts(p)
    p.add_argument("--csv", default=None, help="write raw records here")
    p.add_argument("--markdown", default=None, help="write the summary table here")
    p.add_argument("--format", choices=["csv", "markdown"], default="markdown",
                   help="what to print on stdout when no output path is given")
    p.add_argument("--timing", choices=["wall", "off"], default="wall",
                   help="'off' records 0 s runtimes so outputs are byte-reproducible")

    p = sub.add_parser("verify", help="check exact solvers and transforms against enumeration")
    p.add_argument("--max-n", type=_positive_int, default=9)
    p.add_argument("--seeds", type=_seed_range, default=list(range(10)))
    p.add_argument("--knn", type=_positive_int, default=3)
    return parser


def parse_args(argv) -> CommandPlan:
    """Map argv to a :class:`CommandPlan`; raises :class:`UsageError` on bad input."""
    parser = build_parser()
    ns = parser.parse_args(list(argv))
    plan = CommandPlan(ns.subcommand, verbosity=ns.verbose)
    if ns.subcommand == "ingest":
        plan.inputs = [ns.mesh]
        plan.output = ns.output
        plan.segmentation = SegmentationConfig(ns.max_area, ns.max_angle, ns.standoff, ns.knn)
        plan.options = {"format": ns.format, "name": ns.name}
    elif ns.subcommand == "gen":
        plan.output = ns.output
        plan.options = {"kind": ns.kind, "n": ns.n, "knn": ns.knn, "seed": ns.seed, "name": ns.name}
    elif ns.subcommand == "solve":
        plan.inputs = [ns.instance]
        plan.solver = SolverConfig(time_limit=ns.time_limit, seed=ns.seed, threads=ns.threads)
        plan.options = {"solver": ns.solver, "baseline": ns.baseline, "geometry": ns.geometry}
    elif ns.subcommand == "bench":
        plan.inputs = list(ns.instances)
        plan.solver = SolverConfig(time_limit=ns.time_limit, seed=ns.seed, threads=ns.threads)
        if len(set(ns.solvers)) != len(ns.solvers):
            raise UsageError(f"--solver given twice: {ns.solvers}", parser.format_usage())
        plan.options = {"solvers": ns.solvers, "runs": ns.runs, "baseline": ns.baseline, "csv": ns.csv,
                        "markdown": ns.markdown, "format": ns.format, "timing": ns.timing}
    elif ns.subcommand == "verify":
        plan.options = {"max_n": ns.max_n, "seeds": ns.seeds, "knn": ns.knn}
    return plan


def write_atomic(path, data: bytes):
    """Write via a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent if str(path.parent) else ".")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise InspectRouteError(f"cannot read {path}: {e.strerror}") from None


def _ingest(plan):
    mesh = load_mesh(_read(plan.inputs[0]), plan.options["format"])
    name = plan.options["name"] or Path(plan.inputs[0]).stem
    inst = mesh_to_instance(mesh, plan.segmentation, name=name)
    write_atomic(plan.output, write_instance(inst))
    log.info("%s: %d faces -> %d nodes, %d edges", name, mesh.n_faces, inst.n, inst.edge_count)
    return EXIT_OK


def _gen(plan):
    o = plan.options
    inst = generate_instance(o["kind"], o["n"], o["knn"], o["seed"], name=o["name"])
    write_atomic(plan.output, write_instance(inst))
    log.info("%s: %d nodes, %d edges", inst.name, inst.n, inst.edge_count)
    return EXIT_OK


def _solve(plan, out):
    inst = read_instance(_read(plan.inputs[0]))
    completed, via = metric_completion(inst)
    res = solve(completed, plan.options["solver"], plan.solver)
    expanded = expand_route(res.route, via, inst)
    base = None
    if plan.options["baseline"]:
        base = solve(completed, plan.options["baseline"], plan.solver).cost
    elif "best_known_cost" in inst.metadata:
        base = float(inst.metadata["best_known_cost"])
    ar = "n/a"
    if base is not None:
        try:
            ar = f"{compute_ar(res.cost, base):.6f}"
        except (BaselineWorse, ValueError):
            ar = "n/a (baseline worse than result)"
    lines = [
        f"instance: {inst.name} ({inst.n} nodes, {inst.edge_count} edges)",
        f"solver: {res.solver_id}",
        f"seed: {res.seed}",
        f"cost: {res.cost!r}",
        f"ar: {ar}",
        f"optimal: {'yes' if res.optimal else 'no'}",
        f"lower_bound: {res.lower_bound!r}" if res.lower_bound is not None else "lower_bound: n/a",
        f"runtime_seconds: {res.runtime_seconds:.6f}",
        f"waypoints: {len(expanded.waypoints)}",
        "route: " + " ".join(map(str, res.route)),
    ]
    out.write("\n".join(lines) + "\n")
    if plan.options["geometry"]:
        write_atomic(plan.options["geometry"], export_route_geometry(inst, expanded))
    return EXIT_OK


def _bench(plan, out):
    o = plan.options
    clock = (lambda: 0.0) if o["timing"] == "off" else None
    kwargs = {"clock": clock} if clock else {}
    bp = BenchPlan(
        instances=plan.inputs,
        solvers=[(sid, plan.solver) for sid in o["solvers"]],
        runs_per_pair=o["runs"],
        baseline=o["baseline"],
        master_seed=plan.solver.seed,
        **kwargs,
    )
    records = run_benchmark(bp)
    summary = summarize(records)
    if o["csv"]:
        write_atomic(o["csv"], export_results(records, summary, "csv"))
    if o["markdown"]:
        write_atomic(o["markdown"], export_results(records, summary, "markdown"))
    if not o["csv"] and not o["markdown"]:
        out.write(export_results(records, summary, o["format"]).decode())
    return EXIT_OK


def run_verify(max_n: int, seeds, knn: int = 3) -> tuple[int, int, list[str]]:
    """Exact solvers against enumeration, plus the dummy-node closure, on seeded instances."""
    passed = failed = 0
    failures = []

    def same(a, b):
        return abs(a - b) <= REL_TOL * max(abs(a), abs(b), 1e-300)

    for n in range(2, max_n + 1):
        for seed in seeds:
            kind = KINDS[seed % len(KINDS)]
            inst, _ = metric_completion(generate_instance(kind, n, knn, seed))
            ref = brute_force(inst).cost
            checks = {
                "held_karp": held_karp(inst).cost,
                "branch_and_bound": branch_and_bound(inst, SolverConfig(time_limit=60.0)).cost,
            }
            if n <= 8:
                aug = close_with_dummy(inst)
                tour, tour_cost = brute_force_tour(aug)
                checks["closure"] = tour_cost
                checks["strip_dummy"] = evaluate_route(inst, strip_dummy(tour, inst.n))
            for what, cost in checks.items():
                if same(cost, ref):
                    passed += 1
                else:
                    failed += 1
                    failures.append(f"{inst.name}: {what} {cost!r} != brute force {ref!r}")
    return passed, failed, failures


def _verify(plan, out):
    o = plan.options
    passed, failed, failures = run_verify(o["max_n"], o["seeds"], o["knn"])
    for f in failures:
        out.write(f"FAIL {f}\n")
    out.write(f"verify: {passed} passed, {failed} failed (backend {kernels.BACKEND})\n")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def execute(plan: CommandPlan, out=None) -> int:
    out = out or sys.stdout
    handlers = {"ingest": lambda p: _ingest(p), "gen": lambda p: _gen(p), "solve": lambda p: _solve(p, out),
                "bench": lambda p: _bench(p, out), "verify": lambda p: _verify(p, out)}
    try:
        return handlers[plan.subcommand](plan)
    except (InspectRouteError, OSError, ValueError) as e:
        log.error("%s failed: %s", plan.subcommand, e)
        return EXIT_FAIL


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        plan = parse_args(argv)
    except UsageError as e:
        sys.stderr.write(f"{e.usage}inspectroute: error: {e}\n")
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.WARNING - 10 * min(plan.verbosity, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    return execute(plan)


if __name__ == "__main__":
    sys.exit(main())
