"""Time the numba kernels against the pure numpy fallback.

Each backend runs in its own interpreter because the choice is fixed at
import time. Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from inspectroute import kernels, metric_completion
from inspectroute.ingest import generate_instance

repeat = int(sys.argv[1])

def dense(kind, n, seed):
    return np.ascontiguousarray(metric_completion(generate_instance(kind, n, knn=4, seed=seed))[0].costs)

D200 = dense("uniform-cloud", 200, 1)
S200 = np.ascontiguousarray(generate_instance("torus", 200, knn=4, seed=2).costs)
D16 = dense("sphere", 16, 3)
D9 = dense("box-panel", 9, 4)
start = np.random.default_rng(0).permutation(200)

cases = {
    "route_cost n=200": lambda: kernels.route_cost(D200, start),
    "floyd_warshall n=200": lambda: kernels.floyd_warshall(S200),
    "held_karp_table n=16": lambda: kernels.held_karp_table(D16),
    "brute_force n=9": lambda: kernels.brute_force(D9),
    "nearest_neighbor n=200": lambda: kernels.nearest_neighbor(D200, 0),
    "local_search n=200": lambda: kernels.local_search(D200, start.copy(), True, True, True, 1e-12),
}
out = {}
for name, fn in cases.items():
    fn()  # warm-up / compile
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    out[name] = best
print(json.dumps({"backend": kernels.BACKEND, "times": out}))
"""


def run_backend(disable, repeat):
    env = dict(os.environ)
    env.pop("INSPECTROUTE_DISABLE_NUMBA", None)
    if disable:
        env["INSPECTROUTE_DISABLE_NUMBA"] = "1"
    proc = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5, help="timed repetitions per case (best is kept)")
    args = ap.parse_args()

    fast = run_backend(False, args.repeat)
    slow = run_backend(True, args.repeat)
    print(f"{'kernel':<26}{fast['backend'] + ' (s)':>14}{slow['backend'] + ' (s)':>14}{'speedup':>10}")
    for name, t_fast in fast["times"].items():
        t_slow = slow["times"][name]
        print(f"{name:<26}{t_fast:>14.6f}{t_slow:>14.6f}{t_slow / t_fast:>9.1f}x")


if __name__ == "__main__":
    main()
