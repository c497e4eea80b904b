"""Compare the numba kernels with the pure-numpy fallback.

Each backend runs in its own interpreter (the backend flag is read at
import). Compilation is excluded: every workload runs once before timing.

    python3 benchmarks/bench_kernels.py --steps 200000 --repeat 3
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from pulsesync import _accel, get_builtin, iterate, kernels, strobe_map_grid

steps, repeat = int(sys.argv[1]), int(sys.argv[2])
prf = get_builtin("theta-tilde")
fn = prf.compiled() if _accel.USE_NUMBA else prf.g
grid = np.linspace(0.0, 1.0, 100001)
# simulate calls the kernel itself: building event objects is not kernel time
work = {
    "iterate": lambda: iterate(prf, 0.1, 0.5, max_iters=steps),
    "simulate": lambda: kernels.simulate_kernel(fn, 0.0, 0.1, 0.5, steps),
    "grid": lambda: strobe_map_grid(prf, grid, 0.5),
}
out = {"backend": _accel.BACKEND}
for name, job in work.items():
    job()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        job()
        times.append(time.perf_counter() - t0)
    out[name] = min(times)
print(json.dumps(out))
"""


def run(disable, steps, repeat):
    env = dict(os.environ)
    env.pop("PULSESYNC_DISABLE_NUMBA", None)
    if disable:
        env["PULSESYNC_DISABLE_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", WORKER, str(steps), str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000,
                    help="iterations (and firings) per timed run")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    fast = run(False, args.steps, args.repeat)
    slow = run(True, args.steps, args.repeat)
    print(f"steps={args.steps}  grid=100001 phases  best of {args.repeat}")
    print(f"{'workload':<10} {fast['backend']:>12} {slow['backend']:>12} {'speedup':>9}")
    for name in ("iterate", "simulate", "grid"):
        a, b = fast[name], slow[name]
        print(f"{name:<10} {a:>11.4f}s {b:>11.4f}s {b / a:>8.1f}x")


if __name__ == "__main__":
    main()
