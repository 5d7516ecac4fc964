"""Timing comparison between the compiled kernel backend and the numpy
fallback.

Each kernel is timed at a solver-typical size, where per-call overhead
dominates and the compiled core pays off, and at a large size, where
vectorized numpy catches up.  The end-to-end rows launch one solver run
per backend in a subprocess so the import-time backend choice applies.
Run from the repository root:

    python3 benchmarks/bench_kernels.py [--repeat 5] [--quick]
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from parabound._kernels import _pure as pure

try:
    from parabound._kernels import _fast as fast
except ImportError:
    fast = None

H, P, DELTA = 0.01, 2.5, 1e-8

_SOLVE_SNIPPET = """
import time
import numpy as np
import parabound as pb
from parabound import _kernels

grid = pb.Grid(dim={dim}, extent=1.0, nx={nx}, nt={nt}, dt=0.002)
params = pb.StructureParams(n_dim={dim}, p=2.5, eps0=pb.default_eps0({dim}))
initial = pb.smooth_positive_initial(grid, 2.0)
t0 = time.perf_counter()
pb.solve(initial, pb.SolverConfig(params=params), grid)
print(_kernels.BACKEND, time.perf_counter() - t0)
"""


def cases_1d(rng, nx, number):
    u = rng.uniform(0.0, 2.0, nx)
    c = rng.uniform(0.5, 1.5, nx - 1)
    dl = rng.uniform(-0.4, -0.1, nx - 1)
    du = rng.uniform(-0.4, -0.1, nx - 1)
    d = rng.uniform(1.5, 2.5, nx)
    rhs = rng.uniform(-1.0, 1.0, nx)
    label = f"nx={nx}"
    return [
        ("flux_faces_1d", label, number,
         lambda m: m.flux_faces_1d(u, H, P, DELTA, c)),
        ("dflux_faces_1d", label, number,
         lambda m: m.dflux_faces_1d(u, H, P, DELTA, c)),
        ("diffusivity_faces_1d", label, number,
         lambda m: m.diffusivity_faces_1d(u, H, P, DELTA, c)),
        ("tridiag_solve", label, number,
         lambda m: m.tridiag_solve(dl, d, du, rhs)),
    ]


def cases_2d(rng, n, number):
    u = rng.uniform(0.0, 2.0, (n, n))
    cfx = rng.uniform(0.5, 1.5, (n - 1, n))
    cfy = rng.uniform(0.5, 1.5, (n, n - 1))
    label = f"{n}x{n}"
    return [
        ("flux_faces_2d", label, number,
         lambda m: m.flux_faces_2d(u, H, P, DELTA, cfx, cfy)),
        ("newton_faces_2d", label, number,
         lambda m: m.newton_faces_2d(u, H, P, DELTA, cfx, cfy)),
        ("diffusivity_faces_2d", label, number,
         lambda m: m.diffusivity_faces_2d(u, H, P, DELTA, cfx, cfy)),
    ]


def cases_reduce(rng, size, number):
    vals = rng.uniform(0.0, 2.0, size)
    mask = (rng.uniform(size=size) < 0.4).astype(np.uint8)
    label = f"n={size}"
    return [
        ("trunc_pow_sum", label, number,
         lambda m: m.trunc_pow_sum(vals, mask, 0.5, 3.5)),
        ("masked_max", label, number,
         lambda m: m.masked_max(vals, mask)),
    ]


def micro_cases(rng):
    return (cases_1d(rng, 41, 2000) + cases_1d(rng, 401, 500)
            + cases_2d(rng, 17, 500) + cases_2d(rng, 61, 100)
            + cases_reduce(rng, 2_500, 500)
            + cases_reduce(rng, 200_000, 20))


def best_time(fn, number, repeat):
    runs = timeit.repeat(fn, number=number, repeat=max(repeat, 3))
    return min(runs) / number


def run_solve(pure_backend, dim, nx, nt):
    env = dict(os.environ)
    env["PARABOUND_PURE"] = "1" if pure_backend else "0"
    code = _SOLVE_SNIPPET.format(dim=dim, nx=nx, nt=nt)
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    backend, seconds = out.stdout.split()
    return backend, float(seconds)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5,
                    help="timing repeats per kernel (best is reported)")
    ap.add_argument("--quick", action="store_true",
                    help="skip the end-to-end solver rows")
    args = ap.parse_args(argv)

    if fast is None:
        print("compiled backend not importable; only the numpy fallback "
              "is timed")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<24}{'size':>12}{'pure':>12}{'fast':>12}"
          f"{'speedup':>10}")
    for name, label, number, call in micro_cases(rng):
        t_pure = best_time(lambda: call(pure), number, args.repeat)
        if fast is not None:
            t_fast = best_time(lambda: call(fast), number, args.repeat)
            print(f"{name:<24}{label:>12}{t_pure * 1e6:>10.1f}us"
                  f"{t_fast * 1e6:>10.1f}us{t_pure / t_fast:>9.2f}x")
        else:
            print(f"{name:<24}{label:>12}{t_pure * 1e6:>10.1f}us"
                  f"{'-':>12}{'-':>10}")

    if args.quick or fast is None:
        return 0

    for dim, nx, nt in ((1, 401, 101), (2, 61, 41)):
        label = f"solve {dim}D"
        size = f"{nx}x{nt}"
        _, t_pure = run_solve(True, dim, nx, nt)
        backend, t_fast = run_solve(False, dim, nx, nt)
        if backend != "fast":
            print(f"{label:<24} compiled backend unavailable in "
                  "subprocess")
            continue
        print(f"{label:<24}{size:>12}{t_pure * 1e3:>10.1f}ms"
              f"{t_fast * 1e3:>10.1f}ms{t_pure / t_fast:>9.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
