"""Time the numba kernels against their pure-numpy twins.

Run with ``python benchmarks/bench_kernels.py [--N 2560] [--repeat 3]``.
Both variants are imported directly, so the SFOR_WAVE_DISABLE_JIT flag
does not matter here; a last section times one full solver run under
whichever backend the flag selected.
"""

import argparse
import math
import time

import numpy as np

from sfor_wave import _kernels, space1d
from sfor_wave._accel import HAVE_NUMBA
from sfor_wave.harness import ExperimentConfig, problem_for
from sfor_wave.mesh import build_graded_mesh
from sfor_wave.sfor import run


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def all_rows(row_fn, points, steps, N, *args):
    for n in range(1, N + 1):
        row_fn(points, steps, n, *args)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=2560)
    ap.add_argument("--M", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    beta = 0.75
    theta = beta / 2
    g1b, g2b = math.gamma(1 - beta), math.gamma(2 - beta)
    mesh = build_graded_mesh(1.0, args.N, 3.0)
    pts, st = np.ascontiguousarray(mesh.points), np.ascontiguousarray(mesh.steps)
    rng = np.random.default_rng(0)
    incr = rng.standard_normal((args.N + 1, args.M - 1))
    coeffs = rng.random(args.N)
    disc = space1d.build_fem(math.pi, args.M)
    rhs = rng.standard_normal(disc.dim)

    cases = {
        "L1 rows 1..N": (
            lambda: all_rows(_kernels.l1_row_np, pts, st, args.N, beta, g2b),
            lambda: all_rows(_kernels.l1_row_nb, pts, st, args.N, beta, g2b),
        ),
        "Alikhanov rows 1..N": (
            lambda: all_rows(_kernels.alikhanov_row_np, pts, st, args.N, beta, theta, g1b, g2b),
            lambda: all_rows(_kernels.alikhanov_row_nb, pts, st, args.N, beta, theta, g1b, g2b),
        ),
        "history sum (m=N)": (
            lambda: _kernels.history_np(coeffs, incr, args.N),
            lambda: _kernels.history_nb(coeffs, incr, args.N),
        ),
        "tridiagonal solve x1000": (
            lambda: [_kernels.spd_tridiag_solve_np(disc.stiff_diag, disc.stiff_off, rhs) for _ in range(1000)],
            lambda: [_kernels.spd_tridiag_solve_nb(disc.stiff_diag, disc.stiff_off, rhs) for _ in range(1000)],
        ),
    }

    print(f"numba available: {HAVE_NUMBA}; active backend: {_kernels.BACKEND}")
    print(f"{'kernel':28s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s}")
    for name, (np_fn, nb_fn) in cases.items():
        np_fn()
        nb_fn()  # compile outside the timing
        t_np = best_of(np_fn, args.repeat)
        t_nb = best_of(nb_fn, args.repeat)
        print(f"{name:28s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:7.1f}x")

    cfg = ExperimentConfig("EX1", 1.5, "V_FORM", "L1", "OPTIMAL", (20,), 640, args.M)
    spec = problem_for(cfg)
    m = build_graded_mesh(1.0, 640, cfg.r)
    run(spec, m, disc)
    print(f"full L1 run, N=640, M={args.M} ({_kernels.BACKEND}): {best_of(lambda: run(spec, m, disc), args.repeat):.3f} s")


if __name__ == "__main__":
    main()
