"""Time each hot kernel compiled and as plain Python.

    python3 benchmarks/bench_kernels.py [--repeat N]

The plain path is the kernel's ``py_func`` body, i.e. exactly what runs
with COMSTAB_DISABLE_NUMBA=1 (nested kernel calls stay compiled here, so
the pure column slightly flatters the fallback).
"""
import argparse
import timeit

import numpy as np

from comstab import _accel, adrc, fuzzy, grader, harness, kinematics
from comstab._accel import python_impl


def cases():
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 0.2, (10_000, 2))
    centers = np.array(grader.TABLE1["X"])
    yield "assign 10k points", grader.assign, (pts, centers, 0.7, 0.3)

    eng = fuzzy.default_gain_engines()[0]
    ke, kec = eng.inputs
    yield "mamdani2 one call", fuzzy.mamdani2, (0.03, ke.lo, ke.hi, 7, -0.01, kec.lo, kec.hi, 7,
                                                eng.rules, eng.out_mf, eng.grid)

    e = np.linspace(-1, 1, 200)
    yield "fst_grid 200x200", adrc.fst_grid, (e, e, 1.0, 0.002)

    m = rng.uniform(1, 50, 11)
    pos = rng.uniform(-1, 1, (1000, 11, 3))
    acc = rng.uniform(-2, 2, (1000, 11, 3))
    yield "zmp_terms 1000x11", kinematics.zmp_terms, (m, pos, acc, 9.81)

    sc = harness.SteeringScenario(duration=1.0)
    captured = {}
    original = harness.steering_kernel

    def grab(*args):
        captured["args"] = args
        return original(*args)

    harness.steering_kernel = grab
    try:
        harness.run_steering(sc)
    finally:
        harness.steering_kernel = original
    yield "steering_kernel 1 s", original, captured["args"]


def bench(func, args, repeat):
    func(*args)  # compile / warm up
    return min(timeit.repeat(lambda: func(*args), number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"numba active: {_accel.USING_NUMBA}")
    print(f"{'kernel':<22}{'compiled_ms':>13}{'python_ms':>13}{'speedup':>10}")
    for name, func, fargs in cases():
        fast = bench(func, fargs, args.repeat)
        slow = bench(python_impl(func), fargs, max(1, args.repeat // 2))
        print(f"{name:<22}{fast * 1e3:>13.3f}{slow * 1e3:>13.3f}{slow / fast:>10.1f}")


if __name__ == "__main__":
    main()
