"""Compare the compiled and numpy kernels on a realistic effective system.

Usage: ``python benchmarks/bench_kernels.py [--order N] [--steps S]``.
"""

import argparse
import importlib
import time

import numpy as np

from liemoment import _kernels_py
from liemoment import dynamics as dyn
from liemoment import rep_oracle as ro
from liemoment.algebra_def import su2
from liemoment.nc_poly import NCPoly


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--order", type=int, default=4)
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    spec = su2()
    x = [NCPoly.generator(spec, i) for i in range(3)]
    H = x[2] * x[2] + x[0]
    system = dyn.build_system(spec, H, args.order)
    rep = ro.su2_rep(10, 0.1)
    y0 = system.state_vector(ro.phase_point(rep, ro.coherent_state(10, 1.0, 0.3), args.order))
    coef, owner, expo = system.compile(rep.hbar)
    print(f"variables {len(y0)}, terms {len(coef)}, steps {args.steps}")

    backends = {"python": _kernels_py}
    try:
        backends["cython"] = importlib.import_module("liemoment._kernels")
    except ImportError:
        print("compiled kernels not built; timing the numpy backend only")

    results = {}
    for name, mod in backends.items():
        t = best_of(lambda: mod.rk4(coef, owner, expo, y0, 1e-3, args.steps), args.repeat)
        results[name] = (t, np.asarray(mod.rk4(coef, owner, expo, y0, 1e-3, args.steps)[0]))
        print(f"{name:>7}: {t * 1e3:9.2f} ms  ({t / args.steps * 1e6:.2f} us/step)")
    if len(results) == 2:
        (tp, yp), (tc, yc) = results["python"], results["cython"]
        print(f"speedup {tp / tc:.1f}x, max state difference {np.abs(yp - yc).max():.2e}")


if __name__ == "__main__":
    main()
