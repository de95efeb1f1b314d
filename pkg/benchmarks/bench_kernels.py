"""Benchmark the compiled convolution kernel against the numpy fallback.

Workloads mirror the heavy paths of the simulator: single banded kicks at
the sizes the acceptance scenarios use, a 100-kick resonant evolution, and a
201-member quasimomentum ensemble.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import math
import time

import numpy as np

from kickedbec import _kernels_py, kernels
from kickedbec.observables import beta_grid, ensemble_current
from kickedbec.prep import prepare_superposition
from kickedbec.propagator import evolve_kicked, kick_kernel


def _implementations():
    impls = {"numpy": _kernels_py.convolve_banded}
    try:
        from kickedbec import _kernels
        impls["cython"] = _kernels.convolve_banded
    except ImportError:
        pass
    return impls


def time_call(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def bench_single_kicks(impls, repeat):
    rows = []
    for size, strength in ((134, 0.6), (243, 0.6), (243, 60.0)):
        rng = np.random.default_rng(size)
        psi = rng.normal(size=size) + 1j * rng.normal(size=size)
        psi /= np.linalg.norm(psi)
        kernel = kick_kernel(strength)
        label = f"kick  N={size:<4d} band={len(kernel) // 2}"
        timings = {}
        for name, fn in impls.items():
            timings[name] = time_call(lambda f=fn: f(psi, kernel),
                                      repeat * 50) * 1e6
        rows.append((label, timings, "us"))
    return rows


def bench_evolutions(repeat):
    rows = []
    state100 = prepare_superposition(math.pi, -121, 120)

    def hundred_kicks():
        evolve_kicked(state100, 0.6, 4 * math.pi, 100)

    def ensemble():
        ensemble_current(0.6, 4 * math.pi, 0.0, 10, beta_grid(201))

    for label, fn in (("evolve 100 kicks, N=242", hundred_kicks),
                      ("ensemble 201 members x 10 kicks", ensemble)):
        timings = {}
        for name in kernels.available_backends():
            previous = kernels.force_backend(name)
            try:
                timings[name] = time_call(fn, repeat) * 1e3
            finally:
                kernels.force_backend(previous)
        rows.append((label, timings, "ms"))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5,
                        help="timing repetitions (best is reported)")
    args = parser.parse_args()

    impls = _implementations()
    print(f"available backends: {', '.join(impls)} "
          f"(default: {kernels.BACKEND})\n")
    rows = bench_single_kicks(impls, args.repeat) + bench_evolutions(args.repeat)

    width = max(len(label) for label, _, _ in rows)
    print(f"{'workload':<{width}}  {'numpy':>12}  {'cython':>12}  {'speedup':>8}")
    for label, timings, unit in rows:
        numpy_t = timings.get("numpy")
        cython_t = timings.get("cython")
        speedup = (f"{numpy_t / cython_t:7.2f}x"
                   if numpy_t and cython_t else "     n/a")
        cy = f"{cython_t:9.2f} {unit}" if cython_t else "      n/a"
        print(f"{label:<{width}}  {numpy_t:9.2f} {unit}  {cy}  {speedup}")


if __name__ == "__main__":
    main()
