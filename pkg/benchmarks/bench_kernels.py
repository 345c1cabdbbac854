"""Benchmark the compiled eigenvalue kernel against the numpy fallback.

Times the hot operation (largest eigenvalue of Xi diag(y^2) Xi^dagger over a
batch of points) for both backends across matrix sizes and batch shapes, and
an end-to-end optimization for context.

Usage: python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time

import numpy as np

from usdpovm import families, optimizer
from usdpovm._kernels import available_backends, backend_name, get_backend
from usdpovm.optimizer import OptimizerConfig


def time_call(fn, *args, min_time=0.2):
    fn(*args)  # warm up
    reps, elapsed = 0, 0.0
    while elapsed < min_time:
        start = time.perf_counter()
        fn(*args)
        elapsed += time.perf_counter() - start
        reps += 1
    return elapsed / reps


def bench_batches():
    rng = np.random.default_rng(0)
    print(f"{'n':>3} {'batch':>8} " + "".join(f"{name:>14}" for name in available_backends())
          + ("   speedup" if len(available_backends()) > 1 else ""))
    for n in (2, 3, 4, 6, 8):
        xi = np.ascontiguousarray(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
        for batch in (1, 64, 4096):
            ysq = rng.uniform(0.05, 1.5, size=(batch, n))
            times = {}
            for name in available_backends():
                backend = get_backend(name)
                times[name] = time_call(backend.top_eigenvalues, xi, ysq)
            row = f"{n:>3} {batch:>8} " + "".join(
                f"{times[name] * 1e6:>12.1f}us" for name in available_backends())
            if "native" in times and "reference" in times:
                row += f"   {times['reference'] / times['native']:>6.2f}x"
            print(row)


def bench_end_to_end():
    print(f"\nend-to-end optimize (numerical path, grid 24, 8 restarts), "
          f"active backend: {backend_name()}")
    print("rerun with USDPOVM_BACKEND=reference to time the fallback")
    for n, seed in ((3, 1), (4, 2)):
        states = families.random_states(n, seed)
        t = time_call(lambda: optimizer.optimize(
            states, config=OptimizerConfig(use_analytic=False)), min_time=0.5)
        print(f"  n={n}: {t * 1e3:.1f} ms per optimize")


if __name__ == "__main__":
    print("available backends:", ", ".join(available_backends()))
    bench_batches()
    bench_end_to_end()
