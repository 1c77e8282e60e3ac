"""Benchmark the Monte Carlo calibration kernel: numba vs. pure numpy.

Usage::

    python benchmarks/bench_calibration.py [--trials 20000] [--grid 24x24]

The numba backend is compiled once before timing so the comparison measures
steady-state throughput. Both backends consume identical uniform streams;
the printed max relative deviation shows how closely the accumulated
results agree.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from graphbayes import ExperimentConfig, grid_graph, run_calibration
from graphbayes import _kernels


def _time_backend(name, config, repeats):
    previous = _kernels.set_backend(name)
    try:
        run_calibration(config)  # warm-up (JIT compile / cache priming)
        best = np.inf
        report = None
        for _ in range(repeats):
            start = time.perf_counter()
            report = run_calibration(config)
            best = min(best, time.perf_counter() - start)
        return best, report
    finally:
        _kernels.set_backend(previous)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=20000)
    parser.add_argument("--grid", default="24x24")
    parser.add_argument("--sigma2", type=float, default=3.0)
    parser.add_argument("--eps", type=float, default=1e-6)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    width, height = (int(v) for v in args.grid.lower().split("x"))
    graph = grid_graph(width, height)
    config = ExperimentConfig(
        graph=graph, eps=args.eps, sigma2=args.sigma2,
        trials=args.trials, seed=args.seed,
    )

    print(f"graph: {width}x{height} grid ({graph.n} nodes), "
          f"trials: {args.trials}, repeats: {args.repeats} (best shown)")

    results = {}
    for backend in ("numpy", "numba"):
        try:
            elapsed, report = _time_backend(backend, config, args.repeats)
        except RuntimeError as exc:
            print(f"{backend:>6}: skipped ({exc})")
            continue
        results[backend] = (elapsed, report)
        rate = args.trials / elapsed
        print(f"{backend:>6}: {elapsed:8.3f} s   ({rate:,.0f} trials/s)")

    if len(results) == 2:
        t_np, rep_np = results["numpy"]
        t_nb, rep_nb = results["numba"]
        dev = float(np.max(np.abs(rep_np.mse - rep_nb.mse) / rep_np.mse))
        print(f"speedup numba/numpy: {t_np / t_nb:.2f}x")
        print(f"max relative mse deviation between backends: {dev:.2e}")


if __name__ == "__main__":
    main()
