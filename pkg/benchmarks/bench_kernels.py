"""Time the hot loops under each available backend.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is called once untimed (numba compiles on first use), then the
best of ``--repeat`` runs is reported together with the numpy/numba ratio.
"""

import argparse
import time

import numpy as np

from qbox import kernels


def _cases():
    rhi, rlo = kernels.ratio_table(1.5, "sym", 512)
    x_series = np.linspace(-30.0, 30.0, 4000)
    x_theta = np.geomspace(1e-3, 1e5, 4000)
    xk = np.linspace(-2.0, 2.0, 400)
    xp = np.full_like(xk, 0.7)
    return {
        "series_dd (4000 points)": lambda: kernels.series_dd(x_series, rhi, rlo, 1, True, 1e-16),
        "theta (4000 points)": lambda: kernels.theta(x_theta, 1.3),
        "kernel_series (400 points)": lambda: kernels.kernel_series(xk, xp, 1.5, 0.4, 1e-12, 512),
        "rk4_trajectory (2e5 steps)": lambda: kernels.rk4_trajectory(0.1, 0.5, 1e-5, 200_000, 0.7, 0.0, 1, 1e-12),
        "gauss4_linear (2e5 steps)": lambda: kernels.gauss4_linear(0.0, 1.0, 1e-3, 200_000, 9.0),
    }


def best_time(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    backends = kernels.available_backends()
    previous = kernels.backend()
    results = {}
    try:
        for name in backends:
            kernels.use_backend(name)
            for case, fn in _cases().items():
                results[case, name] = best_time(fn, args.repeat)
    finally:
        kernels.use_backend(previous)

    header = f"{'kernel':<30}" + "".join(f"{b:>12}" for b in backends)
    if "numba" in backends:
        header += f"{'speedup':>10}"
    print(header)
    for case in _cases():
        line = f"{case:<30}" + "".join(f"{results[case, b] * 1e3:>10.2f}ms" for b in backends)
        if "numba" in backends:
            line += f"{results[case, 'numpy'] / results[case, 'numba']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
