"""Benchmark: compiled series kernels vs the pure-Python twin.

Times the three kernels on representative workloads:
  * hyp1f1:   the inner Kummer series at small and large argument
  * main:     full main-branch moment accumulation (N = 100, p = 10 / 4e4)
  * appendix: Kerr-free-branch accumulation (N = 100)

Run:  python benchmarks/bench_series.py [--repeat N]
"""

import argparse
import math
import time

from crosscav._kernels import series_py

try:
    from crosscav._kernels import _series_cy
except ImportError:
    _series_cy = None


def _theta(p, two_n=200, big_gamma=63.0, bar_delta_n=5.0, tom=0.25):
    bd = tom / math.sqrt(p)
    bar_gamma = complex(big_gamma / 2.0, bar_delta_n + 2.0 * bd) / bd
    return 1.0 + two_n - p + 1j * bar_gamma


CASES = [
    ("hyp1f1 z=10", "hyp1f1_log",
     (complex(-3.0e4, 400.0), complex(-3.0e4, 400.0) - 150.0, 10.0), 200),
    ("hyp1f1 z=4e4", "hyp1f1_log",
     (_theta(4.0e4) + 1.0, _theta(4.0e4) - 150.0, 4.0e4), 3),
    ("main p=10", "main_moments", (_theta(10.0), 10.0, 200), 20),
    ("main p=4e4", "main_moments", (_theta(4.0e4), 4.0e4, 200), 2),
    ("appendix", "appendix_moments",
     (0.5 + 0.0j, complex(20.0, -126.0), 200), 50),
]


def run(repeat):
    print(f"{'case':<14} {'python':>12} {'compiled':>12} {'speedup':>9}")
    for name, fn_name, args, inner in CASES:
        fn_py = getattr(series_py, fn_name)
        t0 = time.perf_counter()
        for _ in range(repeat * inner):
            out_py = fn_py(*args)
        t_py = (time.perf_counter() - t0) / (repeat * inner)
        if _series_cy is None:
            print(f"{name:<14} {t_py * 1e3:>10.3f}ms {'n/a':>12} {'':>9}")
            continue
        fn_cy = getattr(_series_cy, fn_name)
        t0 = time.perf_counter()
        for _ in range(repeat * inner):
            out_cy = fn_cy(*args)
        t_cy = (time.perf_counter() - t0) / (repeat * inner)
        # sanity: backends agree on the converged values
        for a, b in zip(out_py, out_cy):
            if isinstance(a, float) and math.isfinite(a) and abs(a) > 1e-12:
                assert abs(a - b) / abs(a) < 1e-9, (name, out_py, out_cy)
        print(f"{name:<14} {t_py * 1e3:>10.3f}ms {t_cy * 1e3:>10.3f}ms "
              f"{t_py / t_cy:>8.1f}x")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    run(ap.parse_args().repeat)
