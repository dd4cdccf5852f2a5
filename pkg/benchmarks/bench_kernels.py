"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--rows 20000] [--repeat 5]

Two workloads: batch kernels on (rows, n) matrices, and per-scenario scalar
calls through the public aggregators (what an audit of a user-defined
aggregator or the CLI does).
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from siegelfx import _kernels_py

try:
    from siegelfx import _kernels as _compiled
except ImportError:
    _compiled = None

KERNELS = ("geometric_rows", "arithmetic_rows", "median_rows", "ratio_rows", "power_beta_rows")


def _call(mod, name, X, a):
    fn = getattr(mod, name)
    return (lambda: fn(X, a)) if name == "power_beta_rows" else (lambda: fn(X))


def bench_batch(rows: int, repeat: int) -> None:
    rng = np.random.default_rng(0)
    print(f"batch kernels, {rows} rows, best of {repeat} (ms)")
    print(f"{'kernel':<18}{'n':>4}{'numpy':>10}{'cython':>10}{'speedup':>9}")
    for n in (3, 8, 32):
        X = np.ascontiguousarray(10.0 ** rng.uniform(-4, 4, size=(rows, n)))
        a = np.zeros(n - 1)
        a[0], a[-1] = -0.3, 0.3
        for name in KERNELS:
            t_py = min(timeit.repeat(_call(_kernels_py, name, X, a), number=1, repeat=repeat)) * 1e3
            if _compiled is None:
                print(f"{name:<18}{n:>4}{t_py:>10.2f}{'-':>10}{'-':>9}")
                continue
            t_c = min(timeit.repeat(_call(_compiled, name, X, a), number=1, repeat=repeat)) * 1e3
            print(f"{name:<18}{n:>4}{t_py:>10.2f}{t_c:>10.2f}{t_py / t_c:>8.1f}x")


_SCALAR = """
import numpy as np
from siegelfx import GEOMETRIC, MEDIAN, audit, AuditConfig
rng = np.random.default_rng(1)
rows = [list(r) for r in 10.0 ** rng.uniform(-4, 4, size=(5000, 5))]
import time
t = time.perf_counter()
for r in rows:
    GEOMETRIC(r); MEDIAN(r)
scalar = (time.perf_counter() - t) / len(rows) * 1e6
t = time.perf_counter()
audit(MEDIAN, AuditConfig(sample_count=20000))
print(f"{scalar:.2f} {(time.perf_counter() - t) * 1e3:.1f}")
"""


def bench_end_to_end() -> None:
    print("\nend to end (scalar GM+median call in us; 20000-sample median audit in ms)")
    for label, env in (("numpy", {"SIEGELFX_PURE_PYTHON": "1"}), ("cython", {})):
        out = subprocess.run(
            [sys.executable, "-c", _SCALAR], env={**os.environ, **env},
            capture_output=True, text=True, check=True,
        ).stdout.split()
        print(f"{label:<8} scalar={out[0]:>7} us   audit={out[1]:>7} ms")


def main() -> None:
    p = argparse.ArgumentParser()
    p.add_argument("--rows", type=int, default=20000)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    if _compiled is None:
        print("compiled kernels not built; showing numpy timings only")
    bench_batch(args.rows, args.repeat)
    bench_end_to_end()


if __name__ == "__main__":
    main()
