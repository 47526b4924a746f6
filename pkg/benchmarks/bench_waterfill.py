"""Compare the compiled water-filling kernel against the NumPy fallback.

Times the same binding instances through both implementations and reports
per-solve latency plus the speedup factor.  Run from a checkout with the
package installed:

    python benchmarks/bench_waterfill.py --repeats 20
"""

import argparse
import math
import time

import numpy as np

from qsearch._kernels._waterfill_py import waterfill as waterfill_py

try:
    from qsearch._kernels._waterfill import waterfill as waterfill_c
except ImportError:
    waterfill_c = None


def make_case(n, t, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    w = rng.random(n) + 1e-3
    w /= w.sum()
    k = 2 * t + 1
    cap = math.sin(math.pi / (2.0 * k)) ** 2
    if n * cap <= 1.0:
        raise SystemExit(f"n={n}, t={t} is not budget-binding; pick a larger n")
    return w, float(k), cap


def time_solver(fn, case, repeats):
    w, k, cap = case
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        q, lam, iters, converged = fn(w, k, cap, 1e-12, 200)
        elapsed = time.perf_counter() - start
        if not converged:
            raise SystemExit("kernel failed to converge; benchmark numbers meaningless")
        best = min(best, elapsed)
    return best, np.asarray(q)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=15, help="timing repeats per case")
    args = parser.parse_args()

    cases = [(n, t) for n in (64, 256, 1024, 4096) for t in (1, 3)]
    print(f"{'n':>6} {'t':>3} {'python ms':>12} {'c ms':>10} {'speedup':>9} {'max|dq|':>10}")
    for n, t in cases:
        case = make_case(n, t, seed=n * 31 + t)
        py_time, py_q = time_solver(waterfill_py, case, args.repeats)
        if waterfill_c is None:
            print(f"{n:>6} {t:>3} {py_time * 1e3:>12.3f} {'absent':>10} {'-':>9} {'-':>10}")
            continue
        c_time, c_q = time_solver(waterfill_c, case, args.repeats)
        drift = float(np.abs(py_q - c_q).max())
        print(
            f"{n:>6} {t:>3} {py_time * 1e3:>12.3f} {c_time * 1e3:>10.3f} "
            f"{py_time / c_time:>8.1f}x {drift:>10.2e}"
        )
    if waterfill_c is None:
        print("compiled kernel not built; install with Cython available to compare")


if __name__ == "__main__":
    main()
