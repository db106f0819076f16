"""Benchmark the compiled reference-solver kernel against the numpy fallback.

The reference proximal-gradient solve pins lasso optima and is the one hot
loop in the package (a million d x d iterations per problem). This script
times both backends on the same instances and checks they agree.

    python benchmarks/bench_backends.py [--iters 200000]
"""

import argparse
import time

import numpy as np

from accelcert import _core


def instance(dim, seed):
    rng = np.random.default_rng(seed)
    A = np.eye(dim) + 0.25 * rng.standard_normal((dim, dim))
    b = rng.uniform(-2.0, 2.0, dim)
    AtA = A.T @ A
    Atb = A.T @ b
    s = 0.9 / float(np.linalg.eigvalsh(AtA)[-1])
    return AtA, Atb, 0.4, s


def time_backend(fn, AtA, Atb, lam, s, iters, repeats=3):
    best = float("inf")
    x = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        x = fn(AtA, Atb, lam, s, np.zeros(len(Atb)), iters)
        best = min(best, time.perf_counter() - t0)
    return best, x


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--iters", type=int, default=200_000,
                        help="kernel iterations per timing run (default 200000)")
    args = parser.parse_args()

    if not _core.HAVE_COMPILED:
        print("compiled kernel not available; timing the fallback only")

    print(f"{'dim':>4} {'iters':>9} {'python':>10} {'compiled':>10} "
          f"{'speedup':>8} {'max|diff|':>10}")
    for dim, seed in ((5, 0), (20, 1), (50, 2)):
        AtA, Atb, lam, s = instance(dim, seed)
        t_py, x_py = time_backend(_core.ista_solve_python, AtA, Atb, lam, s, args.iters)
        if _core.HAVE_COMPILED:
            t_c, x_c = time_backend(_core.ista_solve_compiled, AtA, Atb, lam, s, args.iters)
            diff = float(np.max(np.abs(x_c - x_py)))
            print(f"{dim:>4} {args.iters:>9} {t_py:>9.3f}s {t_c:>9.3f}s "
                  f"{t_py / t_c:>7.1f}x {diff:>10.2e}")
            assert diff <= 1e-10, "backends disagree"
        else:
            print(f"{dim:>4} {args.iters:>9} {t_py:>9.3f}s {'-':>10} {'-':>8} {'-':>10}")
    print(f"active backend: {_core.backend_name()}")


if __name__ == "__main__":
    main()
