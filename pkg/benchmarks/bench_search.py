"""Compiled vs pure-Python dominance-search kernel.

Collects the kernel queries issued by two workloads (the generic stratum
against every enumerated stratum for n <= N, and a full strata DAG), replays
them through both kernels and checks that the answers agree.

    python3 benchmarks/bench_search.py [--nmax 12] [--dag 8 6] [--repeat 3]
"""
import argparse
import time
from unittest import mock

from skewgen import _kernels, closure
from skewgen.generic import generic_skew_pencil


def collect(nmax, dag):
    calls = []
    real = closure._kernel_bfs

    def spy(*args):
        calls.append(args)
        return real(*args)

    closure._cached_bfs.cache_clear()
    with mock.patch.object(closure, "_kernel_bfs", spy):
        for n in range(3, nmax + 1):
            for w in range(1, (n - 1) // 2 + 1):
                W = generic_skew_pencil(n, w)
                for X in closure.enumerate_skew_kcfs(n, 2 * w, 3):
                    closure.skew_dominates(W, X)
        closure.strata_dag(dag[0], dag[1], 2)
    closure._cached_bfs.cache_clear()
    return calls


def run(kernel, calls, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = [kernel.bfs(*c) for c in calls]
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nmax", type=int, default=12)
    ap.add_argument("--dag", type=int, nargs=2, default=(8, 6), metavar=("N", "MAXRANK"))
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    calls = collect(args.nmax, args.dag)
    print(f"{len(calls)} kernel queries")
    t_py, r_py = run(_kernels.python_kernel, calls, args.repeat)
    print(f"python    {t_py:8.3f} s")
    if _kernels.compiled_kernel is None:
        print("compiled  not built (run `pip install -e . --no-build-isolation`)")
        return 0
    t_c, r_c = run(_kernels.compiled_kernel, calls, args.repeat)
    print(f"compiled  {t_c:8.3f} s   speedup {t_py / t_c:.2f}x")
    if r_py != r_c:
        bad = sum(a != b for a, b in zip(r_py, r_c))
        print(f"MISMATCH in {bad} queries")
        return 1
    print("results identical")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
