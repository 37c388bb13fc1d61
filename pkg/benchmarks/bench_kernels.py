"""Compare the numba and numpy kernels.

    python3 benchmarks/bench_kernels.py [--repeat R]

Prints one line per (kernel, size, backend) with the best wall time over R
runs, after a warm-up call that absorbs JIT compilation. Outputs of the two
backends are checked for equality on every case.
"""
import argparse
import random
import time

import numpy as np

from fairdiv import _jit
from fairdiv._kernels import assignment_tables, longest_walks
from fairdiv.audit import random_matroidal_profile


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def assignment_cases():
    rng = random.Random(0)
    for n, m in ((2, 8), (3, 8), (4, 8), (3, 10)):
        yield f"assign n={n} m={m}", random_matroidal_profile(n, m, rng).rank_tables(), m


def walk_cases():
    rng = np.random.default_rng(0)
    for n in (8, 32, 128):
        # potential differences minus noise: every cycle has weight <= 0
        phi = rng.integers(0, 10, size=n)
        W = phi[None, :] - phi[:, None] - rng.integers(0, 4, size=(n, n))
        np.fill_diagonal(W, 0)
        yield f"walks n={n}", W


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if _jit.HAVE_NUMBA else [])
    print(f"{'case':<22} {'backend':<7} {'seconds':>10}")
    for label, R, m in assignment_cases():
        outs = {}
        for b in backends:
            assignment_tables(R, m, backend=b)  # warm-up / compile
            t, outs[b] = best_of(lambda: assignment_tables(R, m, backend=b), args.repeat)
            print(f"{label:<22} {b:<7} {t:>10.4f}")
        ref = outs["numpy"]
        for b, o in outs.items():
            assert all(np.array_equal(x, y) for x, y in zip(ref, o)), f"{b} disagrees on {label}"
    for label, W in walk_cases():
        outs = {}
        for b in backends:
            longest_walks(W, backend=b)
            t, outs[b] = best_of(lambda: longest_walks(W, backend=b), args.repeat)
            print(f"{label:<22} {b:<7} {t:>10.4f}")
        for b, o in outs.items():
            assert np.array_equal(outs["numpy"], o), f"{b} disagrees on {label}"


if __name__ == "__main__":
    main()
