"""Time the numba and numpy tree-measurement kernels on identical inputs.

Usage::

    python benchmarks/bench_kernels.py [--trials N] [--repeats R]

Both backends are fed the same loss/flip bits and must return identical
``(success, error)`` arrays; the script exits non-zero if they differ.
Set ``PHOTONIC_REPEATER_NUMBA=0`` to check that the numpy path runs alone.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from photonic_repeater.montecarlo import HAVE_NUMBA, tree_measurement_kernel
from photonic_repeater.montecarlo.kernels import BASIS_X, BASIS_Z
from photonic_repeater.tree import tree_qubit_count

TREES = ((2, 2), (4, 4, 1), (3, 2, 2), (10, 20, 2))


def best_time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=200_000)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    if not HAVE_NUMBA:
        print("numba unavailable or disabled; timing numpy only")
    gen = np.random.default_rng(args.seed)
    print(f"{'tree':>12} {'basis':>5} {'Q_L':>5} " + " ".join(f"{b + ' [s]':>12}" for b in backends) + "  speedup")
    mismatch = False
    for branches in TREES:
        q_l = tree_qubit_count(branches)
        # keep the largest tree within a few hundred MB
        trials = min(args.trials, max(1, (1 << 27) // q_l))
        lost = gen.random((trials, q_l)) < 0.25
        flip = gen.random((trials, q_l)) < 1e-2
        for basis, name in ((BASIS_Z, "Z"), (BASIS_X, "X")):
            outputs, times = {}, {}
            for backend in backends:
                # first call compiles (numba) or warms caches (numpy)
                outputs[backend] = tree_measurement_kernel(lost, flip, branches, basis, backend)
                times[backend] = best_time(lambda: tree_measurement_kernel(lost, flip, branches, basis, backend), args.repeats)
            if len(backends) == 2:
                same = all(np.array_equal(a, b) for a, b in zip(outputs["numpy"], outputs["numba"]))
                mismatch |= not same
                speed = f"{times['numpy'] / times['numba']:7.1f}x" + ("" if same else "  MISMATCH")
            else:
                speed = "      -"
            label = "-".join(map(str, branches))
            cols = " ".join(f"{times[b]:12.4f}" for b in backends)
            print(f"{label:>12} {name:>5} {q_l:>5} {cols}  {speed}")
    return 1 if mismatch else 0


if __name__ == "__main__":
    sys.exit(main())
