"""Compare the compiled and pure-Python kernels on representative workloads.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--seed 0]

Prints the best wall time per backend and the speedup, and checks that both
backends return identical values.
"""

import argparse
import timeit

import numpy as np

from isoclouds._backend import compiled_kernels, python_kernels
from isoclouds.oracle import random_cloud
from isoclouds.wmi import wmi


def workloads(rng):
    A = wmi(random_cloud(2, 10, seed=1)).stacked()
    B = wmi(random_cloud(2, 10, seed=2)).stacked()
    C = wmi(random_cloud(3, 6, seed=3)).stacked()
    D = wmi(random_cloud(3, 6, seed=4)).stacked()
    k = 40
    supply = np.full(k, 3, dtype=np.int64)
    demand = np.full(k, 3, dtype=np.int64)
    cost = rng.uniform(0, 1, size=(k, k))
    return {
        "bottleneck_many 10x10 matrices, m=10": lambda K: K.bottleneck_many(A, B),
        "emd_columns_many 30x30 matrices, m=6": lambda K: K.emd_columns_many(C, D),
        "transport 40x40": lambda K: K.transport(supply, demand, cost),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    if compiled_kernels is None:
        raise SystemExit("compiled extension not available; build with `pip install -e .`")
    rng = np.random.default_rng(args.seed)
    print(f"{'workload':42s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for name, fn in workloads(rng).items():
        assert np.array_equal(fn(python_kernels), fn(compiled_kernels)), name
        t_py = min(timeit.repeat(lambda: fn(python_kernels), number=1, repeat=args.repeat))
        t_c = min(timeit.repeat(lambda: fn(compiled_kernels), number=1, repeat=args.repeat))
        print(f"{name:42s} {t_py:10.4f} {t_c:10.4f} {t_py / t_c:7.1f}x")


if __name__ == "__main__":
    main()
