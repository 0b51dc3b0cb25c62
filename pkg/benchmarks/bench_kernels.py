"""Time the compiled and pure-Python quadrature kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Runs the raw kernel on a few representative integrands, then an end-to-end
workload (quadrature-backed norms) with each backend swapped into the oracle.
"""

import argparse
import random
import statistics
import time
from fractions import Fraction

from ordalg import _kernels_py, families, oracle
from ordalg.algebra import lp_norm

try:
    from ordalg import _kernels as _compiled
except ImportError:
    _compiled = None

CASES = {
    # name: (args..., a, b)
    "log-singular at 0+": ([1.0, -2.0], [0.0, 0.5], [2, 1], 0.5, 1.5, True, 1, 0.0, 4.0, 0.0, 0.0, 1.0),
    "slow tail to inf": ([1.0, 3.0], [0.0, -0.5], [1, 0], -0.1, 2.0, True, 2, 0.0, 20.0, 0.0, 1e-6, 1.0),
    "sign change, finite": ([1.0, -1.0], [0.0, 2.0], [0, 1], 1.0, 3.0, True, 0, 0.0, 4.0, 0.5, 0.0, 1.0),
    "log-uniform span": ([2.0, 1.0], [-1.5, 0.5], [2, 0], 1.0, 2.5, True, 3, -3.0, 9.0, 0.0, 0.0, 1.0),
}


def _time(fn, repeat):
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def _workload():
    rng = random.Random(1)
    fns = [families.random_family_fn(rng, "unit") for _ in range(40)]

    def run():
        for f in fns:
            try:
                lp_norm(f, Fraction(3, 2))
            except ValueError:
                pass

    return run


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = [("python", _kernels_py.adaptive_integrate)]
    if _compiled is not None:
        backends.insert(0, ("cython", _compiled.adaptive_integrate))
    else:
        print("compiled kernel not built; timing the Python fallback only")

    print(f"{'case':<24}" + "".join(f"{name:>14}" for name, _ in backends) + ("   speedup" if len(backends) == 2 else ""))
    for case, a in CASES.items():
        times = [_time(lambda k=kernel: k(*a, 1e-12, 0.0, 2**14), args.repeat) for _, kernel in backends]
        row = f"{case:<24}" + "".join(f"{t * 1e3:>12.3f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:>9.1f}x"
        print(row)

    run = _workload()
    saved = oracle.adaptive_integrate
    times = []
    try:
        for _, kernel in backends:
            oracle.adaptive_integrate = kernel
            times.append(_time(run, args.repeat))
    finally:
        oracle.adaptive_integrate = saved
    row = f"{'40 L_3/2 norms':<24}" + "".join(f"{t * 1e3:>12.3f}ms" for t in times)
    if len(times) == 2:
        row += f"{times[1] / times[0]:>9.1f}x"
    print(row)


if __name__ == "__main__":
    main()
