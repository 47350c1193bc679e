"""Time the compiled kernels against the pure-Python ones.

    python benchmarks/bench_kernels.py [--repeat 3] [--n 4000]
"""

import argparse
import time

import numpy as np

from girgmotif._backend import compiled_kernels
from girgmotif.counting import count_ordered
from girgmotif.girg import GirgParams, sample_girg, sample_irg
from girgmotif.lp import LinearProgram, solve_lp
from girgmotif.pattern import named_pattern


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n):
    params = GirgParams(n=n, tau=2.5, seed=1)
    host = sample_girg(params)
    rng = np.random.default_rng(0)
    lps = [LinearProgram(rng.normal(size=30), rng.normal(size=(40, 30)), rng.uniform(0, 2, 40),
                         lb=np.full(30, -1.0), ub=np.full(30, 1.0)) for _ in range(20)]
    return [
        (f"sample_girg n={n}", lambda b: sample_girg(params, backend=b)),
        (f"sample_irg n={n}", lambda b: sample_irg(params, backend=b)),
        (f"count triangle n={n}", lambda b: count_ordered(host, named_pattern("triangle"), backend=b)),
        (f"count C4 induced n={n}", lambda b: count_ordered(host, named_pattern("C4"), "induced", backend=b)),
        ("simplex 20 x (40x30)", lambda b: [solve_lp(lp, backend=b) for lp in lps]),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--n", type=int, default=4000)
    args = ap.parse_args()
    if compiled_kernels is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    print(f"{'case':32s} {'compiled s':>11s} {'python s':>11s} {'speedup':>8s}")
    for name, fn in cases(args.n):
        tc = best_of(lambda: fn("compiled"), args.repeat)
        tp = best_of(lambda: fn("python"), args.repeat)
        print(f"{name:32s} {tc:11.4f} {tp:11.4f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
