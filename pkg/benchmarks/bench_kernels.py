"""Time the compiled and numpy sampling kernels on the same workloads.

    python benchmarks/bench_kernels.py [--n 1000000] [--repeat 3]

Every workload also checks that both backends return identical counts.
"""
import argparse
import time

import numpy as np

from fivecard import kernels, rng
from fivecard.shuffle_model import BiasSpec, bias_to_distribution, step_distribution

WORKLOADS = [
    ("single biased cut", lambda: bias_to_distribution(BiasSpec(0.1)).p, 1),
    ("chain a=0.3, T=10", lambda: step_distribution(0.3).p, 10),
]


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)

    states = rng.lane_states(args.seed)
    prior_cdf = rng.sampling_cdf([0.5, 0.5])
    names = sorted(kernels.BACKENDS)
    print(f"n={args.n}  backends={names}  default={kernels.BACKEND}")
    for label, law, steps in WORKLOADS:
        step_cdf = rng.sampling_cdf(law())
        results = {}
        for name in names:
            fn = kernels.BACKENDS[name]
            results[name] = best_time(lambda: fn(states, args.n, prior_cdf, step_cdf, steps), args.repeat)
        same = all(np.array_equal(results[names[0]][1], r[1]) for r in results.values())
        line = "  ".join(f"{name} {t * 1e3:8.1f} ms" for name, (t, _) in results.items())
        if len(names) == 2:
            line += f"  speedup {results['python'][0] / results['cython'][0]:.1f}x"
        print(f"{label:20s} {line}  identical={same}")


if __name__ == "__main__":
    main()
