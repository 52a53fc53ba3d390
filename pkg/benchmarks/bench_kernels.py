"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--reps 5] [--size 200]

For each kernel and shape, reports the best wall time over ``--reps`` runs
and the largest difference between the two backends' outputs.
"""
import argparse
import time

import numpy as np

from opmetric.kernels import available_backends
from opmetric.oracles import InstanceFactory

SHAPES = [(1, 1), (3, 2), (8, 3)]


def _best(fn, reps):
    best = np.inf
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _inputs(m, n, size):
    f = InstanceFactory(m * 100 + n)
    x = np.stack([f.ball_matrix(m, n) for _ in range(size)])
    y = np.stack([f.ball_matrix(m, n) for _ in range(size)])
    t = np.stack([f.gaussian(n, m) for _ in range(size)])
    return x, y, t


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--size", type=int, default=200, help="stack length; cross uses size/4 squared")
    args = p.parse_args(argv)

    backends = available_backends()
    names = sorted(backends)
    print(f"backends: {', '.join(names)}")
    header = f"{'kernel':<16}{'shape':>8}" + "".join(f"{n + ' [ms]':>16}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}{'max diff':>12}"
    print(header)

    for m, n in SHAPES:
        x, y, t = _inputs(m, n, args.size)
        q = args.size // 4
        jobs = {
            "hat_batch": lambda k: k.hat_batch(t),
            "kob_norm_pairs": lambda k: k.kob_norm_pairs(x, y),
            "kob_norm_cross": lambda k: k.kob_norm_cross(x[:q], y[:q]),
            "eta_batch": lambda k: k.eta_batch(0.9 * x, y),
        }
        for kernel, job in jobs.items():
            times, outs = [], []
            for name in names:
                dt, out = _best(lambda: job(backends[name]), args.reps)
                times.append(dt)
                outs.append(out)
            row = f"{kernel:<16}{f'{m}x{n}':>8}" + "".join(f"{1e3 * dt:16.3f}" for dt in times)
            if len(names) == 2:
                # names sorted: cython, python
                diff = float(np.max(np.abs(outs[0] - outs[1])))
                row += f"{times[1] / times[0]:10.1f}{diff:12.1e}"
            print(row)


if __name__ == "__main__":
    main()
