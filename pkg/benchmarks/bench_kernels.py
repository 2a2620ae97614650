"""Time each hot kernel under the numba and pure-numpy backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from vorace import _kernels
from vorace._accel import HAVE_NUMBA, using_backend
from vorace.montecarlo import SimConfig, simulate


def best_of(fn, repeat):
    fn()  # warm-up (JIT compile / cache load)
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def cases(rng):
    for m in (5, 6, 7):
        r = np.argsort(rng.random((50, m)), axis=1)
        P = _kernels.pairwise_matrix(r, np.ones(50))
        yield f"kemeny m={m}", lambda P=P: _kernels.kemeny_top_scores(P)
    r = np.argsort(rng.random((50, 10)), axis=1)
    w = np.ones(50)
    yield "pairwise n=50 m=10", lambda: _kernels.pairwise_matrix(r, w)
    ballots = np.argsort(rng.random((4096, 15, 4)), axis=2)
    for name, rule in (("borda", _kernels.BORDA), ("copeland", _kernels.COPELAND), ("kemeny", _kernels.KEMENY)):
        yield f"mc {name} 4096x15x4", lambda rule=rule: _kernels.mc_wins(ballots, np.ones(15), rule, _kernels.STRICT, 0)
    tops = ballots[:, :, 0]
    yield "mc plurality 4096x15", lambda: _kernels.mc_plurality_tops(tops, 4, _kernels.STRICT)
    cfg = SimConfig(n=15, m=4, trials=50_000, p=0.4, rule="copeland")
    yield "simulate copeland 50k", lambda: simulate(cfg, threads=1)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':28s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, fn in cases(np.random.default_rng(0)):
        with using_backend("numba"):
            fast = best_of(fn, args.repeat)
        with using_backend("numpy"):
            slow = best_of(fn, args.repeat)
        print(f"{name:28s} {fast * 1e3:10.3f} {slow * 1e3:10.3f} {slow / fast:7.1f}x")


if __name__ == "__main__":
    main()
