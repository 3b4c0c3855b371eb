"""Timing comparison of the compiled and pure-Python integration loops.

Usage: python3 benchmarks/bench_kernels.py [--steps N] [--repeat R]
"""

import argparse
import time

from contactflow import _kernels
from contactflow.core import ContactState, DampingKind, OscillatorSystem, SinusoidalForcing
from contactflow.integrators import StepperId, integrate

CASES = [
    (StepperId.CONTACT1, dict(alpha=0.5)),
    (StepperId.CONTACT2, dict(alpha=0.5)),
    (StepperId.CONTACT_QUAD_Z, dict(alpha=0.5, damping=DampingKind.QUADRATIC_Z)),
    (StepperId.CONTACT2_FORCED, dict(alpha=0.5, forcing=SinusoidalForcing(0.5, 0.8))),
    (StepperId.LEAPFROG, dict(alpha=0.5)),
    (StepperId.RUTH3, dict(alpha=0.5)),
    (StepperId.RK4, dict(alpha=0.5)),
    (StepperId.VNC, dict(alpha=0.5)),
]


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=20000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if not _kernels.HAVE_SPEEDUPS:
        print("compiled kernels not built; showing the python backend only")

    state = ContactState(t=0.0, x=[1.0], p=[0.3], z=0.1)
    print(f"{'method':18s} {'python [ms]':>12s} {'compiled [ms]':>14s} {'speedup':>8s}")
    for sid, kw in CASES:
        sys = OscillatorSystem(**kw)
        tp = _time(
            lambda: integrate(sid, sys, state, 0.01, args.steps, backend="python"),
            args.repeat,
        )
        if _kernels.HAVE_SPEEDUPS:
            tc = _time(
                lambda: integrate(sid, sys, state, 0.01, args.steps, backend="compiled"),
                args.repeat,
            )
            print(f"{sid.value:18s} {tp * 1e3:12.2f} {tc * 1e3:14.2f} {tp / tc:7.1f}x")
        else:
            print(f"{sid.value:18s} {tp * 1e3:12.2f} {'-':>14s} {'-':>8s}")


if __name__ == "__main__":
    main()
