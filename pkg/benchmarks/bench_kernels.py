"""Timing comparison between the two kernel lanes.

The package ships a compiled extension and a pure-Python reference with the
same entry points and bit-identical outputs. This script times both on the
three hot paths and prints a table. Run it from the repository root:

    python benchmarks/bench_kernels.py [--scale N]

--scale multiplies the default workloads (use 0.1 for a quick look).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from bgrw import _pykernels

try:
    from bgrw import _ckernels
except ImportError:  # build without the extension: pure lane only
    _ckernels = None

SINGLE = ("finite", 1, (), 0, 0)


def _cases(scale: float):
    def sized(n: int) -> int:
        return max(10, int(n * scale))

    def summary(kernel, n):
        return kernel.run_summary(SINGLE, 0.5, n, 42, record_series=True)

    def summary_measure(kernel, n):
        return kernel.run_summary(
            SINGLE, 0.5, n, 42, measure_radius=1, record_series=False
        )

    def loops(kernel, n):
        out = 0
        loops0 = (0, 0, 0, 0, 1)
        for i in range(n):
            out += kernel.run_loop(loops0, 4, 0.5, 200, 1000 + i)
        return out

    def coupled(kernel, n):
        return kernel.run_coupled(10, 0.5, n, 42, False)

    return [
        ("run_summary, 10^5 steps", summary, sized(100_000)),
        ("run_summary + radius-1 measure, 10^4 steps", summary_measure, sized(10_000)),
        ("run_loop, 10^3 runs x 200 steps", loops, sized(1_000)),
        ("run_coupled, 10^5 step horizon", coupled, sized(100_000)),
    ]


def _best_of(fn, kernel, n, repeats=3) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(kernel, n)
        best = min(best, time.perf_counter() - t0)
    return best


def _check_agreement() -> None:
    """Cheap cross-lane spot check so the table never compares unequal work."""
    if _ckernels is None:
        return
    a = _pykernels.run_summary(SINGLE, 0.5, 2_000, 7, record_series=True)
    b = _ckernels.run_summary(SINGLE, 0.5, 2_000, 7, record_series=True)
    if not (
        np.array_equal(a["dist"], b["dist"])
        and a["vcount"][-1] == b["vcount"][-1]
        and a["creations"] == b["creations"]
    ):
        raise AssertionError("kernel lanes disagree; benchmark aborted")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--scale", type=float, default=1.0)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    _check_agreement()
    lanes = [("pure", _pykernels)]
    if _ckernels is not None:
        lanes.insert(0, ("compiled", _ckernels))
    else:
        print("compiled lane unavailable; timing the pure lane only\n")

    width = max(len(name) for name, _, _ in _cases(args.scale)) + 2
    header = f"{'case':<{width}}" + "".join(f"{n:>12}" for n, _ in lanes)
    if len(lanes) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, fn, n in _cases(args.scale):
        times = [_best_of(fn, kernel, n, args.repeats) for _, kernel in lanes]
        row = f"{name:<{width}}" + "".join(f"{t:>11.3f}s" for t in times)
        if len(times) == 2 and times[0] > 0:
            row += f"{times[1] / times[0]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
