#!/usr/bin/env python3
"""Benchmark the compiled tracking kernel against the pure-Python lane.

Tracks the acceptance-grade arc phantom's seed lattice through both
kernels, checks the outputs are bit-identical, and reports timings plus
the projected cost of a full 48-candidate orientation sweep per lane.

    python benchmarks/bench_tracking.py [--grid 32] [--repeats 3]
"""

import argparse
import math
import time

import numpy as np

from dmriqc.dwi import (
    PhantomSpec,
    auto_mask,
    fit_tensor,
    generate_phantom,
    scalar_maps,
    seed_lattice,
)
from dmriqc.dwi.kernels import available_backends, get_track_all


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grid", type=int, default=32)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    spec = PhantomSpec(
        grid=(args.grid,) * 3, shells=((0.0, 1), (1000.0, 30)), geometry="u-arc"
    )
    ph = generate_phantom(spec)
    mask = auto_mask(ph.series)
    t0 = time.perf_counter()
    fit = fit_tensor(ph.series, mask)
    maps = scalar_maps(fit)
    fit_s = time.perf_counter() - t0
    seeds = seed_lattice(maps, ph.series.voxel_size)
    print(f"phantom {spec.grid}, {len(seeds)} seeds, fit+maps {fit_s * 1e3:.1f} ms")

    kernel_args = (
        maps.principal_dir,
        maps.fa,
        maps.mask.astype(np.uint8),
        seeds,
        ph.series.voxel_size,
        1.0,
        0.2,
        math.cos(math.radians(45.0)),
        10000,
    )

    results = {}
    timings = {}
    for backend in available_backends():
        track = get_track_all(backend)
        best = math.inf
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            out = track(*kernel_args)
            best = min(best, time.perf_counter() - t0)
        results[backend] = out
        timings[backend] = best
        steps = sum(len(s) for s in out)
        sweep = 48 * (fit_s + best)
        print(
            f"{backend:>7}: {best * 1e3:8.2f} ms/track call "
            f"({steps} points; projected 48-candidate sweep ~{sweep:.1f} s)"
        )

    if len(results) == 2:
        pairs = zip(results["cython"], results["python"])
        identical = all(np.array_equal(a, b) for a, b in pairs)
        print(f"lane outputs bit-identical: {identical}")
        print(f"speedup: {timings['python'] / timings['cython']:.1f}x")


if __name__ == "__main__":
    main()
