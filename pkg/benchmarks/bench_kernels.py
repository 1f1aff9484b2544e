#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--sides 160 320] [--repeats 5]
"""

import argparse
import time

import numpy as np

from gridspect import kernels
from gridspect.evalharness import ClutterSpec, inject_clutter
from gridspect.grid_map import BinaryMap, pad_to_square
from gridspect.spectral import dft2
from gridspect.synthmaps import draw_wall


def make_map(side: int) -> BinaryMap:
    bits = np.zeros((side, side), dtype=bool)
    m = side // 16
    draw_wall(bits, (m, m), (side - m, m))
    draw_wall(bits, (side - m, m), (side - m, side - m))
    draw_wall(bits, (side - m, side - m), (m, side - m))
    draw_wall(bits, (m, side - m), (m, m))
    draw_wall(bits, (m, side // 2), (side - m, side // 2))
    base = BinaryMap(width=side, height=side, bits=bits)
    return inject_clutter(base, ClutterSpec("random", 60, 7, seed=0)).bits


def timeit(fn, repeats: int) -> float:
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_unfold(backend, side: int, repeats: int) -> float:
    m, _ = pad_to_square(make_map(side))
    amp = np.ascontiguousarray(dft2(m).amplitude)
    angle_bins = 720
    phis = np.arange(angle_bins) * (2 * np.pi / angle_bins)
    radii = np.arange(1, side // 2, dtype=np.float64)
    c = float(side // 2)
    args = (amp, c, c, np.cos(phis), np.sin(phis), radii)
    return timeit(lambda: backend.unfold_amplitude(*args), repeats)


def bench_hough(backend, side: int, repeats: int) -> float:
    m = make_map(side)
    ys, xs = np.nonzero(m.bits)
    order = np.random.default_rng(0).permutation(ys.size)
    thetas = np.arange(180, dtype=np.float64) * np.radians(1.0)
    n_rho = 2 * int(np.ceil(np.hypot(side, side))) + 1
    args = (
        np.ascontiguousarray(m.bits.astype(np.uint8)),
        np.ascontiguousarray(ys[order].astype(np.int64)),
        np.ascontiguousarray(xs[order].astype(np.int64)),
        np.cos(thetas),
        np.sin(thetas),
        -np.sin(thetas),
        np.cos(thetas),
        float(n_rho // 2) + 0.5,
        n_rho,
        20,
        100,
        3,
    )
    return timeit(lambda: backend.hough_segments(*args), repeats)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sides", type=int, nargs="+", default=[160, 320])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    pure = kernels.get_backend("pure")
    compiled = kernels.get_backend("compiled")
    if compiled is None:
        print("compiled backend not available; showing pure timings only")

    print(f"{'kernel':<10} {'side':>5} {'pure ms':>10} {'compiled ms':>12} {'speedup':>8}")
    for side in args.sides:
        for name, bench in (("unfold", bench_unfold), ("hough", bench_hough)):
            t_pure = bench(pure, side, args.repeats) * 1e3
            if compiled is not None:
                t_comp = bench(compiled, side, args.repeats) * 1e3
                print(
                    f"{name:<10} {side:>5} {t_pure:>10.2f} {t_comp:>12.2f} "
                    f"{t_pure / t_comp:>7.1f}x"
                )
            else:
                print(f"{name:<10} {side:>5} {t_pure:>10.2f} {'-':>12} {'-':>8}")


if __name__ == "__main__":
    main()
