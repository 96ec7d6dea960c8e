"""Compare the compiled solver kernel against the numpy fallback.

Usage: python benchmarks/bench_solve.py [--repeats N]

Times the full MAP solve at the working resolution and at larger grids,
checks that the two backends agree, and prints a speedup table.
"""

import argparse
import time

import numpy as np

from sizedepth.annotation import PatchGrid, SizeAnnotation, targets_from_annotations
from sizedepth.crf import CrfConfig, available_backends, build_similarity, solve_map
from sizedepth.raster import raster_from_array

SIZES = [(63, 84), (126, 168), (252, 336)]


def make_instance(height, width, seed=0):
    rng = np.random.default_rng(seed)
    raster = raster_from_array(rng.uniform(0, 1, size=(height, width, 3)))
    grid = PatchGrid(rows=7, cols=7, image_width=width, image_height=height)
    anns = [
        SizeAnnotation(r, c, float(rng.uniform(0.5, 5.0)), pixel_extent=1.0)
        for r in range(7)
        for c in range(7)
    ]
    return raster, targets_from_annotations(grid, anns)


def bench(backend, raster, targets, graph, config, repeats):
    best = float("inf")
    field = None
    for _ in range(repeats):
        start = time.perf_counter()
        field = solve_map(raster, targets, config, backend=backend, graph=graph)
        best = min(best, time.perf_counter() - start)
    return best, field


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    print(f"available backends: {', '.join(backends)}")
    if len(backends) < 2:
        print("compiled kernel not built; run pip install -e . --no-build-isolation")

    config = CrfConfig(lam=1.0, beta=10.0, tol=1e-8)
    header = f"{'grid':>10} {'pixels':>8}" + "".join(f" {b:>12}" for b in backends)
    if len(backends) == 2:
        header += f" {'speedup':>9} {'max diff':>10}"
    print(header)
    for height, width in SIZES:
        raster, targets = make_instance(height, width)
        graph = build_similarity(raster, config.beta)
        times, fields = {}, {}
        for backend in backends:
            times[backend], fields[backend] = bench(
                backend, raster, targets, graph, config, args.repeats
            )
        row = f"{f'{height}x{width}':>10} {height * width:>8}"
        for backend in backends:
            row += f" {times[backend] * 1e3:>10.2f}ms"
        if len(backends) == 2:
            diff = float(np.abs(fields["cython"].y - fields["numpy"].y).max())
            row += f" {times['numpy'] / times['cython']:>8.1f}x {diff:>10.1e}"
        print(row)


if __name__ == "__main__":
    main()
