"""Compare the numba and pure-numpy hot kernels on realistic slicing loads.

Run: python3 benchmarks/bench_kernels.py [--tets N] [--samples K]

The same kernels back `tess4d bench`; setting TESS4D_NO_NUMBA=1 switches the
package default to the numpy path globally, while this script times both
explicitly.
"""
import argparse
import time

import numpy as np

from tess4d import _kernels
from tess4d.mesh4 import kuhn_pentatopes, unique_boundary_tets
from tess4d.slicer import get_tables


def make_load(n_tets):
    n = max(2, int(round((n_tets / 24) ** 0.25)))
    mesh = kuhn_pentatopes(n)
    tets, tags = unique_boundary_tets(mesh)
    return mesh.vertices, tets


def time_engine(engine, verts, tets, samples, seed=0):
    tables = get_tables()
    rng = np.random.default_rng(seed)
    # warm-up (numba JIT compilation happens here)
    _kernels.slice_tets_batch(verts, tets, np.array([0, 0, 0, 1.0]),
                              np.array([0, 0, 0, 0.5]), tables.case_edges,
                              tables.edge_endpoints, tables.shape_of_case,
                              engine=engine)
    _kernels.tet_measures(verts, tets, engine=engine)
    slice_times = []
    prims = 0
    for _ in range(samples):
        nvec = rng.normal(size=4)
        nvec /= np.linalg.norm(nvec)
        cvec = rng.random(4)
        t0 = time.perf_counter()
        sel, codes, pts, eids = _kernels.slice_tets_batch(
            verts, tets, nvec, cvec, tables.case_edges, tables.edge_endpoints,
            tables.shape_of_case, engine=engine)
        slice_times.append(time.perf_counter() - t0)
        prims += len(sel)
    t0 = time.perf_counter()
    _vols, total = _kernels.tet_measures(verts, tets, engine=engine)
    measure_time = time.perf_counter() - t0
    return np.median(slice_times), prims, measure_time, total


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--tets", type=int, default=500_000)
    ap.add_argument("--samples", type=int, default=20)
    args = ap.parse_args()

    verts, tets = make_load(args.tets)
    print(f"load: {len(tets)} tets, {len(verts)} vertices, "
          f"{args.samples} random hyperplanes per engine")
    print(f"{'engine':>8} {'slice ms (median)':>18} {'Mtet/s':>8} "
          f"{'measure ms':>11} {'volume total':>14}")
    results = {}
    for engine in _kernels.available_engines():
        med, prims, mt, total = time_engine(engine, verts, tets, args.samples)
        results[engine] = (med, total)
        print(f"{engine:>8} {1e3 * med:>18.2f} {len(tets) / med / 1e6:>8.1f} "
              f"{1e3 * mt:>11.2f} {total:>14.9f}")
    if len(results) == 2:
        speedup = results["numpy"][0] / results["numba"][0]
        print(f"numba speedup over numpy fallback: {speedup:.2f}x")
        assert abs(results["numba"][1] - results["numpy"][1]) < 1e-9


if __name__ == "__main__":
    main()
