"""Command-line driver: generate, verify, slice, pack and benchmark 4D meshes.

Exit codes: 0 success, 1 validation/build failure, 2 usage error, 3 I/O
error. Human-readable reports go to stderr; the convergence command writes
CSV to stdout. Every command is deterministic given its flags (and --seed).
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import __version__, _kernels
from .errors import Tess4dError
from .geometry import make_box, make_sphere_in_box, make_torus_in_box
from .mesh4 import (check_manifold, expected_volume, kuhn_pentatopes,
                    volume_report)
from .meshio import export_slice, read_mesh4, write_mesh4, write_pack4
from .slab import build_spacetime_mesh
from .slicer import Hyperplane, get_tables, slice_mesh

CASES = ("static-sphere", "expanding-sphere", "expanding-torus", "kuhn", "box")

DEFAULT_H = 0.03
DEFAULT_SLABS = 10


def _status(msg):
    print(msg, file=sys.stderr)


def make_case_geometry(args):
    if args.case == "static-sphere":
        return make_sphere_in_box(args.r0, args.r0, args.ell, args.t0, args.tf)
    if args.case == "expanding-sphere":
        return make_sphere_in_box(args.r0, args.rf, args.ell, args.t0, args.tf)
    if args.case == "expanding-torus":
        return make_torus_in_box(args.r0, args.R0, args.rf, args.Rf,
                                 args.ell, args.t0, args.tf)
    if args.case == "box":
        return make_box(args.ell, args.t0, args.tf)
    raise Tess4dError(f"case {args.case!r} has no geometry")


def default_caps(case: str) -> str:
    return "closed" if case in ("static-sphere", "expanding-sphere") else "open"


def _add_case_args(p, with_caps=True):
    p.add_argument("--case", choices=CASES, required=True)
    p.add_argument("--r0", type=float, default=0.1, help="initial (minor) radius")
    p.add_argument("--rf", type=float, default=0.125, help="final (minor) radius")
    p.add_argument("--R0", type=float, default=0.4, help="initial torus major radius")
    p.add_argument("--Rf", type=float, default=0.5, help="final torus major radius")
    p.add_argument("--ell", type=float, default=1.0, help="box side length")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--tf", type=float, default=1.0)
    p.add_argument("--n", type=int, default=None,
                   help="time slabs (geometry cases) or subdivisions (kuhn)")
    p.add_argument("--h", type=float, default=DEFAULT_H, help="target edge length")
    if with_caps:
        p.add_argument("--caps", choices=("closed", "open"), default=None,
                       help="close the mesh at t0/tf (default per case)")


def cmd_gen(args) -> int:
    t_start = time.perf_counter()
    if args.case == "kuhn":
        n = args.n if args.n is not None else 1
        mesh = kuhn_pentatopes(n)
        write_mesh4(args.out, mesh, binary=args.binary)
        _status(f"kuhn n={n}: {mesh.n_vertices} vertices, "
                f"{len(mesh.pentatopes)} pentatopes")
        _status(f"total time (sec.): {time.perf_counter() - t_start:.3f}")
        return 0
    caps = args.caps or default_caps(args.case)
    n = args.n if args.n is not None else DEFAULT_SLABS
    tick = time.perf_counter()
    geom = make_case_geometry(args)
    t_geom = time.perf_counter() - tick
    mesh, stats = build_spacetime_mesh(geom, n, args.h, caps=caps)
    write_mesh4(args.out, mesh, binary=args.binary)
    stats.timings["geometry construction"] = t_geom
    stats.timings["total time"] += t_geom
    _status(f"case {args.case} (caps={caps}, n={n}, h={args.h}):")
    _status(f"# tetrahedra: {stats.n_tets}")
    _status(f"# vertices: {mesh.n_vertices}")
    _status(f"# triangles (Edge surfaces): {stats.n_triangles}")
    _status(f"# segments (Node curves): {stats.n_segments}")
    _status(f"# Steiner vertices: {stats.n_steiner}")
    for line in stats.report_lines():
        _status(line)
    return 0


def cmd_verify(args) -> int:
    mesh = read_mesh4(args.infile)
    caps = args.caps or default_caps(args.case)
    mode = "closed" if caps == "closed" else "with-boundary"
    report = check_manifold(mesh, mode)
    _status(f"manifold ({mode}): {'pass' if report.passed else 'FAIL'} "
            f"({report.n_faces} faces, {report.n_boundary_faces} boundary)")
    if not report.passed:
        for face, what in report.offending_faces[:8]:
            _status(f"  offending face {face}: {what}")
    expected = expected_volume(args.case, caps, r0=args.r0, rf=args.rf,
                               R0=args.R0, Rf=args.Rf, ell=args.ell,
                               t0=args.t0, tf=args.tf)
    vrep = volume_report(mesh, expected)
    _status(str(vrep))
    ok = report.passed and vrep.rel_error <= args.tol
    _status("verify: " + ("PASS" if ok else "FAIL"))
    return 0 if ok else 1


def cmd_convergence(args) -> int:
    if args.levels < 2:
        raise Tess4dError("--levels must be >= 2")
    caps = args.caps or default_caps(args.case)
    geom = make_case_geometry(args)
    n = args.n if args.n is not None else DEFAULT_SLABS
    expected = expected_volume(args.case, caps, r0=args.r0, rf=args.rf,
                               R0=args.R0, Rf=args.Rf, ell=args.ell,
                               t0=args.t0, tf=args.tf)
    print("h,measured,expected,abs_error,observed_order")
    prev_err = None
    h = args.h0
    for _level in range(args.levels):
        mesh, _stats = build_spacetime_mesh(geom, n, h, caps=caps)
        from .mesh4 import total_volume
        v = total_volume(mesh)
        err = abs(v - expected)
        order = ""
        if prev_err is not None and err > 0:
            order = f"{np.log2(prev_err / err):.3f}"
        print(f"{h:.6g},{v:.12g},{expected:.12g},{err:.6g},{order}")
        sys.stdout.flush()
        prev_err = err
        h *= 0.5
    return 0


def _parse_plane(args) -> Hyperplane:
    if args.time is not None:
        if args.normal is not None or args.point is not None:
            raise Tess4dError("--time is exclusive with --normal/--point")
        return Hyperplane.time_slice(args.time)
    if args.normal is None or args.point is None:
        raise Tess4dError("need either --time or both --normal and --point")
    n = np.array([float(x) for x in args.normal.split(",")])
    c = np.array([float(x) for x in args.point.split(",")])
    if n.shape != (4,) or c.shape != (4,):
        raise Tess4dError("--normal and --point take 4 comma-separated values")
    return Hyperplane(n, c)


def cmd_slice(args) -> int:
    mesh = read_mesh4(args.infile)
    plane = _parse_plane(args)
    result = slice_mesh(mesh, plane)
    export_slice(args.out, result)
    _status(f"slice: {result.n_triangles} triangles, {result.n_segments} segments "
            f"({int(result.case_counts.sum())} sliced tets)")
    return 0


def cmd_bench(args) -> int:
    mesh = read_mesh4(args.infile)
    rng = np.random.default_rng(args.seed)
    lo = mesh.vertices.min(axis=0) if mesh.n_vertices else np.zeros(4)
    hi = mesh.vertices.max(axis=0) if mesh.n_vertices else np.ones(4)
    engine = args.engine or _kernels.active_engine()
    tables = get_tables()
    times = []
    prims = 0
    for _ in range(args.samples):
        n = rng.normal(size=4)
        while np.linalg.norm(n) == 0:
            n = rng.normal(size=4)
        n /= np.linalg.norm(n)
        c = lo + rng.random(4) * (hi - lo)
        tick = time.perf_counter()
        result = slice_mesh(mesh, Hyperplane(n, c), tables=tables, engine=engine)
        times.append(time.perf_counter() - tick)
        prims += result.n_primitives
    times = np.asarray(times)
    total = times.sum()
    _status(f"bench: engine={engine} samples={args.samples} seed={args.seed}")
    _status(f"elements per slice: {len(mesh.tets)} tets + "
            f"{5 * len(mesh.pentatopes)} pentatope-expanded tets")
    _status(f"mean slice time (ms): {1e3 * times.mean():.3f}")
    _status(f"median slice time (ms): {1e3 * np.median(times):.3f}")
    _status(f"primitives: {prims} total, "
            f"{prims / total if total > 0 else 0.0:.0f} per second")
    return 0


def cmd_pack(args) -> int:
    mesh = read_mesh4(args.infile)
    write_pack4(args.out, mesh)
    _status(f"packed {args.infile} -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tess4d",
                                 description="Spacetime tessellation and 4D slicing")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a spacetime mesh")
    _add_case_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--binary", action="store_true", help="write the binary form")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("verify", help="manifold + volume verification")
    p.add_argument("--in", dest="infile", required=True)
    _add_case_args(p)
    p.add_argument("--tol", type=float, default=0.05,
                   help="relative volume error gate")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("convergence", help="volume error vs h (CSV on stdout)")
    _add_case_args(p)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--h0", type=float, default=0.1)
    p.set_defaults(fn=cmd_convergence)

    p = sub.add_parser("slice", help="hyperplane slice to a 3D surface file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--time", type=float, default=None)
    p.add_argument("--normal", default=None, help="nx,ny,nz,nt")
    p.add_argument("--point", default=None, help="cx,cy,cz,ct")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_slice)

    p = sub.add_parser("bench", help="CPU slicing throughput")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--engine", choices=("numba", "numpy"), default=None)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("pack", help="convert a mesh4 file to pack4")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_pack)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except Tess4dError as exc:
        _status(f"error: {exc}")
        return 1
    except OSError as exc:
        _status(f"i/o error: {exc}")
        return 3


if __name__ == "__main__":
    sys.exit(main())
