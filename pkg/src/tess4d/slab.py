"""Assemble the 4D spacetime mesh from per-time-step surface tessellations.

Within a slab [t_k, t_k+1] every Node traces a segment, every Edge traces a
surface triangulated in its (s, t) rectangle, and every Face traces a volume
meshed in its (u, v, t) box: a 3D Delaunay tetrahedralization of the fixed
boundary vertices (bottom/top Face triangulations plus the four Edge sheets
mapped through the edge-to-face parameter maps) and one interior Steiner
vertex at the domain centroid, so exactly one vertex per Face per slab is
added between time steps. The Steiner vertex is embedded in 4D as the
equally weighted average of the Face evaluations at the two slab times.

Caps close the mesh at the extreme times for the sphere-in-box geometry:
its box tessellation mirrors the sphere grids radially, so the cap volume
decomposes into radial prisms, each split into three tets with quad
diagonals chosen toward the smallest global vertex index (adjacent prisms
then conform).
"""
from __future__ import annotations

import time as _time
from dataclasses import dataclass, field

import numpy as np

from .errors import ConformityError, InputError, OrientationError, UnsupportedCapError
from .geometry import Geometry
from .mesh4 import SpacetimeMesh
from .tessellate import SurfaceTessellation, tessellate, uv_on_face

__all__ = [
    "TAG_CAP_INITIAL", "TAG_CAP_FINAL", "Slab", "EdgeSheet", "BuildStats",
    "connect_node", "connect_edge", "connect_face", "build_caps",
    "build_spacetime_mesh",
]

TAG_CAP_INITIAL = 1_000_000
TAG_CAP_FINAL = 1_000_001


@dataclass
class Slab:
    k: int
    t_lo: float
    t_hi: float
    bottom: SurfaceTessellation
    top: SurfaceTessellation
    offset_lo: int
    offset_hi: int

    def __post_init__(self):
        if not (self.t_lo < self.t_hi):
            raise InputError("slab requires t_lo < t_hi")
        if self.bottom.time != self.t_lo or self.top.time != self.t_hi:
            raise InputError("slab tessellation times do not match the slab bounds")


@dataclass
class EdgeSheet:
    """Conforming triangulation of one Edge's (s, t) rectangle over one slab."""

    edge_id: int
    vertex_ids: np.ndarray      # (K,) global vertex ids
    s: np.ndarray               # (K,) edge parameters
    t: np.ndarray               # (K,) times
    triangles: np.ndarray       # (M, 3) local indices into the arrays above

    def global_triangles(self) -> np.ndarray:
        return self.vertex_ids[self.triangles]


def connect_node(node_id: int, slab: Slab) -> np.ndarray:
    """4D segment tracing a Node across the slab."""
    lo = slab.offset_lo + slab.bottom.node_vertex[node_id]
    hi = slab.offset_hi + slab.top.node_vertex[node_id]
    return np.array([lo, hi], dtype=np.int64)


def connect_edge(geom: Geometry, edge_id: int, slab: Slab) -> EdgeSheet:
    """Triangulate the (s, t) rectangle bounded by the two Edge polylines.

    The boundary is the bottom polyline at t_lo, the Node segment at s max,
    the reversed top polyline at t_hi and the Node segment at s min; no
    interior points are added, and any recovery Steiner point is fatal here.
    """
    from .triangulate import PlanarDomain, triangulate_conforming

    s0, s1 = geom.edge_range(edge_id)
    bot_ids = slab.bottom.edge_polylines[edge_id] + slab.offset_lo
    top_ids = slab.top.edge_polylines[edge_id] + slab.offset_hi
    bot_s = _edge_polyline_params(geom, slab.bottom, edge_id)
    top_s = _edge_polyline_params(geom, slab.top, edge_id)

    ids = np.concatenate([bot_ids, top_ids[::-1]])
    pts = np.concatenate([
        np.stack([bot_s, np.full_like(bot_s, slab.t_lo)], axis=1),
        np.stack([top_s[::-1], np.full_like(top_s, slab.t_hi)], axis=1),
    ])
    domain = PlanarDomain.create((s0, s1, slab.t_lo, slab.t_hi), pts, ids)
    tri = triangulate_conforming(domain)
    if tri.steiner.any():
        raise ConformityError(
            f"edge {edge_id} slab {slab.k}: triangulation required Steiner points")
    return EdgeSheet(edge_id, tri.point_ids, tri.points[:, 0], tri.points[:, 1],
                     tri.triangles)


def _edge_polyline_params(geom, tess, edge_id):
    pl = tess.edge_polylines[edge_id]
    s0, s1 = geom.edge_range(edge_id)
    svals = tess.params[pl, 0].copy()
    svals[0], svals[-1] = s0, s1       # node vertices carry no edge parameter
    return svals


def _face_uv_table(geom, tess, fid, vids):
    """(u, v) rows for tessellation-local vertex ids on face fid."""
    out = np.empty((len(vids), 2))
    for row, vid in enumerate(vids):
        out[row] = uv_on_face(geom, tess, int(vid), fid)
    return out


def connect_face(geom: Geometry, face_id: int, slab: Slab, sheets: dict,
                 apex_id: int):
    """Tetrahedralize the (u, v, t) box of a Face-slab over its fixed boundary.

    The box boundary is fully prescribed: the bottom and top Face
    triangulations and the four Edge sheets. The interior is filled by a 3D
    Delaunay tetrahedralization of exactly those boundary vertices plus the
    single Steiner apex at the domain centroid. Because every prescribed
    facet triangulation is the unique 2D Delaunay of its points (the
    tessellator jitters interior samples to guarantee this), the hull
    facets of the Delaunay volume reproduce them; this is verified and a
    mismatch raises ConformityError. Tets come out positively oriented in
    (u, v, t) and parameter-locally small, so the embedded 3-measure
    converges to the traced volume at second order.

    Returns (tets, uvt_volume); the volume equals the box volume exactly
    up to roundoff since the Delaunay fills the convex box.
    """
    from .delaunay3 import delaunay_in_box

    umin, umax, vmin, vmax = geom.face_range(face_id)
    coords = {}       # global id -> (u, v, t)
    prescribed = set()

    def record(ids, uv, t):
        for g, (u, v), tv in zip(ids, uv, np.broadcast_to(t, (len(ids),))):
            coords[int(g)] = (float(u), float(v), float(tv))

    bot = slab.bottom.face_triangles[face_id] + slab.offset_lo
    bot_vids = np.unique(slab.bottom.face_triangles[face_id])
    record(bot_vids + slab.offset_lo,
           _face_uv_table(geom, slab.bottom, face_id, bot_vids), slab.t_lo)
    top = slab.top.face_triangles[face_id] + slab.offset_hi
    top_vids = np.unique(slab.top.face_triangles[face_id])
    record(top_vids + slab.offset_hi,
           _face_uv_table(geom, slab.top, face_id, top_vids), slab.t_hi)
    prescribed.update(tuple(sorted(tr)) for tr in bot.tolist())
    prescribed.update(tuple(sorted(tr)) for tr in top.tolist())

    for eid, _fwd in geom.face_loop(face_id):
        sheet = sheets[eid]
        _caxis, _cval, _a, b = geom.edge_uv_map(eid, face_id)
        if abs(b) != 1.0:
            raise ConformityError(
                f"edge {eid} on face {face_id}: non-isometric parameter map "
                "(sheet Delaunay would not match the wall facet)")
        uv = geom.edge_uv(eid, face_id, sheet.s)
        record(sheet.vertex_ids, uv, sheet.t)
        prescribed.update(tuple(sorted(tr)) for tr in sheet.global_triangles().tolist())

    # Box corners: the Face's four corner Nodes at both slab times, indexed
    # bit-wise by (u-max, v-max, t-hi).
    corner_global = [None] * 8
    corner_nodes = set()
    for eid, _fwd in geom.face_loop(face_id):
        corner_nodes.update(geom.edge_nodes(eid))
    for nid in corner_nodes:
        u, v = geom.node_uv(nid, face_id)
        bu = 1 if u == umax else 0
        bv = 1 if v == vmax else 0
        corner_global[(bu << 2) | (bv << 1) | 0] = slab.offset_lo + slab.bottom.node_vertex[nid]
        corner_global[(bu << 2) | (bv << 1) | 1] = slab.offset_hi + slab.top.node_vertex[nid]
    if any(c is None for c in corner_global):
        raise ConformityError(f"face {face_id}: could not identify the 8 box corners")

    gids = np.array(sorted(coords), dtype=np.int64)
    lut = {int(g): i for i, g in enumerate(gids)}
    pts = np.empty((len(gids) + 1, 3))
    for i, g in enumerate(gids):
        pts[i] = coords[int(g)]
    pts[-1] = (0.5 * (umin + umax), 0.5 * (vmin + vmax), 0.5 * (slab.t_lo + slab.t_hi))
    local_to_global = np.append(gids, apex_id)

    # Interleave bottom and top points (both come grid-ordered) so insertion
    # cavities stay small; the Delaunay result is order-independent.
    n = len(gids)
    split = int(np.searchsorted(gids, slab.offset_hi))
    n_hi = n - split
    i = np.arange(n, dtype=np.int64)
    take_hi = ((i + 1) * n_hi) // n - (i * n_hi) // n >= 1
    order = np.empty(n, dtype=np.int64)
    order[take_hi] = split + np.arange(n_hi)
    order[~take_hi] = np.arange(split)
    order = np.append(order, n)              # apex last

    tets_local, hull = delaunay_in_box(pts, [lut[int(c)] for c in corner_global],
                                       insert_order=order)

    hull_set = {tuple(sorted(int(local_to_global[v]) for v in f)) for f in hull}
    if hull_set != prescribed:
        raise ConformityError(
            f"face {face_id} slab {slab.k}: volume hull does not match the "
            f"prescribed boundary ({len(hull_set ^ prescribed)} differing facets)")

    vols = np.linalg.det(pts[tets_local[:, 1:]] - pts[tets_local[:, :1]]) / 6.0
    if np.any(vols <= 0.0):
        raise OrientationError(
            f"face {face_id} slab {slab.k}: non-positive tet in (u,v,t)")
    return local_to_global[tets_local], float(vols.sum())


def build_caps(geom: Geometry, tess: SurfaceTessellation, offset: int, which: str):
    """Prismatic cap tets between the sphere and its radial box projection.

    Returns (tets, cap_volume). Tets at the initial time are stored with
    reversed vertex order so both caps orient the closed 3-manifold
    consistently with the lateral slabs.
    """
    if not geom.prismatic or tess.mirror_vertex is None:
        raise UnsupportedCapError(
            "caps require the prismatic sphere-in-box geometry (torus runs open)")
    if which not in ("initial", "final"):
        raise InputError(f"which must be 'initial' or 'final', got {which!r}")

    mirror = tess.mirror_vertex
    xyz = tess.coords
    sphere_faces = sorted(geom.mirror_face)
    tets_out = []
    for fid in sphere_faces:
        for tri in tess.face_triangles[fid]:
            a, b, c = (int(v) for v in tri)
            A, B, C = int(mirror[a]), int(mirror[b]), int(mirror[c])
            faces = [(a, c, b), (A, B, C)]
            for u, v in ((a, b), (b, c), (c, a)):
                U, V = int(mirror[u]), int(mirror[v])
                # Outward quad cycle (u, v, V, U); diagonal through its min id.
                if min(u, v, V, U) in (u, V):
                    faces.append((u, v, V))
                    faces.append((u, V, U))
                else:
                    faces.append((u, v, U))
                    faces.append((v, V, U))
            m = min(a, b, c, A, B, C)
            for f in faces:
                if m in f:
                    continue
                q = xyz[list(f)] - xyz[m]
                if np.linalg.det(q) <= 0.0:
                    raise OrientationError(f"cap prism produced a non-positive tet at face {fid}")
                tets_out.append((m, *f))

    tets = np.asarray(tets_out, dtype=np.int64) + offset
    vols = np.linalg.det(xyz[tets - offset][:, 1:] - xyz[tets - offset][:, :1]) / 6.0
    if which == "initial":
        tets = tets[:, [0, 1, 3, 2]]
    return tets, float(vols.sum())


@dataclass
class BuildStats:
    timings: dict = field(default_factory=dict)
    n_tessellation_vertices: int = 0
    n_steiner: int = 0
    n_tets: int = 0
    n_triangles: int = 0
    n_segments: int = 0
    uvt_volume_error: float = 0.0

    def report_lines(self):
        order = ["geometry construction", "geometry tessellation",
                 "edge triangulation", "face tetrahedralization",
                 "initial/final tetrahedralization", "total time"]
        return [f"{name} (sec.): {self.timings[name]:.3f}"
                for name in order if name in self.timings]


def build_spacetime_mesh(geom: Geometry, n_slabs: int, h: float, caps: str = "closed"):
    """Trace the whole geometry over [t0, tf] into one conforming 4D mesh.

    Tessellates the geometry at n_slabs+1 uniformly spaced times (each
    tessellation is shared by the slabs on either side), connects Nodes,
    Edges and Faces per slab, and appends prismatic caps when caps="closed"
    (sphere-in-box only). Returns (SpacetimeMesh, BuildStats).
    """
    if n_slabs < 1:
        raise InputError("n_slabs must be >= 1")
    if caps not in ("closed", "open"):
        raise InputError(f"caps must be 'closed' or 'open', got {caps!r}")
    if caps == "closed" and not geom.prismatic:
        raise UnsupportedCapError(
            f"geometry {geom.name!r} supports open mode only (no cap construction)")

    stats = BuildStats()
    t_start = _time.perf_counter()

    times = np.linspace(geom.t0, geom.tf, n_slabs + 1)
    tick = _time.perf_counter()
    tessellations = [tessellate(geom, float(t), h) for t in times]
    stats.timings["geometry tessellation"] = _time.perf_counter() - tick

    offsets = np.concatenate([[0], np.cumsum([te.n_vertices for te in tessellations])])
    n_tess_vertices = int(offsets[-1])

    verts4 = np.empty((n_tess_vertices, 4))
    for k, te in enumerate(tessellations):
        verts4[offsets[k]:offsets[k + 1], :3] = te.coords
        verts4[offsets[k]:offsets[k + 1], 3] = times[k]

    slabs = [Slab(k, float(times[k]), float(times[k + 1]),
                  tessellations[k], tessellations[k + 1],
                  int(offsets[k]), int(offsets[k + 1]))
             for k in range(n_slabs)]

    segments, seg_tags = [], []
    for slab in slabs:
        for nid in range(geom.n_nodes):
            segments.append(connect_node(nid, slab))
            seg_tags.append(nid)

    tick = _time.perf_counter()
    sheets_per_slab = []
    triangles, tri_tags = [], []
    for slab in slabs:
        sheets = {}
        for eid in range(geom.n_edges):
            sheet = connect_edge(geom, eid, slab)
            sheets[eid] = sheet
            triangles.append(sheet.global_triangles())
            tri_tags.append(np.full(len(sheet.triangles), eid, dtype=np.int64))
        sheets_per_slab.append(sheets)
    stats.timings["edge triangulation"] = _time.perf_counter() - tick

    # Steiner apexes: one per (slab, face), appended after all tessellation
    # vertices in (slab, face) order; 4D embedding is the equally weighted
    # average of the Face evaluation at the two slab times.
    steiner4 = []
    apex_ids = {}
    for slab in slabs:
        for fid in range(geom.n_faces):
            umin, umax, vmin, vmax = geom.face_range(fid)
            uc, vc = 0.5 * (umin + umax), 0.5 * (vmin + vmax)
            w = 0.5
            p_lo = geom.eval_face(fid, uc, vc, slab.t_lo)[0]
            p_hi = geom.eval_face(fid, uc, vc, slab.t_hi)[0]
            spatial = (1.0 - w) * p_lo + w * p_hi
            t4 = (1.0 - w) * slab.t_lo + w * slab.t_hi
            apex_ids[(slab.k, fid)] = n_tess_vertices + len(steiner4)
            steiner4.append(np.concatenate([spatial, [t4]]))

    tick = _time.perf_counter()
    tets, tet_tags = [], []
    uvt_err = 0.0
    for slab in slabs:
        for fid in range(geom.n_faces):
            t_f, uvt_vol = connect_face(geom, fid, slab, sheets_per_slab[slab.k],
                                        apex_ids[(slab.k, fid)])
            tets.append(t_f)
            tet_tags.append(np.full(len(t_f), fid, dtype=np.int64))
            umin, umax, vmin, vmax = geom.face_range(fid)
            box_vol = (umax - umin) * (vmax - vmin) * (slab.t_hi - slab.t_lo)
            uvt_err = max(uvt_err, abs(uvt_vol - box_vol) / box_vol)
    stats.timings["face tetrahedralization"] = _time.perf_counter() - tick
    stats.uvt_volume_error = uvt_err

    tick = _time.perf_counter()
    if caps == "closed":
        cap0, _v0 = build_caps(geom, tessellations[0], 0, "initial")
        capf, _vf = build_caps(geom, tessellations[-1], int(offsets[-2]), "final")
        tets.append(cap0)
        tet_tags.append(np.full(len(cap0), TAG_CAP_INITIAL, dtype=np.int64))
        tets.append(capf)
        tet_tags.append(np.full(len(capf), TAG_CAP_FINAL, dtype=np.int64))
    stats.timings["initial/final tetrahedralization"] = _time.perf_counter() - tick

    if steiner4:
        verts4 = np.vstack([verts4, np.asarray(steiner4)])
    steiner_flags = np.zeros(len(verts4), dtype=bool)
    steiner_flags[n_tess_vertices:] = True

    mesh = SpacetimeMesh(
        vertices=verts4,
        tets=np.vstack(tets),
        tet_tags=np.concatenate(tet_tags),
        triangles=np.vstack(triangles),
        tri_tags=np.concatenate(tri_tags),
        segments=np.asarray(segments, dtype=np.int64),
        seg_tags=np.asarray(seg_tags, dtype=np.int64),
        steiner=steiner_flags,
    ).validate()

    stats.n_tessellation_vertices = n_tess_vertices
    stats.n_steiner = len(steiner4)
    stats.n_tets = len(mesh.tets)
    stats.n_triangles = len(mesh.triangles)
    stats.n_segments = len(mesh.segments)
    stats.timings["total time"] = _time.perf_counter() - t_start
    return mesh, stats
