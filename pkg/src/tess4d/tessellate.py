"""Watertight surface triangulation of a geometry at a fixed time.

Edges are subdivided uniformly in arclength (composite Gauss-Legendre
quadrature of the analytic speed, inverted by bisection); each Face is
triangulated on its parameter rectangle with the fixed boundary polylines
plus a structured interior grid sized from the physical lengths of the
domain mid iso-lines. Vertex identity is (owning entity, sample index), so
deduplication across Faces, Edges and Nodes is exact by construction.

Interior grid points and edge samples carry a deterministic sub-resolution
jitter (hashed from the owning entity, sample index and time) that breaks
the cocircular ties of structured grids: every Face triangulation and Edge
sheet is then the unique Delaunay triangulation of its points, which the
slab builder relies on to match the hull facets of its per-slab 3D
Delaunay volumes exactly.

For the sphere-in-box geometry the box tessellation mirrors the sphere
patch grids through the radial projection onto the box, which makes the
initial/final cap volumes prismatic (see the slab builder).
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ConformityError, InputError
from .geometry import EntityKind, Geometry
from .triangulate import PlanarDomain, triangulate_conforming

__all__ = ["SurfaceTessellation", "tessellate", "euler_characteristic"]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_PANELS = 64
_JITTER = 1e-6
_MASK64 = (1 << 64) - 1


def _mix64(*keys) -> int:
    """splitmix64-style deterministic hash of integer keys."""
    x = 0x243F6A8885A308D3
    for k in keys:
        x = (x + (int(k) & _MASK64)) & _MASK64
        x ^= x >> 30
        x = (x * 0xBF58476D1CE4E5B9) & _MASK64
        x ^= x >> 27
        x = (x * 0x94D049BB133111EB) & _MASK64
        x ^= x >> 31
    return x


def _t_key(t: float) -> int:
    return int.from_bytes(struct.pack("<d", t), "little")


def _jitter_unit(*keys) -> float:
    """Deterministic value in (-1, 1)."""
    return _mix64(*keys) / float(1 << 63) - 1.0


@dataclass
class SurfaceTessellation:
    """Triangulation of the whole geometry at one time step.

    coords[i] is eval(owner_kind[i]/owner_index[i], params[i], time) by
    construction. Edge polylines are ordered by increasing edge parameter;
    face triangles are CCW in the face's (u, v) domain.
    """

    time: float
    target_h: float
    coords: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    owner_kind: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int8))
    owner_index: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int32))
    params: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    node_vertex: dict = field(default_factory=dict)
    edge_polylines: dict = field(default_factory=dict)
    face_triangles: dict = field(default_factory=dict)
    mirror_vertex: np.ndarray | None = None

    @property
    def n_vertices(self) -> int:
        return len(self.coords)

    def n_triangles(self) -> int:
        return sum(len(t) for t in self.face_triangles.values())


def _quad_panels(speed, s0, s1, panels=_PANELS):
    """Per-panel arclengths of `speed` over [s0, s1] and the panel edges."""
    edges = np.linspace(s0, s1, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
    sp = speed(nodes.ravel()).reshape(panels, len(_GL_X))
    return edges, (sp * _GL_W[None, :]).sum(axis=1) * half


def _arclength(speed, s0, s1):
    return float(_quad_panels(speed, s0, s1)[1].sum())


def _invert_arclength(speed, s0, s1, targets):
    """s values where the cumulative arclength reaches each target."""
    edges, panel_len = _quad_panels(speed, s0, s1)
    cum = np.concatenate([[0.0], np.cumsum(panel_len)])

    def cumlen(s):
        p = np.clip(np.searchsorted(edges, s, side="right") - 1, 0, _PANELS - 1)
        a = edges[p]
        mid = 0.5 * (a + s)
        half = 0.5 * (s - a)
        nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
        sp = speed(nodes.ravel()).reshape(len(s), len(_GL_X))
        return cum[p] + (sp * _GL_W[None, :]).sum(axis=1) * half

    targets = np.asarray(targets, dtype=float)
    lo = np.full(targets.shape, float(s0))
    hi = np.full(targets.shape, float(s1))
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        below = cumlen(mid) < targets
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def _segment_count(length: float, h: float, minimum: int = 1) -> int:
    return max(minimum, int(np.floor(length / h + 0.5)))


class _TessBuilder:
    def __init__(self, geom: Geometry, t: float, h: float):
        self.geom = geom
        self.t = t
        self.h = h
        self.coords: list = []
        self.owner_kind: list = []
        self.owner_index: list = []
        self.params: list = []
        self.node_vertex: dict = {}
        self.edge_polylines: dict = {}
        self.edge_params: dict = {}
        self.face_triangles: dict = {}
        self.face_interior: dict = {}

    def _add_vertex(self, coord, kind, index, param) -> int:
        self.coords.append(np.asarray(coord, dtype=float))
        self.owner_kind.append(int(kind))
        self.owner_index.append(index)
        self.params.append(param)
        return len(self.coords) - 1

    def add_node(self, nid):
        p = self.geom.eval_node(nid, self.t)
        self.node_vertex[nid] = self._add_vertex(p, EntityKind.NODE, nid, (np.nan, np.nan))

    def add_edge(self, eid):
        geom, t = self.geom, self.t
        s0, s1 = geom.edge_range(eid)
        speed = lambda s: geom.edge_speed(eid, s, t)
        length = _arclength(speed, s0, s1)
        # At least two segments so every Edge sheet has interior (jittered)
        # samples; required for unique per-facet Delaunay triangulations.
        m = _segment_count(length, self.h, minimum=2)
        targets = length * np.arange(1, m) / m
        s_int = _invert_arclength(speed, s0, s1, targets)
        tkey = _t_key(t)
        spacing = (s1 - s0) / m
        s_int = s_int + _JITTER * spacing * np.array(
            [_jitter_unit(1, eid, i, tkey) for i in range(m - 1)])
        pts = geom.eval_edge(eid, s_int, t)
        n0, n1 = geom.edge_nodes(eid)
        ids = [self.node_vertex[n0]]
        for s, p in zip(s_int, pts):
            ids.append(self._add_vertex(p, EntityKind.EDGE, eid, (float(s), np.nan)))
        ids.append(self.node_vertex[n1])
        self.edge_polylines[eid] = np.asarray(ids, dtype=np.int64)
        self.edge_params[eid] = np.concatenate([[s0], s_int, [s1]])

    def _face_boundary(self, fid):
        """CCW boundary polyline of the face domain: vertex ids and (u, v)."""
        geom = self.geom
        ids: list = []
        uvs: list = []
        for eid, forward in geom.face_loop(fid):
            pl = self.edge_polylines[eid]
            sv = self.edge_params[eid]
            if not forward:
                pl = pl[::-1]
                sv = sv[::-1]
            uv = geom.edge_uv(eid, fid, sv)
            ids.extend(pl[:-1].tolist())
            uvs.extend(uv[:-1])
        return np.asarray(ids, dtype=np.int64), np.asarray(uvs)

    def add_face(self, fid):
        geom, t = self.geom, self.t
        umin, umax, vmin, vmax = geom.face_range(fid)
        umid, vmid = 0.5 * (umin + umax), 0.5 * (vmin + vmax)
        len_u = _arclength(lambda s: geom.face_iso_speed(fid, 0, vmid, s, t), umin, umax)
        len_v = _arclength(lambda s: geom.face_iso_speed(fid, 1, umid, s, t), vmin, vmax)
        nu = _segment_count(len_u, self.h)
        nv = _segment_count(len_v, self.h)
        gu = umin + (umax - umin) * np.arange(1, nu) / nu
        gv = vmin + (vmax - vmin) * np.arange(1, nv) / nv
        uu, vv = np.meshgrid(gu, gv, indexing="ij")
        interior_uv = np.stack([uu.ravel(), vv.ravel()], axis=1)
        if len(interior_uv):
            tkey = _t_key(t)
            du = _JITTER * (umax - umin) / nu
            dv = _JITTER * (vmax - vmin) / nv
            jit = np.array([[_jitter_unit(2, fid, i, 0, tkey),
                             _jitter_unit(2, fid, i, 1, tkey)]
                            for i in range(len(interior_uv))])
            interior_uv = interior_uv + jit * [du, dv]
        pts = geom.eval_face(fid, interior_uv[:, 0], interior_uv[:, 1], t)
        interior_ids = [self._add_vertex(p, EntityKind.FACE, fid, tuple(uv))
                        for p, uv in zip(pts, interior_uv)]
        self.face_interior[fid] = (np.asarray(interior_ids, dtype=np.int64), interior_uv)

        b_ids, b_uv = self._face_boundary(fid)
        domain = PlanarDomain.create((umin, umax, vmin, vmax), b_uv, b_ids,
                                     interior_uv, interior_ids)
        tri = triangulate_conforming(domain)
        if tri.steiner.any():
            raise ConformityError(f"face {fid} triangulation produced Steiner points")
        self.face_triangles[fid] = tri.point_ids[tri.triangles].astype(np.int64)

    # -- prismatic mirroring ---------------------------------------------------

    def mirror_box(self):
        geom, t = self.geom, self.t
        half = geom.length_scale / 2.0
        mirror_of: dict[int, int] = {}

        for nid, box_nid in geom.mirror_node.items():
            p = geom.eval_node(box_nid, t)
            vid = self._add_vertex(p, EntityKind.NODE, box_nid, (np.nan, np.nan))
            self.node_vertex[box_nid] = vid
            mirror_of[self.node_vertex[nid]] = vid

        for eid, box_eid in geom.mirror_edge.items():
            sv = self.edge_params[eid]
            s_box = half * (1.0 + sv)
            pl = self.edge_polylines[eid]
            ids = [mirror_of[pl[0]]]
            pts = geom.eval_edge(box_eid, s_box[1:-1], t)
            for s, p, src in zip(s_box[1:-1], pts, pl[1:-1]):
                vid = self._add_vertex(p, EntityKind.EDGE, box_eid, (float(s), np.nan))
                ids.append(vid)
                mirror_of[src] = vid
            ids.append(mirror_of[pl[-1]])
            self.edge_polylines[box_eid] = np.asarray(ids, dtype=np.int64)
            self.edge_params[box_eid] = s_box

        for fid, box_fid in geom.mirror_face.items():
            src_ids, src_uv = self.face_interior[fid]
            # Radial projection swaps the chart axes: (u, v) -> (h(1+v), h(1+u)).
            box_uv = np.stack([half * (1.0 + src_uv[:, 1]),
                               half * (1.0 + src_uv[:, 0])], axis=1)
            pts = geom.eval_face(box_fid, box_uv[:, 0], box_uv[:, 1], t)
            for src, p, uv in zip(src_ids, pts, box_uv):
                vid = self._add_vertex(p, EntityKind.FACE, box_fid, tuple(uv))
                mirror_of[src] = vid
            tris = self.face_triangles[fid]
            mapped = np.vectorize(mirror_of.__getitem__)(tris) if len(tris) else tris
            # The axis swap reverses orientation; rewind to CCW in box params.
            self.face_triangles[box_fid] = mapped[:, [0, 2, 1]] if len(mapped) else mapped

        mirror_vertex = np.full(len(self.coords), -1, dtype=np.int64)
        for src, dst in mirror_of.items():
            mirror_vertex[src] = dst
        return mirror_vertex

    def finish(self, mirror_vertex=None) -> SurfaceTessellation:
        return SurfaceTessellation(
            time=self.t,
            target_h=self.h,
            coords=np.asarray(self.coords),
            owner_kind=np.asarray(self.owner_kind, dtype=np.int8),
            owner_index=np.asarray(self.owner_index, dtype=np.int32),
            params=np.asarray(self.params, dtype=float),
            node_vertex=self.node_vertex,
            edge_polylines=self.edge_polylines,
            face_triangles=self.face_triangles,
            mirror_vertex=mirror_vertex,
        )


def tessellate(geom: Geometry, t: float, h: float) -> SurfaceTessellation:
    """Triangulate every Face of the geometry at time t with target length h."""
    if not (h > 0):
        raise InputError("target length h must be positive")
    if not (min(geom.t0, geom.tf) <= t <= max(geom.t0, geom.tf)):
        raise InputError(f"time {t} outside the geometry time domain")
    b = _TessBuilder(geom, float(t), float(h))
    if geom.prismatic:
        own_nodes = [n for n in range(geom.n_nodes) if n not in geom.mirror_node.values()]
        own_edges = [e for e in range(geom.n_edges) if e not in geom.mirror_edge.values()]
        own_faces = [f for f in range(geom.n_faces) if f not in geom.mirror_face.values()]
        for nid in own_nodes:
            b.add_node(nid)
        for eid in own_edges:
            b.add_edge(eid)
        for fid in own_faces:
            b.add_face(fid)
        mirror_vertex = b.mirror_box()
        return b.finish(mirror_vertex)
    for nid in range(geom.n_nodes):
        b.add_node(nid)
    for eid in range(geom.n_edges):
        b.add_edge(eid)
    for fid in range(geom.n_faces):
        b.add_face(fid)
    return b.finish()


def euler_characteristic(tess: SurfaceTessellation, shell_faces) -> int:
    """V - E + F over the triangles of the given set of Faces."""
    tris = [tess.face_triangles[f] for f in shell_faces if len(tess.face_triangles[f])]
    if not tris:
        return 0
    tris = np.vstack(tris)
    nf = len(tris)
    nv = len(np.unique(tris))
    edges = np.sort(tris[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
    ne = len(np.unique(edges, axis=0))
    return nv - ne + nf


def uv_on_face(geom: Geometry, tess: SurfaceTessellation, vid: int, fid: int):
    """(u, v) of a tessellation vertex in the domain of an incident Face."""
    kind = int(tess.owner_kind[vid])
    idx = int(tess.owner_index[vid])
    if kind == EntityKind.FACE:
        if idx != fid:
            raise ConformityError(f"vertex {vid} belongs to face {idx}, not {fid}")
        return tess.params[vid]
    if kind == EntityKind.EDGE:
        return geom.edge_uv(idx, fid, tess.params[vid, 0])[0]
    return np.asarray(geom.node_uv(idx, fid))
