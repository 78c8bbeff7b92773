"""Analytic multi-patch geometries whose shape is a function of time.

Bodies are built from Nodes, Edges and Faces with rectangular parameter
domains. Three constructors are provided: a sphere inside a box (the sphere
modeled as six cube-sphere patches so every domain is a seam- and
singularity-free rectangle), a torus inside a box (four seam-free patches),
and a bare box. All evaluators are exact closed-form functions of the entity
parameters and time; rigid/scaling motion is applied on top of a static base
shape.

Orientation convention: object patches have outward surface normals (away
from the enclosed solid) while box patches point into the domain interior,
so both shells point into the meshed region between them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .errors import InvalidGeometryError, TopologyError

__all__ = [
    "EntityKind", "EntityId", "Motion", "Geometry",
    "make_sphere_in_box", "make_torus_in_box", "make_box",
]


class EntityKind(IntEnum):
    NODE = 0
    EDGE = 1
    FACE = 2


@dataclass(frozen=True)
class EntityId:
    kind: EntityKind
    index: int


@dataclass(frozen=True)
class Motion:
    """Time-dependent rigid/scaling transform over [t0, tf].

    Endpoint-exact: evaluation at t0 and tf reproduces the endpoint
    parameters bitwise (lerp is computed as a*(1-tau) + b*tau).
    """

    kind: str                      # static | scale | rotation | translation
    t0: float = 0.0
    tf: float = 1.0
    center: tuple = (0.0, 0.0, 0.0)
    factor0: float = 1.0
    factor1: float = 1.0
    axis: tuple = (0.0, 0.0, 1.0)
    angle0: float = 0.0
    angle1: float = 0.0
    vec0: tuple = (0.0, 0.0, 0.0)
    vec1: tuple = (0.0, 0.0, 0.0)

    def _tau(self, t: float) -> float:
        return (t - self.t0) / (self.tf - self.t0)

    def scale_factor(self, t: float) -> float:
        tau = self._tau(t)
        return self.factor0 * (1.0 - tau) + self.factor1 * tau

    def apply(self, points: np.ndarray, t: float) -> np.ndarray:
        if self.kind == "static":
            return points
        if self.kind == "scale":
            c = np.asarray(self.center)
            return c + self.scale_factor(t) * (points - c)
        tau = self._tau(t)
        if self.kind == "translation":
            v0 = np.asarray(self.vec0)
            v1 = np.asarray(self.vec1)
            return points + (v0 * (1.0 - tau) + v1 * tau)
        if self.kind == "rotation":
            ang = self.angle0 * (1.0 - tau) + self.angle1 * tau
            k = np.asarray(self.axis, dtype=float)
            k = k / np.linalg.norm(k)
            c = np.asarray(self.center)
            p = points - c
            cos, sin = np.cos(ang), np.sin(ang)
            rot = p * cos + np.cross(k, p) * sin + np.outer(p @ k, k) * (1.0 - cos)
            return c + rot
        raise ValueError(f"unknown motion kind {self.kind!r}")

    def speed_multiplier(self, t: float) -> float:
        """Factor by which the motion scales arclengths at time t."""
        if self.kind == "scale":
            return abs(self.scale_factor(t))
        return 1.0

    @staticmethod
    def static(t0=0.0, tf=1.0) -> "Motion":
        return Motion("static", t0, tf)

    @staticmethod
    def linear_scale(center, factor0, factor1, t0=0.0, tf=1.0) -> "Motion":
        return Motion("scale", t0, tf, center=tuple(center),
                      factor0=float(factor0), factor1=float(factor1))

    @staticmethod
    def rotation(axis, center, angle0, angle1, t0=0.0, tf=1.0) -> "Motion":
        return Motion("rotation", t0, tf, center=tuple(center), axis=tuple(axis),
                      angle0=float(angle0), angle1=float(angle1))

    @staticmethod
    def translation(vec0, vec1, t0=0.0, tf=1.0) -> "Motion":
        return Motion("translation", t0, tf, vec0=tuple(vec0), vec1=tuple(vec1))


@dataclass
class _NodeRec:
    base0: np.ndarray          # position at t0
    base1: np.ndarray          # position at tf


@dataclass
class _EdgeRec:
    kind: str                      # line | sphere_arc | torus_u | torus_v
    srange: tuple
    nodes: tuple                   # (node at s0, node at s1)
    faces: list = field(default_factory=list)
    origin: np.ndarray | None = None
    direction: np.ndarray | None = None
    qc: np.ndarray | None = None   # sphere_arc: q(s) = qc + s*qdir
    qdir: np.ndarray | None = None
    radius: tuple = (0.0, 0.0)     # (value at t0, value at tf)
    r: tuple = (0.0, 0.0)          # torus minor
    R: tuple = (0.0, 0.0)          # torus major
    fixed: float = 0.0             # torus: the frozen angle


@dataclass
class _FaceRec:
    kind: str                      # plane | sphere_patch | torus_patch
    urange: tuple
    vrange: tuple
    loop: list = field(default_factory=list)   # [(edge id, forward)]
    origin: np.ndarray | None = None
    au: np.ndarray | None = None
    av: np.ndarray | None = None
    qc: np.ndarray | None = None   # sphere_patch: q = qc + u*qa + v*qb
    qa: np.ndarray | None = None
    qb: np.ndarray | None = None
    radius: tuple = (0.0, 0.0)
    r: tuple = (0.0, 0.0)
    R: tuple = (0.0, 0.0)


def _normalize_rows(q):
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


class Geometry:
    """Immutable topological body with per-entity analytic evaluators.

    Entity evaluation is pure in (entity, params, t); instances are safe to
    share across workers.
    """

    def __init__(self, nodes, edges, faces, motion, length_scale, name=""):
        self._nodes = nodes
        self._edges = edges
        self._faces = faces
        self.motion = motion
        self.length_scale = float(length_scale)
        self.name = name
        self.t0 = motion.t0
        self.tf = motion.tf
        self.prismatic = False
        self.mirror_face: dict[int, int] = {}
        self.mirror_edge: dict[int, int] = {}
        self.mirror_node: dict[int, int] = {}
        self._edge_face_uv: dict = {}    # (eid, fid) -> (const_axis, const_val, a, b)
        self._node_face_uv: dict = {}
        self._node_edge_s: dict = {}

    # -- topology ------------------------------------------------------------

    @property
    def n_nodes(self):
        return len(self._nodes)

    @property
    def n_edges(self):
        return len(self._edges)

    @property
    def n_faces(self):
        return len(self._faces)

    def edge_nodes(self, eid):
        return self._edges[eid].nodes

    def edge_faces(self, eid):
        return tuple(self._edges[eid].faces)

    def face_loop(self, fid):
        return list(self._faces[fid].loop)

    def edge_range(self, eid):
        return self._edges[eid].srange

    def face_range(self, fid):
        f = self._faces[fid]
        return f.urange + f.vrange

    def validate_topology(self):
        for eid, e in enumerate(self._edges):
            if len(e.faces) != 2:
                raise TopologyError(f"edge {eid} incident to {len(e.faces)} faces")
        for fid, f in enumerate(self._faces):
            loop = f.loop
            ends = []
            for eid, fwd in loop:
                n0, n1 = self._edges[eid].nodes
                ends.append((n0, n1) if fwd else (n1, n0))
            for k in range(len(ends)):
                if ends[k][1] != ends[(k + 1) % len(ends)][0]:
                    raise TopologyError(f"face {fid} loop is not closed at position {k}")

    # -- evaluation ------------------------------------------------------------
    # Moving entities interpolate their defining parameters between the t0
    # and tf values (a*(1-tau) + b*tau), so evaluation at an endpoint is the
    # identical expression to a static construction of that endpoint shape.

    def _tau(self, t: float) -> float:
        return (t - self.t0) / (self.tf - self.t0)

    def _lerp(self, pair, t: float) -> float:
        a, b = pair
        if a == b:
            return a
        tau = self._tau(t)
        return a * (1.0 - tau) + b * tau

    def eval_node(self, nid, t):
        n = self._nodes[nid]
        if n.base0 is n.base1:
            return n.base0.copy()
        tau = self._tau(t)
        return n.base0 * (1.0 - tau) + n.base1 * tau

    def eval_edge(self, eid, s, t):
        e = self._edges[eid]
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if e.kind == "line":
            return e.origin[None, :] + s[:, None] * e.direction[None, :]
        if e.kind == "sphere_arc":
            q = e.qc[None, :] + s[:, None] * e.qdir[None, :]
            return self._lerp(e.radius, t) * _normalize_rows(q)
        if e.kind == "torus_u":
            r, R = self._lerp(e.r, t), self._lerp(e.R, t)
            rho = R + r * np.cos(e.fixed)
            return np.stack([rho * np.cos(s), rho * np.sin(s),
                             np.full_like(s, r * np.sin(e.fixed))], axis=1)
        if e.kind == "torus_v":
            r, R = self._lerp(e.r, t), self._lerp(e.R, t)
            rho = R + r * np.cos(s)
            return np.stack([rho * np.cos(e.fixed), rho * np.sin(e.fixed),
                             r * np.sin(s)], axis=1)
        raise ValueError(e.kind)

    def eval_face(self, fid, u, v, t):
        f = self._faces[fid]
        u = np.atleast_1d(np.asarray(u, dtype=float))
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if f.kind == "plane":
            return f.origin[None, :] + u[:, None] * f.au[None, :] + v[:, None] * f.av[None, :]
        if f.kind == "sphere_patch":
            q = f.qc[None, :] + u[:, None] * f.qa[None, :] + v[:, None] * f.qb[None, :]
            return self._lerp(f.radius, t) * _normalize_rows(q)
        if f.kind == "torus_patch":
            r, R = self._lerp(f.r, t), self._lerp(f.R, t)
            rho = R + r * np.cos(v)
            return np.stack([rho * np.cos(u), rho * np.sin(u), r * np.sin(v)], axis=1)
        raise ValueError(f.kind)

    def edge_speed(self, eid, s, t):
        """|d(point)/ds| along the edge at time t."""
        e = self._edges[eid]
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if e.kind == "line":
            return np.full(s.shape, np.linalg.norm(e.direction))
        if e.kind == "sphere_arc":
            q = e.qc[None, :] + s[:, None] * e.qdir[None, :]
            nq = np.linalg.norm(q, axis=1)
            qd = (q @ e.qdir) / nq
            deriv = e.qdir[None, :] / nq[:, None] - q * (qd / nq ** 2)[:, None]
            return self._lerp(e.radius, t) * np.linalg.norm(deriv, axis=1)
        if e.kind == "torus_u":
            r, R = self._lerp(e.r, t), self._lerp(e.R, t)
            return np.full(s.shape, R + r * np.cos(e.fixed))
        if e.kind == "torus_v":
            return np.full(s.shape, self._lerp(e.r, t))
        raise ValueError(e.kind)

    def face_iso_speed(self, fid, axis, w, s, t):
        """Speed along a face iso-line (axis 0: u varies at v=w; axis 1: v varies)."""
        f = self._faces[fid]
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if f.kind == "plane":
            d = f.au if axis == 0 else f.av
            return np.full(s.shape, np.linalg.norm(d))
        if f.kind == "sphere_patch":
            if axis == 0:
                qc, qd = f.qc + w * f.qb, f.qa
            else:
                qc, qd = f.qc + w * f.qa, f.qb
            q = qc[None, :] + s[:, None] * qd[None, :]
            nq = np.linalg.norm(q, axis=1)
            qdn = (q @ qd) / nq
            deriv = qd[None, :] / nq[:, None] - q * (qdn / nq ** 2)[:, None]
            return self._lerp(f.radius, t) * np.linalg.norm(deriv, axis=1)
        if f.kind == "torus_patch":
            if axis == 0:
                r, R = self._lerp(f.r, t), self._lerp(f.R, t)
                return np.full(s.shape, R + r * np.cos(w))
            return np.full(s.shape, self._lerp(f.r, t))
        raise ValueError(f.kind)

    # -- parameter-space maps ----------------------------------------------------

    def edge_uv(self, eid, fid, s):
        """Map edge parameter(s) onto the face's rectangular domain boundary."""
        if (eid, fid) not in self._edge_face_uv:
            raise TopologyError(f"edge {eid} is not incident to face {fid}")
        const_axis, const_val, a, b = self._edge_face_uv[(eid, fid)]
        s = np.atleast_1d(np.asarray(s, dtype=float))
        var = a + b * s
        const = np.full(s.shape, const_val)
        return np.stack([const, var] if const_axis == 0 else [var, const], axis=1)

    def edge_uv_map(self, eid, fid):
        """(const_axis, const_val, a, b) for the affine edge-to-face map."""
        if (eid, fid) not in self._edge_face_uv:
            raise TopologyError(f"edge {eid} is not incident to face {fid}")
        return self._edge_face_uv[(eid, fid)]

    def node_uv(self, nid, fid):
        return self._node_face_uv[(nid, fid)]

    def node_s(self, nid, eid):
        return self._node_edge_s[(nid, eid)]

    # -- loop assembly (shared by constructors) -----------------------------------

    def _register_incidence(self, eid, fid, const_axis, const_val, a, b):
        self._edges[eid].faces.append(fid)
        self._edge_face_uv[(eid, fid)] = (const_axis, const_val, float(a), float(b))
        s0, s1 = self._edges[eid].srange
        n0, n1 = self._edges[eid].nodes
        self._node_edge_s[(n0, eid)] = s0
        self._node_edge_s[(n1, eid)] = s1
        for nid, s in ((n0, s0), (n1, s1)):
            var = a + b * s
            uv = (const_val, var) if const_axis == 0 else (var, const_val)
            prev = self._node_face_uv.get((nid, fid))
            if prev is not None and prev != uv:
                raise TopologyError(f"node {nid} maps to two corners of face {fid}")
            self._node_face_uv[(nid, fid)] = uv

    def _build_loops(self):
        """Derive CCW rectangle loops (bottom, right, top, left) per face."""
        sides = {fid: {} for fid in range(self.n_faces)}
        for (eid, fid), (caxis, cval, _a, b) in self._edge_face_uv.items():
            umin, umax, vmin, vmax = self.face_range(fid)
            if caxis == 1 and cval == vmin:
                key = "bottom"
            elif caxis == 0 and cval == umax:
                key = "right"
            elif caxis == 1 and cval == vmax:
                key = "top"
            elif caxis == 0 and cval == umin:
                key = "left"
            else:
                raise TopologyError(f"edge {eid} not on the boundary of face {fid}")
            if key in sides[fid]:
                raise TopologyError(f"face {fid} side {key} covered twice")
            sides[fid][key] = (eid, b > 0)
        for fid, entry in sides.items():
            if set(entry) != {"bottom", "right", "top", "left"}:
                raise TopologyError(f"face {fid} loop incomplete: {sorted(entry)}")
            eb, fb = entry["bottom"]
            er, fr = entry["right"]
            et, ft = entry["top"]
            el, fl = entry["left"]
            self._faces[fid].loop = [(eb, fb), (er, fr), (et, not ft), (el, not fl)]


# Cube combinatorics shared by the cube-sphere and the box: 6 faces keyed by
# (axis, sign) with chart axes (a, b) chosen so e_a x e_b = sign * e_axis.
_CUBE_FACES = [
    (0, 1, (1, 2)), (0, -1, (2, 1)),
    (1, 1, (2, 0)), (1, -1, (0, 2)),
    (2, 1, (0, 1)), (2, -1, (1, 0)),
]


def _cube_edges():
    """12 edges: (varying axis k, fixed axes ((j1, s1), (j2, s2)))."""
    out = []
    for k in range(3):
        j1, j2 = [a for a in range(3) if a != k]
        for s1 in (-1, 1):
            for s2 in (-1, 1):
                out.append((k, ((j1, s1), (j2, s2))))
    return out


def _cube_corners():
    return [np.array(c, dtype=float) for c in
            [(sx, sy, sz) for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)]]


def _corner_index(vec):
    return int(4 * (vec[0] > 0) + 2 * (vec[1] > 0) + (vec[2] > 0))


def _build_cube_shell(geom, shell, radii, node_off, edge_off, face_off):
    """Append a cube-combinatorics shell.

    shell 'sphere': radii = (radius at t0, radius at tf); shell 'box':
    radii = (half-side, half-side), always static.
    """
    corners = _cube_corners()
    if shell == "sphere":
        r0, r1 = radii
        for c in corners:
            unit = c / np.linalg.norm(c)
            b0 = r0 * unit
            b1 = b0 if r1 == r0 else r1 * unit
            geom._nodes.append(_NodeRec(base0=b0, base1=b1))
    else:
        h = radii[0]
        for c in corners:
            b = h * c
            geom._nodes.append(_NodeRec(base0=b, base1=b))

    edges = _cube_edges()
    for k, ((j1, s1), (j2, s2)) in edges:
        qc = np.zeros(3)
        qc[j1], qc[j2] = s1, s2
        qdir = np.zeros(3)
        qdir[k] = 1.0
        lo, hi = qc.copy(), qc.copy()
        lo[k], hi[k] = -1.0, 1.0
        n0 = node_off + _corner_index(lo)
        n1 = node_off + _corner_index(hi)
        if shell == "sphere":
            geom._edges.append(_EdgeRec("sphere_arc", (-1.0, 1.0), (n0, n1),
                                        qc=qc, qdir=qdir, radius=tuple(radii)))
        else:
            h = radii[0]
            side = 2.0 * h
            origin = h * qc - h * qdir
            geom._edges.append(_EdgeRec("line", (0.0, side), (n0, n1),
                                        origin=origin, direction=qdir))

    for axis, sign, (a, b) in _CUBE_FACES:
        qc = np.zeros(3)
        qc[axis] = float(sign)
        qa = np.zeros(3)
        qa[a] = 1.0
        qb = np.zeros(3)
        qb[b] = 1.0
        if shell == "sphere":
            geom._faces.append(_FaceRec("sphere_patch", (-1.0, 1.0), (-1.0, 1.0),
                                        qc=qc, qa=qa, qb=qb, radius=tuple(radii)))
        else:
            h = radii[0]
            side = 2.0 * h
            # Swapped chart axes give the box face an inward normal.
            au, av = qb, qa
            origin = h * qc - h * au - h * av
            geom._faces.append(_FaceRec("plane", (0.0, side), (0.0, side),
                                        origin=origin, au=au, av=av))

    # Incidences: edge (k, (j1,s1), (j2,s2)) bounds faces (j1,s1) and (j2,s2).
    face_index = {(axis, sign): face_off + i for i, (axis, sign, _) in enumerate(_CUBE_FACES)}
    chart_axes = {(axis, sign): ab for axis, sign, ab in _CUBE_FACES}
    h = radii[0]
    for ei, (k, fixed) in enumerate(edges):
        eid = edge_off + ei
        fixed_map = dict(fixed)
        for (jf, sf) in fixed:
            fid = face_index[(jf, sf)]
            a, b = chart_axes[(jf, sf)]
            if shell == "sphere":
                cu = (0.0, 1.0) if a == k else (float(fixed_map[a]), 0.0)
                cv = (0.0, 1.0) if b == k else (float(fixed_map[b]), 0.0)
            else:
                # Box chart axes are swapped: u follows b, v follows a.
                cu = (0.0, 1.0) if b == k else (h * (1.0 + fixed_map[b]), 0.0)
                cv = (0.0, 1.0) if a == k else (h * (1.0 + fixed_map[a]), 0.0)
            if cu[1] != 0.0 and cv[1] == 0.0:
                geom._register_incidence(eid, fid, 1, cv[0], cu[0], cu[1])
            elif cv[1] != 0.0 and cu[1] == 0.0:
                geom._register_incidence(eid, fid, 0, cu[0], cv[0], cv[1])
            else:
                raise TopologyError("cube edge chart must vary in exactly one axis")


def _attach_box(geom, box_side, node_off, edge_off, face_off):
    half = box_side / 2.0
    _build_cube_shell(geom, "box", (half, half), node_off, edge_off, face_off)


def make_sphere_in_box(r0, rf, box_side, t0=0.0, tf=1.0) -> Geometry:
    """Sphere of radius r0 growing linearly to rf inside a static box.

    The sphere is six cube-sphere patches (12 Edges, 8 Nodes); the box mirrors
    the same cube layout, which makes the initial/final volume caps prismatic.
    """
    if not (0 < r0 <= rf < box_side / 2.0):
        raise InvalidGeometryError(
            f"need 0 < r0 <= rf < box_side/2, got r0={r0}, rf={rf}, box={box_side}")
    if rf > r0:
        motion = Motion.linear_scale((0.0, 0.0, 0.0), 1.0, rf / r0, t0, tf)
    else:
        motion = Motion.static(t0, tf)
    geom = Geometry([], [], [], motion, box_side,
                    name="static-sphere" if rf == r0 else "expanding-sphere")
    _build_cube_shell(geom, "sphere", (float(r0), float(rf)), 0, 0, 0)
    _attach_box(geom, box_side, 8, 12, 6)
    geom.prismatic = True
    geom.mirror_node = {i: i + 8 for i in range(8)}
    geom.mirror_edge = {i: i + 12 for i in range(12)}
    geom.mirror_face = {i: i + 6 for i in range(6)}
    geom._build_loops()
    geom.validate_topology()
    return geom


def make_torus_in_box(r0, R0, rf, Rf, box_side, t0=0.0, tf=1.0) -> Geometry:
    """Uniformly scaling torus (minor r, major R) inside a static box.

    The torus is split at u, v in {0, pi} into four seam-free rectangular
    patches (8 Edges, 4 Nodes). Runs in open-cap mode only.
    """
    if not (0 < r0 < R0):
        raise InvalidGeometryError(f"need 0 < r0 < R0, got r0={r0}, R0={R0}")
    if abs(rf / r0 - Rf / R0) > 1e-12 * (Rf / R0):
        raise InvalidGeometryError("torus scaling must be uniform: rf/r0 == Rf/R0")
    # Non-strict: the reference parameters have the initial torus exactly
    # touching the box. The shells never interact, so touching is harmless.
    if not (R0 + r0 <= box_side / 2.0):
        raise InvalidGeometryError("initial torus does not fit in the box")
    scale = Rf / R0
    if scale != 1.0:
        motion = Motion.linear_scale((0.0, 0.0, 0.0), 1.0, scale, t0, tf)
    else:
        motion = Motion.static(t0, tf)
    geom = Geometry([], [], [], motion, box_side, name="expanding-torus")

    pi = np.pi
    # Nodes at (u0, v0) in {0, pi}^2, id = 2*ju + jv.
    for ju in (0, 1):
        for jv in (0, 1):
            u0, v0 = ju * pi, jv * pi

            def torus_pt(r, R):
                return np.array([(R + r * np.cos(v0)) * np.cos(u0),
                                 (R + r * np.cos(v0)) * np.sin(u0),
                                 r * np.sin(v0)])

            geom._nodes.append(_NodeRec(base0=torus_pt(r0, R0),
                                        base1=torus_pt(rf, Rf)))

    def node_id(ju, jv):
        return 2 * (ju % 2) + (jv % 2)

    # u-varying edges: id = 2*jv + iu; v-varying edges: id = 4 + 2*ju + iv.
    rr = (float(r0), float(rf))
    RR = (float(R0), float(Rf))
    for jv in (0, 1):
        for iu in (0, 1):
            geom._edges.append(_EdgeRec("torus_u", (iu * pi, (iu + 1) * pi),
                                        (node_id(iu, jv), node_id(iu + 1, jv)),
                                        r=rr, R=RR, fixed=jv * pi))
    for ju in (0, 1):
        for iv in (0, 1):
            geom._edges.append(_EdgeRec("torus_v", (iv * pi, (iv + 1) * pi),
                                        (node_id(ju, iv), node_id(ju, iv + 1)),
                                        r=rr, R=RR, fixed=ju * pi))

    # Faces: id = 2*iu + iv, domain [iu*pi, (iu+1)*pi] x [iv*pi, (iv+1)*pi].
    for iu in (0, 1):
        for iv in (0, 1):
            geom._faces.append(_FaceRec("torus_patch",
                                        (iu * pi, (iu + 1) * pi), (iv * pi, (iv + 1) * pi),
                                        r=rr, R=RR))

    def face_id(iu, iv):
        return 2 * iu + iv

    # u-edge (jv, iu) bounds faces (iu, jv) [v-min] and (iu, jv-1) [v-max].
    for jv in (0, 1):
        for iu in (0, 1):
            eid = 2 * jv + iu
            geom._register_incidence(eid, face_id(iu, jv), 1, jv * pi, 0.0, 1.0)
            other_iv = 1 - jv
            vmax = (other_iv + 1) * pi
            geom._register_incidence(eid, face_id(iu, other_iv), 1, vmax, 0.0, 1.0)
    # v-edge (ju, iv) bounds faces (ju, iv) [u-min] and (ju-1, iv) [u-max].
    for ju in (0, 1):
        for iv in (0, 1):
            eid = 4 + 2 * ju + iv
            geom._register_incidence(eid, face_id(ju, iv), 0, ju * pi, 0.0, 1.0)
            other_iu = 1 - ju
            umax = (other_iu + 1) * pi
            geom._register_incidence(eid, face_id(other_iu, iv), 0, umax, 0.0, 1.0)

    _attach_box(geom, box_side, 4, 8, 4)
    geom._build_loops()
    geom.validate_topology()
    return geom


def make_box(box_side, t0=0.0, tf=1.0) -> Geometry:
    """Static box shell alone (test geometry: every face is planar)."""
    if box_side <= 0:
        raise InvalidGeometryError("box_side must be positive")
    geom = Geometry([], [], [], Motion.static(t0, tf), box_side, name="box")
    _attach_box(geom, box_side, 0, 0, 0)
    geom._build_loops()
    geom.validate_topology()
    return geom
