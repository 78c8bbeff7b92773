"""Hyperplane slicing of 4D meshes: the CPU reference engine.

Tet-hyperplane intersections are table-driven: the four side bits of a tet
form a result code r selecting the intersected edges from a 16x4 lookup
table (triangle cases pad the fourth slot), derived here by brute-force
enumeration of all sign patterns on a reference tet and validated against
an independent clipping oracle in the tests. Quads are emitted as two
triangles through the shared 18-entry vertex-to-edge table, with wireframe
altitudes arranged so the internal diagonal never darkens.

Side convention: a vertex with signed distance <= 0 takes side bit 1, so a
vertex exactly on the plane yields collapsed (zero-area) points rather than
suppressing its tet entirely; slicing a mesh exactly at its initial time
therefore reproduces the initial-plane triangles.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InputError
from .mesh4 import SpacetimeMesh, pentatope_boundary_tets

__all__ = [
    "Hyperplane", "SliceTables", "SlicePrimitive", "SliceResult",
    "derive_tables", "get_tables", "slice_tet", "slice_triangle",
    "slice_mesh", "slice_tet_bruteforce",
]

# Tet edges in marching-tetrahedra order.
_EDGE_ENDPOINTS = np.array([[0, 1], [1, 2], [2, 0], [0, 3], [1, 3], [2, 3]],
                           dtype=np.int64)

# Altitude stand-in that keeps a suppressed (internal) edge from darkening.
SUPPRESSED_ALTITUDE = 1e4


@dataclass(frozen=True)
class Hyperplane:
    """Slicing plane {p : (p - c) . n = 0} in 4D."""

    n: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "n", np.asarray(self.n, dtype=float).reshape(4))
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float).reshape(4))
        if not np.linalg.norm(self.n) > 0:
            raise InputError("hyperplane normal must be nonzero")

    @staticmethod
    def time_slice(t: float) -> "Hyperplane":
        return Hyperplane(np.array([0.0, 0.0, 0.0, 1.0]),
                          np.array([0.0, 0.0, 0.0, float(t)]))

    def signed_distance(self, points4) -> np.ndarray:
        p = np.asarray(points4, dtype=float)
        return p @ self.n - float(self.c @ self.n)

    def basis(self) -> np.ndarray:
        """Deterministic orthonormal (3, 4) in-plane basis.

        Gram-Schmidt of the three coordinate axes least aligned with n
        (ties broken by axis index), so a pure time slice projects to the
        identity on (x, y, z).
        """
        n = self.n / np.linalg.norm(self.n)
        order = np.argsort(np.abs(n), kind="stable")[:3]
        basis = []
        for ax in order:
            v = np.zeros(4)
            v[ax] = 1.0
            v = v - (v @ n) * n
            for b in basis:
                v = v - (v @ b) * b
            norm = np.linalg.norm(v)
            if norm < 1e-12:
                raise InputError("degenerate hyperplane basis")
            basis.append(v / norm)
        return np.asarray(basis)

    def project(self, points4) -> np.ndarray:
        p = np.asarray(points4, dtype=float)
        return (p - self.c) @ self.basis().T


@dataclass(frozen=True)
class SliceTables:
    case_edges: np.ndarray      # (16, 4) edge slots, -1 marks empty cases
    edge_endpoints: np.ndarray  # (6, 2) tet-vertex pairs per edge
    shape_of_case: np.ndarray   # (16,) 0 none, 1 triangle, 2 quad
    v2e: np.ndarray             # (18,) vertex -> edge slot per shape


def _reference_polygon(code: int):
    """Intersection polygon of the reference tet for one side-bit pattern.

    The reference tet carries vertex values +1 (side bit 0) / -1 (bit 1);
    the plane is the zero level of their linear interpolant, crossing every
    sign-change edge at its midpoint. Returns (edges, midpoints) ordered as
    a cycle around the polygon (brute-force clip of the reference tet).
    """
    ref = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    d = np.array([-1.0 if code & (1 << i) else 1.0 for i in range(4)])
    crossing = [e for e in range(6)
                if d[_EDGE_ENDPOINTS[e, 0]] * d[_EDGE_ENDPOINTS[e, 1]] < 0]
    pts = np.array([0.5 * (ref[_EDGE_ENDPOINTS[e, 0]] + ref[_EDGE_ENDPOINTS[e, 1]])
                    for e in crossing])
    if len(crossing) < 3:
        return crossing, pts
    centroid = pts.mean(axis=0)
    rel = pts - centroid
    normal = np.cross(rel[0], rel[1])
    if np.linalg.norm(normal) == 0:
        normal = np.cross(rel[0], rel[2])
    normal /= np.linalg.norm(normal)
    # Orient the cycle counter-clockwise as seen from the positive side
    # (the gradient of the interpolant points toward side-bit-0 vertices).
    grad = np.linalg.lstsq(
        np.hstack([ref, np.ones((4, 1))]), d, rcond=None)[0][:3]
    if np.dot(normal, grad) < 0:
        normal = -normal
    u = rel[0] / np.linalg.norm(rel[0])
    v = np.cross(normal, u)
    ang = np.arctan2(rel @ v, rel @ u)
    order = np.argsort(ang, kind="stable")
    return [crossing[i] for i in order], pts[order]


def derive_tables() -> SliceTables:
    """Generate the 16-case intersection tables by enumeration.

    Triangle cases repeat their third edge in the fourth slot so the quad
    path still draws a triangle; quad slots are ordered (0, 1, 3, 2) around
    the polygon so the two v2e triangles (e0,e1,e2) and (e1,e3,e2) tile it.
    """
    case_edges = np.full((16, 4), -1, dtype=np.int64)
    shape = np.zeros(16, dtype=np.int64)
    for code in range(16):
        cyc, _pts = _reference_polygon(code)
        if len(cyc) == 0:
            continue
        if len(cyc) == 3:
            shape[code] = 1
            case_edges[code] = [cyc[0], cyc[1], cyc[2], cyc[2]]
        elif len(cyc) == 4:
            shape[code] = 2
            q0, q1, q2, q3 = cyc
            case_edges[code] = [q0, q1, q3, q2]
        else:
            raise AssertionError(f"case {code}: {len(cyc)} crossings")
    v2e = np.array([0, 0, 0, 0, 0, 0, 0, 1, 2, 0, 0, 0, 0, 1, 2, 1, 3, 2],
                   dtype=np.int64)
    tables = SliceTables(case_edges, _EDGE_ENDPOINTS.copy(), shape, v2e)
    _validate_tables(tables)
    return tables


def _validate_tables(t: SliceTables):
    popcount = np.array([bin(r).count("1") for r in range(16)])
    for r in range(16):
        edges = set(int(e) for e in t.case_edges[r] if e >= 0)
        mirror = set(int(e) for e in t.case_edges[15 - r] if e >= 0)
        assert edges == mirror, f"case {r} not symmetric with {15 - r}"
        if popcount[r] in (1, 3):
            assert t.shape_of_case[r] == 1 and len(edges) == 3
        elif popcount[r] == 2:
            assert t.shape_of_case[r] == 2 and len(edges) == 4
        else:
            assert t.shape_of_case[r] == 0 and len(edges) == 0


_TABLES: SliceTables | None = None


def get_tables() -> SliceTables:
    global _TABLES
    if _TABLES is None:
        _TABLES = derive_tables()
    return _TABLES


@dataclass
class SlicePrimitive:
    kind: str                   # "triangle" | "quad"
    case_code: int
    points4: np.ndarray         # (4, 4) slot points (triangles repeat slot 2)
    points3: np.ndarray         # (4, 3) projected slot points
    tag: int = -1

    def unique_points4(self) -> np.ndarray:
        return self.points4[:3] if self.kind == "triangle" else self.points4


def slice_tet(points4, plane: Hyperplane, tables: SliceTables | None = None):
    """Table-driven intersection of one tet; None when empty."""
    tables = tables or get_tables()
    p = np.asarray(points4, dtype=float).reshape(4, 4)
    d = plane.signed_distance(p)
    code = int(sum((1 << i) for i in range(4) if d[i] <= 0.0))
    shape = int(tables.shape_of_case[code])
    if shape == 0:
        return None
    edges = tables.case_edges[code]
    a = tables.edge_endpoints[edges, 0]
    b = tables.edge_endpoints[edges, 1]
    alpha = d[a] / (d[a] - d[b])
    pts4 = p[a] + alpha[:, None] * (p[b] - p[a])
    snap = alpha == 1.0
    pts4[snap] = p[b][snap]          # bit-exact collapse onto on-plane vertices
    return SlicePrimitive(
        kind="triangle" if shape == 1 else "quad",
        case_code=code,
        points4=pts4,
        points3=plane.project(pts4),
    )


def slice_tet_bruteforce(points4, plane: Hyperplane) -> np.ndarray:
    """Oracle: unordered intersection points of tet edges with the plane.

    Independent of the lookup tables: walks all six edges, collecting the
    crossing of every edge whose endpoint distances straddle zero (and any
    vertex exactly on the plane).
    """
    p = np.asarray(points4, dtype=float).reshape(4, 4)
    d = plane.signed_distance(p)
    out = [p[i] for i in range(4) if d[i] == 0.0]
    for i, j in _EDGE_ENDPOINTS:
        if d[i] * d[j] < 0.0:
            alpha = d[i] / (d[i] - d[j])
            out.append(p[i] + alpha * (p[j] - p[i]))
    return np.asarray(out).reshape(-1, 4)


def slice_triangle(points4, plane: Hyperplane):
    """Segment where the plane crosses a triangle embedded in 4D, or None."""
    p = np.asarray(points4, dtype=float).reshape(3, 4)
    d = plane.signed_distance(p)
    bits = d <= 0.0
    if bits.all() or not bits.any():
        return None
    pts = []
    for i, j in ((0, 1), (1, 2), (2, 0)):
        if bits[i] != bits[j]:
            alpha = d[i] / (d[i] - d[j])
            pts.append(p[j] if alpha == 1.0 else p[i] + alpha * (p[j] - p[i]))
    pts4 = np.asarray(pts).reshape(2, 4)
    return pts4, plane.project(pts4)


@dataclass
class SliceResult:
    """Triangles (quads pre-split in v2e order) and Edge-surface segments."""

    tri_points3: np.ndarray = field(default_factory=lambda: np.zeros((0, 3, 3)))
    tri_points4: np.ndarray = field(default_factory=lambda: np.zeros((0, 3, 4)))
    tri_altitudes: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    tri_tags: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    tri_elements: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    tri_cases: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    tri_src_edges: np.ndarray = field(default_factory=lambda: np.zeros((0, 3, 2), np.int64))
    seg_points3: np.ndarray = field(default_factory=lambda: np.zeros((0, 2, 3)))
    seg_points4: np.ndarray = field(default_factory=lambda: np.zeros((0, 2, 4)))
    seg_tags: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    case_counts: np.ndarray = field(default_factory=lambda: np.zeros(16, np.int64))

    @property
    def n_triangles(self):
        return len(self.tri_points3)

    @property
    def n_segments(self):
        return len(self.seg_points3)

    @property
    def n_primitives(self):
        return int(self.case_counts.sum()) + self.n_segments


def _triangle_areas(tris3):
    e1 = tris3[:, 1] - tris3[:, 0]
    e2 = tris3[:, 2] - tris3[:, 0]
    return 0.5 * np.linalg.norm(np.cross(e1, e2), axis=1)


def _altitudes(tris3):
    """Distance of each vertex from its opposite edge."""
    area2 = 2.0 * _triangle_areas(tris3)
    alt = np.empty((len(tris3), 3))
    for i in range(3):
        opp = np.linalg.norm(tris3[:, (i + 2) % 3] - tris3[:, (i + 1) % 3], axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            alt[:, i] = np.where(opp > 0, area2 / opp, 0.0)
    return alt


def slice_mesh(mesh: SpacetimeMesh, plane: Hyperplane,
               tables: SliceTables | None = None, engine=None,
               min_area: float = 1e-20) -> SliceResult:
    """Slice every tet (pentatopes expanded to their five boundary tets)
    and every Edge-surface triangle of the mesh.

    Quads split into two triangles in v2e order, sharing the (suppressed)
    diagonal between slots 1 and 2; primitives collapsing below min_area
    are dropped. Deterministic: output follows element-index order.
    """
    tables = tables or get_tables()
    tets = mesh.tets
    tags = mesh.tet_tags
    elements = np.arange(len(tets), dtype=np.int64)
    if len(mesh.pentatopes):
        exp = np.vstack([pentatope_boundary_tets(p) for p in mesh.pentatopes])
        tets = np.vstack([tets, exp])
        tags = np.concatenate([tags, np.repeat(mesh.penta_tags, 5)])
        elements = np.concatenate([
            elements, len(mesh.tets) + np.repeat(np.arange(len(mesh.pentatopes)), 5)])

    sel, codes, pts4, eids = _kernels.slice_tets_batch(
        mesh.vertices, tets, plane.n, plane.c,
        tables.case_edges, tables.edge_endpoints, tables.shape_of_case,
        engine=engine)
    result = SliceResult()
    if len(sel):
        basis = plane.basis()
        pts3 = (pts4 - plane.c) @ basis.T                    # (K, 4, 3)
        shapes = tables.shape_of_case[codes]
        tri_rows = []
        for local, slots in (("tri1", (0, 1, 2)), ("tri2", (1, 3, 2))):
            mask = np.ones(len(sel), bool) if local == "tri1" else shapes == 2
            idx = np.nonzero(mask)[0]
            rows3 = pts3[idx][:, slots, :]
            rows4 = pts4[idx][:, slots, :]
            rowse = eids[idx][:, slots, :]
            alts = _altitudes(rows3)
            if local == "tri1":
                quad = shapes[idx] == 2
                alts[quad, 0] = SUPPRESSED_ALTITUDE   # slot 0 faces the diagonal
            else:
                alts[:, 1] = SUPPRESSED_ALTITUDE      # slot 3 faces the diagonal
            tri_rows.append((idx, rows3, rows4, rowse, alts))
        idx = np.concatenate([r[0] for r in tri_rows])
        order = np.argsort(idx, kind="stable")
        rows3 = np.vstack([r[1] for r in tri_rows])[order]
        rows4 = np.vstack([r[2] for r in tri_rows])[order]
        rowse = np.vstack([r[3] for r in tri_rows])[order]
        alts = np.vstack([r[4] for r in tri_rows])[order]
        idx = idx[order]

        keep = _triangle_areas(rows3) >= min_area
        result.tri_points3 = rows3[keep]
        result.tri_points4 = rows4[keep]
        result.tri_altitudes = alts[keep]
        result.tri_src_edges = rowse[keep]
        result.tri_tags = tags[sel][idx[keep]]
        result.tri_elements = elements[sel][idx[keep]]
        result.tri_cases = codes[idx[keep]].astype(np.int64)
        kept_prims = np.unique(idx[keep])
        result.case_counts = np.bincount(codes[kept_prims].astype(np.int64),
                                         minlength=16)

    if len(mesh.triangles):
        segs4, segs3, stags = _slice_edge_triangles(mesh, plane)
        result.seg_points4 = segs4
        result.seg_points3 = segs3
        result.seg_tags = stags
    return result


def _slice_edge_triangles(mesh, plane, min_len=1e-20):
    verts = mesh.vertices
    tris = mesh.triangles
    d = plane.signed_distance(verts)
    bits = d <= 0.0
    b = bits[tris]
    mixed = np.nonzero(b.any(axis=1) & ~b.all(axis=1))[0]
    if not len(mixed):
        return (np.zeros((0, 2, 4)), np.zeros((0, 2, 3)), np.zeros(0, np.int64))
    out4 = np.empty((len(mixed), 2, 4))
    for row, ti in enumerate(mixed):
        tri = tris[ti]
        k = 0
        for i, j in ((0, 1), (1, 2), (2, 0)):
            if bits[tri[i]] != bits[tri[j]]:
                alpha = d[tri[i]] / (d[tri[i]] - d[tri[j]])
                if alpha == 1.0:
                    out4[row, k] = verts[tri[j]]
                else:
                    out4[row, k] = verts[tri[i]] + alpha * (verts[tri[j]] - verts[tri[i]])
                k += 1
        assert k == 2
    basis = plane.basis()
    out3 = (out4 - plane.c) @ basis.T
    tags = mesh.tri_tags[mixed]
    keep = np.linalg.norm(out3[:, 1] - out3[:, 0], axis=1) >= min_len
    return out4[keep], out3[keep], tags[keep]
