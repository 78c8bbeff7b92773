"""Incremental Delaunay tetrahedralization of points inside a seeded box.

Bowyer-Watson with the convex domain seeded from its 8 corner vertices,
so no super-simplex is needed and points exactly on the box hull are
inserted by opening the cavity through the coplanar hull faces. Orientation
and in-sphere predicates use floating-point filters with an exact rational
fallback. When the point set restricted to each hull facet has a unique 2D
Delaunay triangulation, the hull faces of the result coincide with those
triangulations, which is how the slab builder guarantees conformity with
prescribed boundary meshes.
"""
from __future__ import annotations

from fractions import Fraction
from math import sqrt as math_sqrt

import numpy as np

from .errors import InputError

__all__ = ["delaunay_in_box", "orient3d", "insphere"]

# Conservative static filter constants (relative to the term permanents).
_O3D_BOUND = 1e-14
_ISP_BOUND = 1e-14


def _sign(x) -> int:
    return int(x > 0) - int(x < 0)


def orient3d(a, b, c, d) -> int:
    """Sign of det[b-a, c-a, d-a]; positive for a positively oriented tet."""
    u0, u1, u2 = b[0] - a[0], b[1] - a[1], b[2] - a[2]
    v0, v1, v2 = c[0] - a[0], c[1] - a[1], c[2] - a[2]
    w0, w1, w2 = d[0] - a[0], d[1] - a[1], d[2] - a[2]
    det = (u0 * (v1 * w2 - v2 * w1)
           - u1 * (v0 * w2 - v2 * w0)
           + u2 * (v0 * w1 - v1 * w0))
    perm = (abs(u0) * (abs(v1 * w2) + abs(v2 * w1))
            + abs(u1) * (abs(v0 * w2) + abs(v2 * w0))
            + abs(u2) * (abs(v0 * w1) + abs(v1 * w0)))
    if abs(det) > _O3D_BOUND * perm:
        return _sign(det)
    F = Fraction
    u = (F(b[0]) - F(a[0]), F(b[1]) - F(a[1]), F(b[2]) - F(a[2]))
    v = (F(c[0]) - F(a[0]), F(c[1]) - F(a[1]), F(c[2]) - F(a[2]))
    w = (F(d[0]) - F(a[0]), F(d[1]) - F(a[1]), F(d[2]) - F(a[2]))
    det = (u[0] * (v[1] * w[2] - v[2] * w[1])
           - u[1] * (v[0] * w[2] - v[2] * w[0])
           + u[2] * (v[0] * w[1] - v[1] * w[0]))
    return _sign(det)


def _insphere_exact(a, b, c, d, e):
    F = Fraction
    rows = []
    for p in (a, b, c, d):
        x = F(p[0]) - F(e[0])
        y = F(p[1]) - F(e[1])
        z = F(p[2]) - F(e[2])
        rows.append((x, y, z, x * x + y * y + z * z))
    (a0, a1, a2, a3), (b0, b1, b2, b3), (c0, c1, c2, c3), (d0, d1, d2, d3) = rows
    ab = a0 * b1 - b0 * a1
    ac = a0 * c1 - c0 * a1
    ad = a0 * d1 - d0 * a1
    bc = b0 * c1 - c0 * b1
    bd = b0 * d1 - d0 * b1
    cd = c0 * d1 - d0 * c1
    abc = a2 * bc - b2 * ac + c2 * ab
    abd = a2 * bd - b2 * ad + d2 * ab
    acd = a2 * cd - c2 * ad + d2 * ac
    bcd = b2 * cd - c2 * bd + d2 * bc
    det = a3 * bcd - b3 * acd + c3 * abd - d3 * abc
    return _sign(det)


def insphere(a, b, c, d, e) -> int:
    """Positive iff e is strictly inside the circumsphere of the positively
    oriented tet (a, b, c, d).

    Two-tier filter: a coarse magnitude gate (the squared-distance lifts
    bound every determinant term) settles the common case, the full term
    permanent the borderline ones, and exact rational arithmetic the rest.
    """
    a0 = a[0] - e[0]
    a1 = a[1] - e[1]
    a2 = a[2] - e[2]
    b0 = b[0] - e[0]
    b1 = b[1] - e[1]
    b2 = b[2] - e[2]
    c0 = c[0] - e[0]
    c1 = c[1] - e[1]
    c2 = c[2] - e[2]
    d0 = d[0] - e[0]
    d1 = d[1] - e[1]
    d2 = d[2] - e[2]
    a3 = a0 * a0 + a1 * a1 + a2 * a2
    b3 = b0 * b0 + b1 * b1 + b2 * b2
    c3 = c0 * c0 + c1 * c1 + c2 * c2
    d3 = d0 * d0 + d1 * d1 + d2 * d2

    ab = a0 * b1 - b0 * a1
    ac = a0 * c1 - c0 * a1
    ad = a0 * d1 - d0 * a1
    bc = b0 * c1 - c0 * b1
    bd = b0 * d1 - d0 * b1
    cd = c0 * d1 - d0 * c1
    abc = a2 * bc - b2 * ac + c2 * ab
    abd = a2 * bd - b2 * ad + d2 * ab
    acd = a2 * cd - c2 * ad + d2 * ac
    bcd = b2 * cd - c2 * bd + d2 * bc
    det = a3 * bcd - b3 * acd + c3 * abd - d3 * abc

    m = a3 if a3 > b3 else b3
    if c3 > m:
        m = c3
    if d3 > m:
        m = d3
    # |every term| <= 2 m^(5/2); 24 terms, so 1e-12*m^2.5 clears the sum's
    # roundoff by orders of magnitude.
    if abs(det) > 1e-12 * m * m * math_sqrt(m):
        return _sign(det)

    abp = abs(a0 * b1) + abs(b0 * a1)
    acp = abs(a0 * c1) + abs(c0 * a1)
    adp = abs(a0 * d1) + abs(d0 * a1)
    bcp = abs(b0 * c1) + abs(c0 * b1)
    bdp = abs(b0 * d1) + abs(d0 * b1)
    cdp = abs(c0 * d1) + abs(d0 * c1)
    az, bz, cz, dz = abs(a2), abs(b2), abs(c2), abs(d2)
    perm = (a3 * (bz * cdp + cz * bdp + dz * bcp)
            + b3 * (az * cdp + cz * adp + dz * acp)
            + c3 * (az * bdp + bz * adp + dz * abp)
            + d3 * (az * bcp + bz * acp + cz * abp))
    if abs(det) > _ISP_BOUND * perm:
        return _sign(det)
    return _insphere_exact(a, b, c, d, e)


# Faces of tet (p0..p3): slot i omits vertex i, ordered so the omitted
# vertex lies on the face's positive side (orient3d(face, omitted) > 0).
_FACE_SLOTS = ((1, 3, 2), (0, 2, 3), (0, 3, 1), (0, 1, 2))

# Kuhn split of the seed box; corners indexed bit-wise (x<<2 | y<<1 | z).
# Path simplices 0 -> 7, odd axis permutations swap two vertices so every
# seed tet is positively oriented.
_BOX_TETS = [(0, 4, 6, 7), (0, 4, 7, 5), (0, 2, 7, 6),
             (0, 2, 3, 7), (0, 1, 5, 7), (0, 1, 7, 3)]


def _key3(a, b, c):
    if a > b:
        a, b = b, a
    if b > c:
        b, c = c, b
        if a > b:
            a, b = b, a
    return (a, b, c)


def _face_keys(tet):
    p0, p1, p2, p3 = tet
    return (_key3(p1, p3, p2), _key3(p0, p2, p3), _key3(p0, p3, p1), _key3(p0, p1, p2))


class _Delaunay3:
    def __init__(self, coords):
        self.coords = coords
        self.tets: list = []        # ordered 4-tuples (positively oriented)
        self.faces: list = []       # cached sorted face keys per tet
        self.adj: dict = {}         # face key -> [tet ids]
        self.hint = 0

    def _create(self, a, b, c, d) -> int:
        ti = len(self.tets)
        tet = (a, b, c, d)
        keys = _face_keys(tet)
        self.tets.append(tet)
        self.faces.append(keys)
        adj = self.adj
        for key in keys:
            if key in adj:
                adj[key].append(ti)
            else:
                adj[key] = [ti]
        self.hint = ti
        return ti

    def _delete(self, ti):
        adj = self.adj
        for key in self.faces[ti]:
            lst = adj[key]
            lst.remove(ti)
            if not lst:
                del adj[key]
        self.tets[ti] = None
        self.faces[ti] = None

    def _neighbor(self, ti, key):
        for other in self.adj.get(key, ()):
            if other != ti:
                return other
        return None

    def seed_box(self, corner_ids):
        co = self.coords
        for a, b, c, d in _BOX_TETS:
            ids = (corner_ids[a], corner_ids[b], corner_ids[c], corner_ids[d])
            if orient3d(co[ids[0]], co[ids[1]], co[ids[2]], co[ids[3]]) <= 0:
                raise InputError("degenerate seed box")
            self._create(*ids)

    def locate(self, p):
        co = self.coords
        tets = self.tets
        ti = self.hint
        if tets[ti] is None:
            ti = next(i for i, t in enumerate(tets) if t is not None)
        for _ in range(4 * len(tets) + 32):
            tet = tets[ti]
            keys = self.faces[ti]
            moved = False
            for slot, (i, j, k) in enumerate(_FACE_SLOTS):
                if orient3d(co[tet[i]], co[tet[j]], co[tet[k]], p) < 0:
                    nxt = self._neighbor(ti, keys[slot])
                    if nxt is None:
                        raise InputError("point lies outside the seeded box")
                    ti = nxt
                    moved = True
                    break
            if not moved:
                return ti
        for ti, tet in enumerate(tets):            # deterministic fallback scan
            if tet is None:
                continue
            if all(orient3d(co[tet[i]], co[tet[j]], co[tet[k]], p) >= 0
                   for i, j, k in _FACE_SLOTS):
                return ti
        raise InputError("point location failed")

    def insert(self, pid):
        co = self.coords
        p = co[pid]
        t0 = self.locate(p)
        # Cavity: flood tets whose open circumball contains p.
        cavity = {t0}
        stack = [t0]
        tested = {t0: True}
        while stack:
            ti = stack.pop()
            for key in self.faces[ti]:
                nb = self._neighbor(ti, key)
                if nb is None or nb in cavity:
                    continue
                hit = tested.get(nb)
                if hit is None:
                    q = self.tets[nb]
                    hit = insphere(co[q[0]], co[q[1]], co[q[2]], co[q[3]], p) > 0
                    tested[nb] = hit
                if hit:
                    cavity.add(nb)
                    stack.append(nb)
        # Oriented cavity boundary faces (cavity interior on the positive
        # side). Interior boundary faces are strictly visible from p (the
        # Delaunay cavity is star-shaped and a coplanar interior face would
        # have pulled its neighbor into the cavity), so only hull faces need
        # the visibility test, where a coplanar face is being split in-plane.
        boundary = []
        for ti in cavity:
            tet = self.tets[ti]
            keys = self.faces[ti]
            for slot, (i, j, k) in enumerate(_FACE_SLOTS):
                nb = self._neighbor(ti, keys[slot])
                if nb is None:
                    boundary.append((tet[i], tet[j], tet[k], True))
                elif nb not in cavity:
                    boundary.append((tet[i], tet[j], tet[k], False))
        for ti in sorted(cavity):
            self._delete(ti)
        made = 0
        for (i, j, k, on_hull) in boundary:
            if on_hull:
                side = orient3d(co[i], co[j], co[k], p)
                if side == 0:
                    continue
                if side < 0:
                    raise InputError("cavity is not star-shaped (predicate inconsistency)")
            self._create(i, j, k, pid)
            made += 1
        if made == 0:
            raise InputError("insertion produced no tets (duplicate point?)")

    def alive(self):
        return np.array([t for t in self.tets if t is not None], dtype=np.int64)

    def hull_faces(self):
        return [key for key, lst in self.adj.items() if len(lst) == 1]


def delaunay_in_box(points, corner_ids, insert_order=None):
    """Delaunay tetrahedralization of points in the box spanned by 8 corners.

    points: (N, 3) array; corner_ids: indices of the box corners ordered
    bit-wise by (x, y, z) min/max. All other points must lie inside or on
    the box hull. Returns (tets, hull_faces): positively oriented (N, 4)
    index rows and the sorted-triple hull facets.
    """
    pts = np.asarray(points, dtype=float)
    coords = [tuple(map(float, p)) for p in pts]
    dt = _Delaunay3(coords)
    dt.seed_box(list(corner_ids))
    corner_set = set(int(c) for c in corner_ids)
    if insert_order is None:
        insert_order = range(len(coords))
    for pid in insert_order:
        if int(pid) in corner_set:
            continue
        dt.insert(int(pid))
    return dt.alive(), dt.hull_faces()
