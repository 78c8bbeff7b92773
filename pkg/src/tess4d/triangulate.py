"""Conforming triangulation of an axis-aligned rectangle with a fixed boundary polyline.

The boundary polyline (counter-clockwise, every point exactly on the rectangle
perimeter) must appear verbatim as edges of the output; optional interior
points become vertices. The triangulation is built incrementally: the four
rectangle corners seed two triangles, remaining points are inserted one at a
time (split + Lawson flips), so boundary segments are never lost and the
covered region is exactly the rectangle at every step.

Point coordinates are normalized internally by a single uniform scale (the
longer rectangle extent maps to [0,1]), which preserves the Delaunay
property in the rectangle's true metric. Orientation and in-circle
predicates use a floating-point filter with an exact fallback (rational
arithmetic on the binary float values), so collinear boundary chains are
handled without tolerances. With no cocircular ties the result is the
unique Delaunay triangulation of the point set.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConstraintRecoveryError, InputError

__all__ = ["PlanarDomain", "Triangulation2", "triangulate_conforming"]

# Static filter constants, (3 + 16u)u and (10 + 96u)u for u = 2^-53.
_O2D_BOUND = 3.3306690738754716e-16
_IC_BOUND = 1.1102230246251577e-15

_DUP_TOL = 1e-14


@dataclass(frozen=True)
class PlanarDomain:
    """Rectangle with a closed CCW boundary polyline and optional interior points.

    bounds is (xmin, xmax, ymin, ymax). Boundary points must lie exactly on
    the perimeter (including all four corners); interior points strictly
    inside. Ids are caller-defined stable identifiers carried to the output.
    """

    bounds: tuple[float, float, float, float]
    boundary: np.ndarray
    boundary_ids: np.ndarray
    interior: np.ndarray
    interior_ids: np.ndarray

    @staticmethod
    def create(bounds, boundary, boundary_ids, interior=None, interior_ids=None) -> "PlanarDomain":
        boundary = np.asarray(boundary, dtype=float).reshape(-1, 2)
        boundary_ids = np.asarray(boundary_ids, dtype=np.int64).reshape(-1)
        if interior is None:
            interior = np.zeros((0, 2))
        interior = np.asarray(interior, dtype=float).reshape(-1, 2)
        if interior_ids is None:
            interior_ids = np.zeros(len(interior), dtype=np.int64)
        interior_ids = np.asarray(interior_ids, dtype=np.int64).reshape(-1)
        return PlanarDomain(tuple(float(v) for v in bounds), boundary, boundary_ids,
                            interior, interior_ids)


@dataclass
class Triangulation2:
    """Output triangulation: input points (ids preserved) plus flagged Steiner points.

    Triangles are CCW index triples into ``points``; the list is normalized
    (smallest vertex first per triangle, rows sorted) so identical input
    yields an identical triangle list.
    """

    points: np.ndarray
    point_ids: np.ndarray
    steiner: np.ndarray
    boundary_steiner: np.ndarray
    triangles: np.ndarray

    @property
    def has_boundary_steiner(self) -> bool:
        return bool(self.boundary_steiner.any())


def _sign(x) -> int:
    return int(x > 0) - int(x < 0)


def orient2d(ax, ay, bx, by, cx, cy) -> int:
    """Sign of the doubled signed area of (a, b, c); exact."""
    detleft = (ax - cx) * (by - cy)
    detright = (ay - cy) * (bx - cx)
    det = detleft - detright
    detsum = abs(detleft) + abs(detright)
    if abs(det) >= _O2D_BOUND * detsum:
        return _sign(det)
    F = Fraction
    det = (F(ax) - F(cx)) * (F(by) - F(cy)) - (F(ay) - F(cy)) * (F(bx) - F(cx))
    return _sign(det)


def incircle(ax, ay, bx, by, cx, cy, dx, dy) -> int:
    """Positive iff d is strictly inside the circumcircle of CCW (a, b, c); exact."""
    adx = ax - dx
    ady = ay - dy
    bdx = bx - dx
    bdy = by - dy
    cdx = cx - dx
    cdy = cy - dy

    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    alift = adx * adx + ady * ady
    cdxady = cdx * ady
    adxcdy = adx * cdy
    blift = bdx * bdx + bdy * bdy
    adxbdy = adx * bdy
    bdxady = bdx * ady
    clift = cdx * cdx + cdy * cdy

    det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * alift
                 + (abs(cdxady) + abs(adxcdy)) * blift
                 + (abs(adxbdy) + abs(bdxady)) * clift)
    if abs(det) >= _IC_BOUND * permanent:
        return _sign(det)

    F = Fraction
    adx = F(ax) - F(dx)
    ady = F(ay) - F(dy)
    bdx = F(bx) - F(dx)
    bdy = F(by) - F(dy)
    cdx = F(cx) - F(dx)
    cdy = F(cy) - F(dy)
    det = ((adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
           + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
           + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady))
    return _sign(det)


class _Triangulator:
    """Incremental Delaunay triangulation of points inside a seeded rectangle."""

    def __init__(self, coords):
        # coords: list of (x, y); grows only when Steiner points are added.
        self.coords = coords
        self.tri_v: list = []          # triangle id -> [a, b, c] or None
        self.edge_map: dict = {}       # directed edge (a, b) -> triangle id
        self.hint = 0

    # -- mesh surgery ------------------------------------------------------

    def _create(self, a, b, c) -> int:
        ti = len(self.tri_v)
        self.tri_v.append([a, b, c])
        em = self.edge_map
        em[(a, b)] = ti
        em[(b, c)] = ti
        em[(c, a)] = ti
        self.hint = ti
        return ti

    def _delete(self, ti):
        a, b, c = self.tri_v[ti]
        del self.edge_map[(a, b)]
        del self.edge_map[(b, c)]
        del self.edge_map[(c, a)]
        self.tri_v[ti] = None

    def seed_rectangle(self, c00, c10, c11, c01):
        self._create(c00, c10, c11)
        self._create(c00, c11, c01)

    # -- predicates on vertex indices ---------------------------------------

    def _orient(self, i, j, k) -> int:
        co = self.coords
        return orient2d(co[i][0], co[i][1], co[j][0], co[j][1], co[k][0], co[k][1])

    def _incircle(self, i, j, k, l) -> int:
        co = self.coords
        return incircle(co[i][0], co[i][1], co[j][0], co[j][1],
                        co[k][0], co[k][1], co[l][0], co[l][1])

    # -- point location ------------------------------------------------------

    def _alive(self):
        return (ti for ti, v in enumerate(self.tri_v) if v is not None)

    def locate(self, p):
        """Walk to the triangle containing point index p.

        Returns (triangle id, list of signs of the three CCW edge orientations).
        """
        ti = self.hint
        if self.tri_v[ti] is None:
            ti = next(self._alive())
        max_steps = 4 * len(self.tri_v) + 16
        for _ in range(max_steps):
            a, b, c = self.tri_v[ti]
            oa = self._orient(a, b, p)
            if oa < 0:
                nxt = self.edge_map.get((b, a))
                if nxt is None:
                    break
                ti = nxt
                continue
            ob = self._orient(b, c, p)
            if ob < 0:
                nxt = self.edge_map.get((c, b))
                if nxt is None:
                    break
                ti = nxt
                continue
            oc = self._orient(c, a, p)
            if oc < 0:
                nxt = self.edge_map.get((a, c))
                if nxt is None:
                    break
                ti = nxt
                continue
            return ti, (oa, ob, oc)
        # Degenerate walk; scan exhaustively (deterministic order).
        for ti in self._alive():
            a, b, c = self.tri_v[ti]
            oa = self._orient(a, b, p)
            ob = self._orient(b, c, p)
            oc = self._orient(c, a, p)
            if oa >= 0 and ob >= 0 and oc >= 0:
                return ti, (oa, ob, oc)
        raise InputError("point lies outside the rectangle domain")

    # -- insertion -----------------------------------------------------------

    def insert(self, p):
        ti, (oa, ob, oc) = self.locate(p)
        a, b, c = self.tri_v[ti]
        zeros = (oa == 0) + (ob == 0) + (oc == 0)
        if zeros >= 2:
            raise InputError("duplicate point (coincides with an existing vertex)")
        if zeros == 0:
            self._delete(ti)
            self._create(a, b, p)
            self._create(b, c, p)
            self._create(c, a, p)
            self._legalize(a, b, p)
            self._legalize(b, c, p)
            self._legalize(c, a, p)
            return
        # On an edge: rotate so the zero edge is (a, b).
        if ob == 0:
            a, b, c = b, c, a
        elif oc == 0:
            a, b, c = c, a, b
        t2 = self.edge_map.get((b, a))
        self._delete(ti)
        self._create(a, p, c)
        self._create(p, b, c)
        if t2 is not None:
            d = self._apex(t2, b, a)
            self._delete(t2)
            self._create(b, p, d)
            self._create(p, a, d)
            self._legalize(a, d, p)
            self._legalize(d, b, p)
        self._legalize(c, a, p)
        self._legalize(b, c, p)

    def _apex(self, ti, u, v):
        """Vertex of triangle ti opposite the directed edge (u, v)."""
        tv = self.tri_v[ti]
        for k in range(3):
            if tv[k] != u and tv[k] != v:
                return tv[k]
        raise AssertionError("degenerate triangle")

    def _legalize(self, u, v, p):
        """Lawson legalization of edge (u, v) opposite the new vertex p."""
        stack = [(u, v)]
        while stack:
            u, v = stack.pop()
            t1 = self.edge_map.get((u, v))
            if t1 is None or self._apex(t1, u, v) != p:
                continue
            t2 = self.edge_map.get((v, u))
            if t2 is None:
                continue
            w = self._apex(t2, v, u)
            if self._incircle(u, v, p, w) > 0:
                self._delete(t1)
                self._delete(t2)
                self._create(u, w, p)
                self._create(w, v, p)
                stack.append((u, w))
                stack.append((w, v))

    # -- constrained segments -------------------------------------------------

    def has_edge(self, a, b) -> bool:
        return (a, b) in self.edge_map or (b, a) in self.edge_map

    def recover_segment(self, a, b, max_flips=10000) -> bool:
        """Restore segment (a, b) by flipping crossing edges; True on success."""
        co = self.coords

        def crossing_edges():
            out = []
            for (u, v) in self.edge_map:
                if u > v or u in (a, b) or v in (a, b):
                    continue
                if (orient2d(*co[a], *co[b], *co[u]) * orient2d(*co[a], *co[b], *co[v]) < 0
                        and orient2d(*co[u], *co[v], *co[a]) * orient2d(*co[u], *co[v], *co[b]) < 0):
                    out.append((u, v))
            return out

        for _ in range(max_flips):
            if self.has_edge(a, b):
                return True
            flipped = False
            for (u, v) in crossing_edges():
                t1 = self.edge_map.get((u, v))
                t2 = self.edge_map.get((v, u))
                if t1 is None or t2 is None:
                    continue
                p = self._apex(t1, u, v)
                q = self._apex(t2, v, u)
                # Flip only when the quad (u, q, v, p) is strictly convex.
                if (orient2d(*co[p], *co[q], *co[u]) * orient2d(*co[p], *co[q], *co[v])) < 0:
                    self._delete(t1)
                    self._delete(t2)
                    self._create(u, q, p)
                    self._create(q, v, p)
                    flipped = True
                    break
            if not flipped:
                return self.has_edge(a, b)
        return self.has_edge(a, b)

    def triangles(self) -> np.ndarray:
        tris = [v for v in self.tri_v if v is not None]
        out = np.asarray(tris, dtype=np.int64)
        roll = np.argmin(out, axis=1)
        rows = np.arange(len(out))
        out = np.stack([out[rows, roll], out[rows, (roll + 1) % 3], out[rows, (roll + 2) % 3]], axis=1)
        order = np.lexsort((out[:, 2], out[:, 1], out[:, 0]))
        return out[order]


def _perimeter_position(x, y, bounds):
    """Arc position of an on-perimeter point, CCW from (xmin, ymin); None if off."""
    xmin, xmax, ymin, ymax = bounds
    w = xmax - xmin
    h = ymax - ymin
    if y == ymin and xmin <= x <= xmax:
        return x - xmin
    if x == xmax and ymin <= y <= ymax:
        return w + (y - ymin)
    if y == ymax and xmin <= x <= xmax:
        return w + h + (xmax - x)
    if x == xmin and ymin < y <= ymax:
        return 2 * w + h + (ymax - y)
    return None


def _validate_domain(domain: PlanarDomain):
    xmin, xmax, ymin, ymax = domain.bounds
    if not (np.isfinite(domain.bounds).all() and xmin < xmax and ymin < ymax):
        raise InputError(f"degenerate rectangle bounds {domain.bounds}")
    bpts = domain.boundary
    if len(bpts) < 4:
        raise InputError("boundary polyline needs at least the 4 rectangle corners")

    positions = []
    for x, y in bpts:
        pos = _perimeter_position(float(x), float(y), domain.bounds)
        if pos is None:
            raise InputError(f"boundary point ({x}, {y}) is not on the rectangle perimeter")
        positions.append(pos)
    positions = np.asarray(positions)

    # Simple + closed + CCW: perimeter positions strictly increase cyclically.
    start = int(np.argmin(positions))
    rolled = np.roll(positions, -start)
    if np.any(np.diff(rolled) <= 0):
        raise InputError("boundary polyline is not a simple CCW traversal of the perimeter")
    corners = {(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)}
    present = {(float(x), float(y)) for x, y in bpts}
    if not corners <= present:
        raise InputError("boundary polyline must include all four rectangle corners")

    for x, y in domain.interior:
        if not (xmin < x < xmax and ymin < y < ymax):
            raise InputError(f"interior point ({x}, {y}) is not strictly inside the rectangle")


def _normalize(points, bounds):
    """Translate to the origin and scale uniformly (isotropic: keeps Delaunay)."""
    xmin, xmax, ymin, ymax = bounds
    scale = max(xmax - xmin, ymax - ymin)
    out = np.empty_like(points)
    out[:, 0] = (points[:, 0] - xmin) / scale
    out[:, 1] = (points[:, 1] - ymin) / scale
    return out


def triangulate_conforming(domain: PlanarDomain) -> Triangulation2:
    """Triangulate the rectangle so every boundary segment appears verbatim.

    All input points become vertices; no boundary points are created. New
    interior points are only produced by segment recovery (flagged Steiner),
    which cannot trigger for perimeter-ordered boundary input but is kept as
    a guard.

    Raises InputError for a non-simple/misordered boundary, off-domain
    points, or duplicates closer than 1e-14 of the rectangle extent.
    """
    _validate_domain(domain)
    npts_b = len(domain.boundary)
    all_pts = np.vstack([domain.boundary, domain.interior])
    norm = _normalize(all_pts, domain.bounds)

    d2 = np.sum((norm[:, None, :] - norm[None, :, :]) ** 2, axis=2)
    np.fill_diagonal(d2, np.inf)
    if d2.min() < _DUP_TOL * _DUP_TOL:
        i, j = np.unravel_index(int(np.argmin(d2)), d2.shape)
        raise InputError(f"duplicate points at rows {i} and {j}")

    coords = [(float(p[0]), float(p[1])) for p in norm]
    tri = _Triangulator(coords)

    xmin, xmax, ymin, ymax = domain.bounds
    scale = max(xmax - xmin, ymax - ymin)
    cx = (xmax - xmin) / scale          # same expression as the normalization,
    cy = (ymax - ymin) / scale          # so corner coordinates match exactly
    corner_keys = [(0.0, 0.0), (cx, 0.0), (cx, cy), (0.0, cy)]
    corner_target = {k: None for k in corner_keys}
    for i in range(npts_b):
        key = coords[i]
        if key in corner_target and corner_target[key] is None:
            corner_target[key] = i
    c00, c10, c11, c01 = (corner_target[k] for k in corner_keys)
    if None in (c00, c10, c11, c01):
        raise InputError("rectangle corners missing after normalization")

    tri.seed_rectangle(c00, c10, c11, c01)
    corner_set = {c00, c10, c11, c01}
    for i in range(len(coords)):
        if i not in corner_set:
            tri.insert(i)

    # Conformity: each consecutive boundary pair must be an edge.
    steiner_flags = [False] * len(coords)
    boundary_flags = [False] * len(coords)
    pending = [(i, (i + 1) % npts_b) for i in range(npts_b)]
    guard = 0
    while pending:
        a, b = pending.pop()
        if tri.has_edge(a, b):
            continue
        if tri.recover_segment(a, b):
            continue
        guard += 1
        if guard > 4 * npts_b:
            raise ConstraintRecoveryError(f"segment ({a}, {b}) not recoverable")
        # Midpoint split: the new point is a Steiner vertex on the boundary.
        mx = 0.5 * (coords[a][0] + coords[b][0])
        my = 0.5 * (coords[a][1] + coords[b][1])
        coords.append((mx, my))
        m = len(coords) - 1
        steiner_flags.append(True)
        boundary_flags.append(True)
        tri.insert(m)
        pending.append((a, m))
        pending.append((m, b))

    n_steiner = len(coords) - len(all_pts)
    points = all_pts
    if n_steiner:
        extra = np.asarray(coords[len(all_pts):], dtype=float)
        extra[:, 0] = xmin + extra[:, 0] * scale
        extra[:, 1] = ymin + extra[:, 1] * scale
        points = np.vstack([all_pts, extra])

    point_ids = np.concatenate([domain.boundary_ids, domain.interior_ids,
                                np.full(n_steiner, -1, dtype=np.int64)])
    return Triangulation2(
        points=points,
        point_ids=point_ids,
        steiner=np.asarray(steiner_flags, dtype=bool),
        boundary_steiner=np.asarray(boundary_flags, dtype=bool),
        triangles=tri.triangles(),
    )
