"""4D mesh container, topology validation, measures and analytic volume oracles.

A SpacetimeMesh stores 4D vertices (x, y, z, t) with tetrahedra tracing the
moving surface, triangles tracing Edge surfaces, segments tracing Node
curves, and optionally pentatopes. The manifold validator checks the
closed-3-manifold condition (every triangle face of the tet set shared by
exactly two tets, with opposite induced orientations) or its
manifold-with-boundary variant where faces lying entirely at the initial or
final time may be exposed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from . import _kernels
from .errors import InputError

__all__ = [
    "SpacetimeMesh", "ManifoldReport", "VolumeReport",
    "check_manifold", "tet_measure3", "tet_measures", "total_volume",
    "volume_report", "expected_volume", "kuhn_pentatopes",
    "pentatope_boundary_tets", "pentatope_measure4", "unique_boundary_tets",
    "cross4",
]


def _iarr(a, width):
    a = np.asarray(a, dtype=np.int64).reshape(-1, width) if np.size(a) else \
        np.zeros((0, width), dtype=np.int64)
    return a


@dataclass
class SpacetimeMesh:
    vertices: np.ndarray
    tets: np.ndarray = field(default_factory=lambda: np.zeros((0, 4), np.int64))
    tet_tags: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    triangles: np.ndarray = field(default_factory=lambda: np.zeros((0, 3), np.int64))
    tri_tags: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    segments: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), np.int64))
    seg_tags: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    pentatopes: np.ndarray = field(default_factory=lambda: np.zeros((0, 5), np.int64))
    penta_tags: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    steiner: np.ndarray | None = None

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 4)
        self.tets = _iarr(self.tets, 4)
        self.triangles = _iarr(self.triangles, 3)
        self.segments = _iarr(self.segments, 2)
        self.pentatopes = _iarr(self.pentatopes, 5)
        for name in ("tet_tags", "tri_tags", "seg_tags", "penta_tags"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=np.int64).reshape(-1))
        if self.steiner is None:
            self.steiner = np.zeros(len(self.vertices), dtype=bool)
        self.steiner = np.asarray(self.steiner, dtype=bool).reshape(-1)

    @property
    def n_vertices(self):
        return len(self.vertices)

    def validate(self):
        n = self.n_vertices
        for name, arr in (("tets", self.tets), ("triangles", self.triangles),
                          ("segments", self.segments), ("pentatopes", self.pentatopes)):
            if len(arr) == 0:
                continue
            if arr.min() < 0 or arr.max() >= n:
                raise InputError(f"{name} reference out-of-range vertex ids")
            srt = np.sort(arr, axis=1)
            if (srt[:, 1:] == srt[:, :-1]).any():
                raise InputError(f"{name} contain a degenerate element (repeated vertex)")
        for elems, tags, name in ((self.tets, self.tet_tags, "tet"),
                                  (self.triangles, self.tri_tags, "triangle"),
                                  (self.segments, self.seg_tags, "segment"),
                                  (self.pentatopes, self.penta_tags, "pentatope")):
            if len(elems) != len(tags):
                raise InputError(f"{name} tag count mismatch")
        if len(self.steiner) != n:
            raise InputError("steiner flag count mismatch")
        return self


@dataclass
class ManifoldReport:
    passed: bool
    mode: str
    n_faces: int
    n_boundary_faces: int
    offending_faces: list
    orientation_ok: bool

    def __bool__(self):
        return self.passed


# Faces of tet (v0..v3): slot i omits vertex i; the induced boundary
# orientation alternates with i, so total parity = (i + inversions) mod 2.
_TET_FACE_SLOTS = np.array([[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]])


def _tet_faces_with_parity(tets):
    faces = tets[:, _TET_FACE_SLOTS.reshape(-1)].reshape(-1, 3)
    inv = ((faces[:, 0] > faces[:, 1]).astype(np.int64)
           + (faces[:, 0] > faces[:, 2])
           + (faces[:, 1] > faces[:, 2]))
    slot = np.tile(np.arange(4), len(tets))
    parity = (inv + slot) % 2
    return np.sort(faces, axis=1), parity


def check_manifold(mesh: SpacetimeMesh, mode="closed", t_bounds=None) -> ManifoldReport:
    """Verify the 3-manifold adjacency rule over the tet set.

    mode "closed": every face shared by exactly two tets. mode
    "with-boundary": faces whose vertices all lie at t0 or all at tf (from
    t_bounds, default the mesh's t extremes) may be shared by exactly one.
    Shared faces must be induced with opposite orientations. Failures are
    reported, not raised.
    """
    if len(mesh.tets) == 0:
        raise InputError("check_manifold requires a non-empty tet set")
    if mode not in ("closed", "with-boundary"):
        raise InputError(f"unknown manifold mode {mode!r}")
    faces, parity = _tet_faces_with_parity(mesh.tets)
    uniq, inverse, counts = np.unique(faces, axis=0, return_inverse=True, return_counts=True)

    offending = []
    t = mesh.vertices[:, 3]
    if mode == "with-boundary":
        if t_bounds is None:
            t_bounds = (float(t.min()), float(t.max()))
        t0, tf = t_bounds
        face_t = t[uniq]
        exposed_ok = np.all(face_t == t0, axis=1) | np.all(face_t == tf, axis=1)
        bad = (counts > 2) | ((counts == 1) & ~exposed_ok)
        n_boundary = int(((counts == 1) & exposed_ok).sum())
    else:
        bad = counts != 2
        n_boundary = 0
    for idx in np.nonzero(bad)[0][:32]:
        offending.append((tuple(int(v) for v in uniq[idx]), int(counts[idx])))

    # Orientation: each doubly-shared face must appear once with each parity.
    psum = np.bincount(inverse, weights=parity, minlength=len(uniq))
    shared = counts == 2
    orient_ok = bool(np.all(psum[shared] == 1.0))
    if not orient_ok:
        for idx in np.nonzero(shared & (psum != 1.0))[0][:8]:
            offending.append((tuple(int(v) for v in uniq[idx]), "orientation"))

    passed = (len(offending) == 0) and orient_ok and not bad.any()
    return ManifoldReport(passed, mode, len(uniq), n_boundary, offending, orient_ok)


# ---------------------------------------------------------------------------
# Measures

def tet_measure3(p0, p1, p2, p3) -> float:
    """Unsigned 3-volume of a tet embedded in 4D.

    sqrt(det(E E^T))/6 over the 3x4 edge matrix, expanded via Cauchy-Binet
    into the squared 3x3 minors so degenerate directions drop out exactly.
    """
    e = np.stack([np.asarray(p1, dtype=float) - p0,
                  np.asarray(p2, dtype=float) - p0,
                  np.asarray(p3, dtype=float) - p0])
    cols = np.arange(4)
    sq = 0.0
    for k in range(4):
        mk = np.linalg.det(e[:, cols != k])
        sq += mk * mk
    return float(np.sqrt(sq) / 6.0)


def tet_measures(mesh: SpacetimeMesh, engine=None):
    return _kernels.tet_measures(mesh.vertices, mesh.tets, engine=engine)[0]


def total_volume(mesh: SpacetimeMesh, engine=None) -> float:
    return _kernels.tet_measures(mesh.vertices, mesh.tets, engine=engine)[1]


@dataclass
class VolumeReport:
    total: float
    by_tag: dict
    expected: float
    abs_error: float
    rel_error: float

    def __str__(self):
        lines = [f"measured 3-volume : {self.total:.12g}",
                 f"expected 3-volume : {self.expected:.12g}",
                 f"abs error         : {self.abs_error:.6g}",
                 f"rel error         : {self.rel_error:.6g}"]
        for tag in sorted(self.by_tag):
            lines.append(f"  tag {tag:>8d} : {self.by_tag[tag]:.12g}")
        return "\n".join(lines)


def volume_report(mesh: SpacetimeMesh, expected: float, engine=None) -> VolumeReport:
    import math
    vols, total = _kernels.tet_measures(mesh.vertices, mesh.tets, engine=engine)
    by_tag = {}
    for tag in np.unique(mesh.tet_tags):
        by_tag[int(tag)] = math.fsum(vols[mesh.tet_tags == tag])
    abs_err = abs(total - expected)
    rel = abs_err / abs(expected) if expected != 0 else abs_err
    return VolumeReport(total, by_tag, expected, abs_err, rel)


# ---------------------------------------------------------------------------
# Analytic expected volumes. A shell moving over [t0, tf] traces a 3-manifold
# in 4D; a uniformly scaling shell traces a (truncated) cone over the base
# surface, whose lateral 3-volume has the closed forms below. The cap terms
# close the mesh at the extreme times.

def hypercone_sphere(r: float, h: float) -> float:
    return (4.0 * np.pi * r * r / 3.0) * np.sqrt(r * r + h * h)


def hypercone_torus(r: float, R: float, h: float) -> float:
    return (4.0 * np.pi ** 2 * r * R / 3.0) * np.sqrt(R * R + h * h)


def sphere_cap_volume(ell: float, r: float) -> float:
    return ell ** 3 - (4.0 / 3.0) * np.pi * r ** 3


def torus_cap_volume(ell: float, r: float, R: float) -> float:
    return ell ** 3 - 2.0 * np.pi ** 2 * r * r * R


def expected_volume(case: str, caps: str = "closed", *, r0=0.1, rf=0.125,
                    R0=0.4, Rf=0.5, ell=1.0, t0=0.0, tf=1.0) -> float:
    """Total traced 3-volume: box walls + interior shell (+ caps when closed)."""
    if caps not in ("closed", "open"):
        raise InputError(f"caps must be 'closed' or 'open', got {caps!r}")
    dt = tf - t0
    v = 6.0 * ell * ell * dt
    if case == "static-sphere":
        v += 4.0 * np.pi * r0 * r0 * dt
        if caps == "closed":
            v += 2.0 * sphere_cap_volume(ell, r0)
    elif case == "expanding-sphere":
        if rf == r0:
            return expected_volume("static-sphere", caps, r0=r0, ell=ell, t0=t0, tf=tf)
        a = r0 / (rf - r0)
        v += hypercone_sphere(rf, a + 1.0) - hypercone_sphere(r0, a)
        if caps == "closed":
            v += sphere_cap_volume(ell, r0) + sphere_cap_volume(ell, rf)
    elif case == "expanding-torus":
        if Rf == R0:
            v += 4.0 * np.pi ** 2 * r0 * R0 * dt
        else:
            a = R0 / (Rf - R0)
            v += hypercone_torus(rf, Rf, a + 1.0) - hypercone_torus(r0, R0, a)
        if caps == "closed":
            v += torus_cap_volume(ell, r0, R0) + torus_cap_volume(ell, rf, Rf)
    elif case == "box":
        if caps == "closed":
            v += 2.0 * ell ** 3
    else:
        raise InputError(f"unknown analytic case {case!r}")
    return float(v)


# ---------------------------------------------------------------------------
# Pentatopes

def pentatope_boundary_tets(penta) -> np.ndarray:
    """The five vertex-omitting boundary tets, consistently oriented.

    Omitting vertex i contributes sign (-1)^i to the simplicial boundary;
    odd slots swap their first two vertices so the five tets orient the
    boundary consistently (a closed-manifold check on them passes).
    """
    p = np.asarray(penta, dtype=np.int64).reshape(5)
    out = np.empty((5, 4), dtype=np.int64)
    for i in range(5):
        tet = [p[j] for j in range(5) if j != i]
        if i % 2 == 1:
            tet[0], tet[1] = tet[1], tet[0]
        out[i] = tet
    return out


def pentatope_measure4(verts, pentas) -> np.ndarray:
    """Unsigned 4-volumes |det E| / 24 of each pentatope."""
    pentas = _iarr(pentas, 5)
    e = verts[pentas[:, 1:]] - verts[pentas[:, :1]]
    return np.abs(np.linalg.det(e)) / 24.0


def cross4(u, v, w) -> np.ndarray:
    """Generalized cross product: 4-vector orthogonal to u, v and w."""
    m = np.stack([np.asarray(u, dtype=float), np.asarray(v, dtype=float),
                  np.asarray(w, dtype=float)])
    out = np.empty(4)
    cols = np.arange(4)
    sign = 1.0
    for k in range(4):
        sub = m[:, cols != k]
        out[k] = sign * np.linalg.det(sub)
        sign = -sign
    return out


def kuhn_pentatopes(n: int) -> SpacetimeMesh:
    """Kuhn (path) subdivision of [0,1]^4: n^4 tesseracts, 24 pentatopes each.

    Pentatopes chain lattice steps in each axis permutation order, which
    conforms across cell boundaries; total 4-volume is exactly 1.
    """
    if n < 1:
        raise InputError("n must be >= 1")
    axes = np.arange(n + 1) / n
    grid = np.stack(np.meshgrid(axes, axes, axes, axes, indexing="ij"), axis=-1)
    verts = grid.reshape(-1, 4)
    stride = np.array([(n + 1) ** 3, (n + 1) ** 2, (n + 1), 1], dtype=np.int64)

    perms = list(permutations(range(4)))
    cells = np.stack(np.meshgrid(*([np.arange(n)] * 4), indexing="ij"), axis=-1).reshape(-1, 4)
    base = cells @ stride
    pentas = np.empty((len(cells) * 24, 5), dtype=np.int64)
    row = 0
    for perm in perms:
        ids = np.empty((len(cells), 5), dtype=np.int64)
        ids[:, 0] = base
        acc = base.copy()
        for k, axis in enumerate(perm):
            acc = acc + stride[axis]
            ids[:, k + 1] = acc
        pentas[row * len(cells):(row + 1) * len(cells)] = ids
        row += 1
    # Deterministic element order: by cell, then permutation.
    pentas = pentas.reshape(24, len(cells), 5).transpose(1, 0, 2).reshape(-1, 5)
    mesh = SpacetimeMesh(vertices=verts, pentatopes=pentas,
                         penta_tags=np.zeros(len(pentas), dtype=np.int64))
    return mesh.validate()


def unique_boundary_tets(mesh: SpacetimeMesh):
    """Expand pentatopes to boundary tets, deduplicating shared interior faces.

    Tets already present on the mesh are kept first; a tet facet shared by
    two pentatopes is emitted once, tagged by the lower pentatope index.
    """
    tets = [mesh.tets]
    tags = [mesh.tet_tags]
    if len(mesh.pentatopes):
        exp = np.concatenate([pentatope_boundary_tets(p)[None] for p in mesh.pentatopes])
        exp = exp.reshape(-1, 4)
        exp_tags = np.repeat(mesh.penta_tags, 5)
        key = np.sort(exp, axis=1)
        _, first = np.unique(key, axis=0, return_index=True)
        first.sort()
        tets.append(exp[first])
        tags.append(exp_tags[first])
    return np.vstack(tets), np.concatenate(tags)
