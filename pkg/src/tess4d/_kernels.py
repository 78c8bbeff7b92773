"""Hot numeric kernels: batch tet measures and batch tet-hyperplane slicing.

Each kernel has a numba @njit implementation and a pure-numpy fallback with
identical semantics. Setting the environment variable TESS4D_NO_NUMBA=1
before import selects the numpy path globally; callers can also force an
engine per call. ``benchmarks/bench_kernels.py`` compares the two.
"""
from __future__ import annotations

import math
import os

import numpy as np

NUMBA_ENV_FLAG = "TESS4D_NO_NUMBA"

if os.environ.get(NUMBA_ENV_FLAG, "0") not in ("", "0"):
    _HAVE_NUMBA = False
else:
    try:
        from numba import njit
        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover
        _HAVE_NUMBA = False

if not _HAVE_NUMBA:
    def njit(*args, **kwargs):  # no-op decorator so both paths stay importable
        def wrap(fn):
            return fn
        if args and callable(args[0]):
            return args[0]
        return wrap


def active_engine() -> str:
    return "numba" if _HAVE_NUMBA else "numpy"


def available_engines():
    return ("numba", "numpy") if _HAVE_NUMBA else ("numpy",)


def _resolve(engine):
    eng = engine or active_engine()
    if eng not in ("numba", "numpy"):
        raise ValueError(f"unknown engine {engine!r}")
    if eng == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("numba engine requested but numba is unavailable")
    return eng


# ---------------------------------------------------------------------------
# Tet 3-measure. det(E E^T) over the 3x4 edge matrix expands (Cauchy-Binet)
# into the sum of the squared 3x3 minors of E, which avoids the cancellation
# of forming the Gram matrix first: sqrt(m0^2 + m1^2 + m2^2 + m3^2) / 6.
# Totals use compensated summation.

def _det3(a0, a1, a2, b0, b1, b2, c0, c1, c2):
    return a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) + a2 * (b0 * c1 - b1 * c0)


def _tet_measures_np(verts, tets):
    e = verts[tets[:, 1:]] - verts[tets[:, :1]]
    sq = np.zeros(len(tets))
    cols = np.arange(4)
    for k in range(4):
        s = e[:, :, cols != k]
        mk = _det3(s[:, 0, 0], s[:, 0, 1], s[:, 0, 2],
                   s[:, 1, 0], s[:, 1, 1], s[:, 1, 2],
                   s[:, 2, 0], s[:, 2, 1], s[:, 2, 2])
        sq += mk * mk
    vols = np.sqrt(sq) / 6.0
    return vols, math.fsum(vols)


@njit(cache=True)
def _tet_measures_nb(verts, tets):  # pragma: no cover - exercised via dispatch
    m = tets.shape[0]
    vols = np.empty(m, np.float64)
    total = 0.0
    comp = 0.0
    e = np.empty((3, 4), np.float64)
    for i in range(m):
        i0 = tets[i, 0]
        for r in range(3):
            ir = tets[i, r + 1]
            for x in range(4):
                e[r, x] = verts[ir, x] - verts[i0, x]
        sq = 0.0
        for k in range(4):
            # columns other than k, in ascending order
            if k == 0:
                a, b, c = 1, 2, 3
            elif k == 1:
                a, b, c = 0, 2, 3
            elif k == 2:
                a, b, c = 0, 1, 3
            else:
                a, b, c = 0, 1, 2
            mk = (e[0, a] * (e[1, b] * e[2, c] - e[1, c] * e[2, b])
                  - e[0, b] * (e[1, a] * e[2, c] - e[1, c] * e[2, a])
                  + e[0, c] * (e[1, a] * e[2, b] - e[1, b] * e[2, a]))
            sq += mk * mk
        v = math.sqrt(sq) / 6.0
        vols[i] = v
        # Neumaier compensation
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return vols, total + comp


def tet_measures(verts, tets, engine=None):
    """Per-tet 3-measures and their compensated sum."""
    verts = np.ascontiguousarray(verts, dtype=np.float64)
    tets = np.ascontiguousarray(tets, dtype=np.int64)
    if len(tets) == 0:
        return np.zeros(0), 0.0
    if _resolve(engine) == "numba":
        return _tet_measures_nb(verts, tets)
    return _tet_measures_np(verts, tets)


# ---------------------------------------------------------------------------
# Batch tet-hyperplane slicing. Side bit is 1 when the signed distance is
# <= 0, so a vertex exactly on the plane produces collapsed (harmless)
# points instead of suppressing the neighbouring intersections entirely.

def _side_bits(d):
    return d <= 0.0


def _slice_tets_np(verts, tets, nvec, cvec, case_edges, edge_pts, shapes):
    d = verts @ nvec - float(cvec @ nvec)
    bits = _side_bits(d)
    b = bits[tets]
    codes = (b[:, 0] + 2 * b[:, 1] + 4 * b[:, 2] + 8 * b[:, 3]).astype(np.uint8)
    sel = np.nonzero(shapes[codes] != 0)[0].astype(np.int64)
    if len(sel) == 0:
        return sel, codes[sel], np.zeros((0, 4, 4)), np.zeros((0, 4, 2), np.int64)
    rows = case_edges[codes[sel]]                      # (K, 4) edge slots
    conn = tets[sel]                                   # (K, 4)
    a = np.take_along_axis(conn, edge_pts[rows, 0], axis=1)
    bidx = np.take_along_axis(conn, edge_pts[rows, 1], axis=1)
    da = d[a]
    db = d[bidx]
    alpha = da / (da - db)
    va = verts[a]
    vb = verts[bidx]
    pts = va + alpha[:, :, None] * (vb - va)
    # an on-plane endpoint must be reproduced bit-exactly so collapsed
    # primitives have exactly zero area
    snap = alpha == 1.0
    pts[snap] = vb[snap]
    eids = np.stack([a, bidx], axis=2)
    return sel, codes[sel], pts, eids


@njit(cache=True)
def _slice_tets_nb(verts, tets, nvec, cvec, case_edges, edge_pts, shapes):  # pragma: no cover
    m = tets.shape[0]
    cn = cvec[0] * nvec[0] + cvec[1] * nvec[1] + cvec[2] * nvec[2] + cvec[3] * nvec[3]
    codes = np.empty(m, np.uint8)
    count = 0
    for i in range(m):
        r = 0
        for j in range(4):
            vid = tets[i, j]
            d = (verts[vid, 0] * nvec[0] + verts[vid, 1] * nvec[1]
                 + verts[vid, 2] * nvec[2] + verts[vid, 3] * nvec[3] - cn)
            if d <= 0.0:
                r |= 1 << j
        codes[i] = r
        if shapes[r] != 0:
            count += 1
    sel = np.empty(count, np.int64)
    out_codes = np.empty(count, np.uint8)
    pts = np.empty((count, 4, 4), np.float64)
    eids = np.empty((count, 4, 2), np.int64)
    k = 0
    for i in range(m):
        r = codes[i]
        if shapes[r] == 0:
            continue
        sel[k] = i
        out_codes[k] = r
        for slot in range(4):
            e = case_edges[r, slot]
            a = tets[i, edge_pts[e, 0]]
            b = tets[i, edge_pts[e, 1]]
            da = (verts[a, 0] * nvec[0] + verts[a, 1] * nvec[1]
                  + verts[a, 2] * nvec[2] + verts[a, 3] * nvec[3] - cn)
            db = (verts[b, 0] * nvec[0] + verts[b, 1] * nvec[1]
                  + verts[b, 2] * nvec[2] + verts[b, 3] * nvec[3] - cn)
            alpha = da / (da - db)
            if alpha == 1.0:
                for x in range(4):
                    pts[k, slot, x] = verts[b, x]
            else:
                for x in range(4):
                    pts[k, slot, x] = verts[a, x] + alpha * (verts[b, x] - verts[a, x])
            eids[k, slot, 0] = a
            eids[k, slot, 1] = b
        k += 1
    return sel, out_codes, pts, eids


def slice_tets_batch(verts, tets, nvec, cvec, case_edges, edge_pts, shapes, engine=None):
    """Intersect every tet with the hyperplane (nvec, cvec).

    Returns (sel, codes, points4, edge_ids): indices of intersected tets,
    their 4-bit case codes, the 4 slot points in 4D (triangle cases repeat
    slot 2 in slot 3), and the global endpoint ids of each intersected edge.
    """
    verts = np.ascontiguousarray(verts, dtype=np.float64)
    tets = np.ascontiguousarray(tets, dtype=np.int64)
    nvec = np.ascontiguousarray(nvec, dtype=np.float64)
    cvec = np.ascontiguousarray(cvec, dtype=np.float64)
    if len(tets) == 0:
        return (np.zeros(0, np.int64), np.zeros(0, np.uint8),
                np.zeros((0, 4, 4)), np.zeros((0, 4, 2), np.int64))
    args = (verts, tets, nvec, cvec,
            np.ascontiguousarray(case_edges, dtype=np.int64),
            np.ascontiguousarray(edge_pts, dtype=np.int64),
            np.ascontiguousarray(shapes, dtype=np.int64))
    if _resolve(engine) == "numba":
        return _slice_tets_nb(*args)
    return _slice_tets_np(*args)
