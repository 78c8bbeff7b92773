import numpy as np
import pytest

from tess4d.geometry import make_box, make_sphere_in_box, make_torus_in_box


@pytest.fixture(scope="session")
def sphere_geom():
    return make_sphere_in_box(0.1, 0.1, 1.0)


@pytest.fixture(scope="session")
def expanding_sphere_geom():
    return make_sphere_in_box(0.1, 0.125, 1.0)


@pytest.fixture(scope="session")
def torus_geom():
    return make_torus_in_box(0.1, 0.4, 0.125, 0.5, 1.0)


@pytest.fixture(scope="session")
def box_geom():
    return make_box(1.0)


def audit_watertight(geom, tess, tol=1e-10):
    """Independent scan of the tessellation invariants.

    Checks per-vertex parameter consistency against the evaluators, that
    interior triangle edges are shared by exactly two triangles of one Face,
    and that each Face's boundary edges reproduce the owning Edge polylines.
    """
    worst = 0.0
    for vid in range(tess.n_vertices):
        k = int(tess.owner_kind[vid])
        i = int(tess.owner_index[vid])
        if k == 0:
            p = geom.eval_node(i, tess.time)
        elif k == 1:
            p = geom.eval_edge(i, tess.params[vid, 0], tess.time)[0]
        else:
            p = geom.eval_face(i, tess.params[vid, 0], tess.params[vid, 1], tess.time)[0]
        worst = max(worst, float(np.abs(p - tess.coords[vid]).max()))
    assert worst < tol * geom.length_scale, worst

    for fid, tris in tess.face_triangles.items():
        count = {}
        for tr in tris:
            for i in range(3):
                e = tuple(sorted((int(tr[i]), int(tr[(i + 1) % 3]))))
                count[e] = count.get(e, 0) + 1
        assert all(c in (1, 2) for c in count.values()), fid
        hull = {e for e, c in count.items() if c == 1}
        segs = set()
        for eid, _fwd in geom.face_loop(fid):
            pl = tess.edge_polylines[eid]
            for a, b in zip(pl[:-1], pl[1:]):
                segs.add(tuple(sorted((int(a), int(b)))))
        assert hull == segs, (fid, hull ^ segs)
    return worst
