import numpy as np
import pytest

from tess4d.errors import InputError
from tess4d.tessellate import euler_characteristic, tessellate, uv_on_face

from conftest import audit_watertight


def test_box_face_h_half(box_geom):
    tess = tessellate(box_geom, 0.0, 0.5)
    for eid in range(box_geom.n_edges):
        assert len(tess.edge_polylines[eid]) == 3   # split in 2
    # face triangulation covers the parameter rectangle exactly
    for fid in range(6):
        area = 0.0
        for tr in tess.face_triangles[fid]:
            uv = [uv_on_face(box_geom, tess, int(v), fid) for v in tr]
            area += 0.5 * ((uv[1][0] - uv[0][0]) * (uv[2][1] - uv[0][1])
                           - (uv[1][1] - uv[0][1]) * (uv[2][0] - uv[0][0]))
        assert abs(area - 1.0) < 1e-12
    audit_watertight(box_geom, tess)


def test_sphere_euler_characteristic(sphere_geom):
    tess = tessellate(sphere_geom, 0.0, 0.05)
    for eid in range(12):
        assert len(tess.edge_polylines[eid]) >= 3   # >= 2 segments per edge
    assert euler_characteristic(tess, range(6)) == 2
    assert euler_characteristic(tess, range(6, 12)) == 2


def test_torus_euler_characteristic(torus_geom):
    tess = tessellate(torus_geom, 0.0, 0.1)
    assert euler_characteristic(tess, range(4)) == 0
    assert euler_characteristic(tess, range(4, 10)) == 2


def test_resolution_follows_growth(expanding_sphere_geom):
    t0 = tessellate(expanding_sphere_geom, 0.0, 0.05)
    t1 = tessellate(expanding_sphere_geom, 1.0, 0.05)
    assert t0.n_vertices != t1.n_vertices
    assert t1.n_vertices > t0.n_vertices


@pytest.mark.parametrize("seed", range(4))
def test_watertight_random_h_and_time(seed, expanding_sphere_geom, torus_geom):
    rng = np.random.default_rng(seed)
    geom = (expanding_sphere_geom, torus_geom)[seed % 2]
    h = float(rng.uniform(0.05, 0.2))
    t = float(rng.uniform(0, 1))
    tess = tessellate(geom, t, h)
    audit_watertight(geom, tess)


def test_shared_edge_conformity(expanding_sphere_geom):
    # Both incident Faces must reference identical polyline vertex ids.
    g = expanding_sphere_geom
    tess = tessellate(g, 0.37, 0.08)
    for eid in range(g.n_edges):
        pl = set(map(int, tess.edge_polylines[eid]))
        for fid in g.edge_faces(eid):
            used = set(map(int, np.unique(tess.face_triangles[fid])))
            assert pl <= used


def test_mirror_vertex_map(sphere_geom):
    tess = tessellate(sphere_geom, 0.0, 0.06)
    mv = tess.mirror_vertex
    assert mv is not None
    sphere_owned = mv >= 0
    assert sphere_owned.sum() * 2 == tess.n_vertices
    # mirrored coordinates lie on the box surface
    half = sphere_geom.length_scale / 2
    box_pts = tess.coords[mv[sphere_owned]]
    assert np.allclose(np.abs(box_pts).max(axis=1), half, atol=1e-12)
    # mirrored box triangulation is the re-wound image of the sphere's
    for fid, box_fid in sphere_geom.mirror_face.items():
        a = np.vectorize(lambda v: int(mv[v]))(tess.face_triangles[fid])
        b = tess.face_triangles[box_fid]
        assert np.array_equal(np.sort(a, axis=1), np.sort(b, axis=1))


def test_input_validation(sphere_geom):
    with pytest.raises(InputError):
        tessellate(sphere_geom, 0.5, -0.1)
    with pytest.raises(InputError):
        tessellate(sphere_geom, 2.0, 0.1)


def test_determinism(sphere_geom):
    a = tessellate(sphere_geom, 0.25, 0.07)
    b = tessellate(sphere_geom, 0.25, 0.07)
    assert np.array_equal(a.coords, b.coords)
    for fid in a.face_triangles:
        assert np.array_equal(a.face_triangles[fid], b.face_triangles[fid])
