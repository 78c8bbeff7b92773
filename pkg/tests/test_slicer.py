import numpy as np
import pytest

from tess4d.mesh4 import (SpacetimeMesh, cross4, kuhn_pentatopes,
                          pentatope_boundary_tets)
from tess4d.slab import build_spacetime_mesh
from tess4d.slicer import (Hyperplane, SUPPRESSED_ALTITUDE, derive_tables,
                           get_tables, slice_mesh, slice_tet,
                           slice_tet_bruteforce, slice_triangle)


def test_tables_shape_and_symmetry():
    t = derive_tables()
    assert t.case_edges.shape == (16, 4)
    assert t.edge_endpoints.shape == (6, 2)
    popcount = [bin(r).count("1") for r in range(16)]
    for r in range(16):
        edges = {int(e) for e in t.case_edges[r] if e >= 0}
        mirror = {int(e) for e in t.case_edges[15 - r] if e >= 0}
        assert edges == mirror
        if popcount[r] in (1, 3):
            assert t.shape_of_case[r] == 1
            assert len(edges) == 3
            # fourth slot repeats an edge so the quad path draws a triangle
            assert t.case_edges[r, 3] in t.case_edges[r, :3]
        elif popcount[r] == 2:
            assert t.shape_of_case[r] == 2
            assert len(edges) == 4
        else:
            assert t.shape_of_case[r] == 0
            assert (t.case_edges[r] == -1).all()
    assert (t.shape_of_case == 0).sum() == 2


def test_v2e_constants():
    t = get_tables()
    assert t.v2e.tolist() == [0, 0, 0, 0, 0, 0,
                              0, 1, 2, 0, 0, 0,
                              0, 1, 2, 1, 3, 2]


def test_triangle_case_example():
    H = Hyperplane.time_slice(0.5)
    prim = slice_tet([[0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1]], H)
    assert prim.kind == "triangle"
    got = {tuple(np.round(p, 12)) for p in prim.unique_points4()}
    assert got == {(0, 0, 0, 0.5), (0.5, 0, 0, 0.5), (0, 0.5, 0, 0.5)}


def test_quad_case_example():
    H = Hyperplane.time_slice(0.5)
    prim = slice_tet([[0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 1], [0, 0, 1, 1]], H)
    assert prim.kind == "quad"
    # all four points are edge midpoints of the crossing edges
    assert np.allclose(prim.points4[:, 3], 0.5)


def test_all_below_is_empty():
    H = Hyperplane.time_slice(0.5)
    assert slice_tet([[0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0.2]], H) is None


def test_oracle_equivalence_10k():
    rng = np.random.default_rng(3)
    tables = get_tables()
    for trial in range(10000):
        p = rng.normal(size=(4, 4))
        H = Hyperplane(rng.normal(size=4), rng.normal(size=4) * 0.3)
        prim = slice_tet(p, H, tables)
        oracle = slice_tet_bruteforce(p, H)
        if prim is None:
            assert len(oracle) == 0
        else:
            a = np.array(sorted(map(tuple, prim.unique_points4())))
            b = np.array(sorted(map(tuple, oracle)))
            assert a.shape == b.shape
            assert np.allclose(a, b, rtol=1e-12, atol=1e-12), trial


def test_projection_isometry():
    rng = np.random.default_rng(11)
    for _ in range(300):
        p = rng.normal(size=(4, 4))
        H = Hyperplane(rng.normal(size=4), rng.normal(size=4) * 0.2)
        prim = slice_tet(p, H)
        if prim is None:
            continue
        d4 = np.linalg.norm(prim.points4[:, None] - prim.points4[None, :], axis=2)
        d3 = np.linalg.norm(prim.points3[:, None] - prim.points3[None, :], axis=2)
        assert np.allclose(d4, d3, rtol=1e-12, atol=1e-12)
        # points lie on the plane before projection
        n = H.n / np.linalg.norm(H.n)
        assert np.abs((prim.points4 - H.c) @ n).max() < 1e-10


def test_time_slice_basis_is_identity():
    H = Hyperplane.time_slice(0.25)
    assert np.array_equal(H.basis(), np.eye(4)[:3])


def test_slice_triangle_cases():
    H = Hyperplane.time_slice(0.5)
    seg = slice_triangle([[0, 0, 0, 0], [1, 0, 0, 1], [0, 1, 0, 1]], H)
    assert seg is not None and seg[0].shape == (2, 4)
    assert np.allclose(seg[0][:, 3], 0.5)
    assert slice_triangle([[0, 0, 0, 0.6], [1, 0, 0, 1], [0, 1, 0, 1]], H) is None
    # coplanar triangle: empty by convention
    assert slice_triangle([[0, 0, 0, 0.5], [1, 0, 0, 0.5], [0, 1, 0, 0.5]], H) is None


def test_closed_shell_property(sphere_geom):
    # Slicing a closed-manifold tet mesh at a generic plane yields closed
    # 2-manifold shells: every slice edge (keyed by its source tet edge)
    # bounds exactly two slice triangles.
    mesh, _ = build_spacetime_mesh(sphere_geom, 3, 0.1, caps="closed")
    for H in (Hyperplane.time_slice(0.437),
              Hyperplane(np.array([0.2, -0.1, 0.15, 1.0]),
                         np.array([0.0, 0.0, 0.0, 0.41]))):
        res = slice_mesh(mesh, H)
        assert res.n_triangles > 0
        count = {}
        for tri_edges in res.tri_src_edges:
            for i in range(3):
                a = tuple(sorted(tri_edges[i]))
                b = tuple(sorted(tri_edges[(i + 1) % 3]))
                key = tuple(sorted((a, b)))
                count[key] = count.get(key, 0) + 1
        assert all(c == 2 for c in count.values())


def test_slice_at_initial_time(expanding_sphere_geom):
    # At t = t0 every kept primitive collapses onto the initial-plane
    # triangles: triangle cases only, vertices at t = 0 exactly.
    mesh, _ = build_spacetime_mesh(expanding_sphere_geom, 3, 0.1, caps="closed")
    res = slice_mesh(mesh, Hyperplane.time_slice(0.0))
    assert res.n_triangles > 0
    assert np.abs(res.tri_points4[:, :, 3]).max() == 0.0
    counts = res.case_counts
    tri_cases = [r for r in range(16) if bin(r).count("1") in (1, 3)]
    quad_cases = [r for r in range(16) if bin(r).count("1") == 2]
    assert counts[tri_cases].sum() == counts.sum()
    assert counts[quad_cases].sum() == 0


def test_slice_phenomenology_interior_time(expanding_sphere_geom):
    mesh, _ = build_spacetime_mesh(expanding_sphere_geom, 3, 0.1, caps="closed")
    res = slice_mesh(mesh, Hyperplane.time_slice(0.75))
    tri_cases = [r for r in range(16) if bin(r).count("1") in (1, 3)]
    quad_cases = [r for r in range(16) if bin(r).count("1") == 2]
    assert res.case_counts[tri_cases].sum() > 0
    assert res.case_counts[quad_cases].sum() > 0
    # Edge-surface segments present too
    assert res.n_segments > 0


def test_plane_outside_mesh_is_empty(sphere_geom):
    mesh, _ = build_spacetime_mesh(sphere_geom, 2, 0.15, caps="closed")
    res = slice_mesh(mesh, Hyperplane.time_slice(7.5))
    assert res.n_triangles == 0 and res.n_segments == 0


def test_quad_altitude_suppression():
    H = Hyperplane.time_slice(0.5)
    verts = np.array([[0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 1], [0, 0, 1, 1.0]])
    mesh = SpacetimeMesh(vertices=verts, tets=[[0, 1, 2, 3]], tet_tags=[0])
    res = slice_mesh(mesh, H)
    assert res.n_triangles == 2
    assert res.tri_altitudes[0, 0] == SUPPRESSED_ALTITUDE
    assert res.tri_altitudes[1, 1] == SUPPRESSED_ALTITUDE
    # the other altitudes are genuine distances
    assert (res.tri_altitudes[0, 1:] < 2.0).all()


def test_kuhn_slice_volume_accumulation():
    # Slice the n=2 unit-tesseract mesh at t=0.5 and accumulate enclosed
    # volumes per pentatope via the divergence theorem, orienting each
    # polygon by the projected 4D outward normal of its boundary tet.
    mesh = kuhn_pentatopes(2)
    H = Hyperplane.time_slice(0.5)
    basis = H.basis()
    total = 0.0
    for penta in mesh.pentatopes:
        centroid = mesh.vertices[penta].mean(axis=0)
        vol = 0.0
        for i, tet in enumerate(pentatope_boundary_tets(penta)):
            prim = slice_tet(mesh.vertices[tet], H)
            if prim is None:
                continue
            q = mesh.vertices[tet]
            nrm4 = cross4(q[1] - q[0], q[2] - q[0], q[3] - q[0])
            if np.dot(nrm4, q[0] - centroid) < 0:
                nrm4 = -nrm4
            n3 = basis @ nrm4
            tris = ([prim.points3[[0, 1, 2]]] if prim.kind == "triangle"
                    else [prim.points3[[0, 1, 2]], prim.points3[[1, 3, 2]]])
            for tr in tris:
                nt = np.cross(tr[1] - tr[0], tr[2] - tr[0])
                sgn = 1.0 if np.dot(nt, n3) >= 0 else -1.0
                vol += sgn * np.dot(tr[0], np.cross(tr[1], tr[2])) / 6.0
        total += abs(vol)
    assert total == pytest.approx(1.0, abs=1e-9)


def test_engines_agree(sphere_geom):
    from tess4d import _kernels
    if "numba" not in _kernels.available_engines():
        pytest.skip("numba unavailable")
    mesh, _ = build_spacetime_mesh(sphere_geom, 2, 0.12, caps="closed")
    # plane offsets chosen away from mesh coordinate ties so both engines'
    # dot-product rounding yields identical side bits
    H = Hyperplane(np.array([0.30177, 0.20034, -0.40091, 1.0]),
                   np.array([0.10073, 0.00041, 0.00029, 0.52347]))
    a = slice_mesh(mesh, H, engine="numpy")
    b = slice_mesh(mesh, H, engine="numba")
    assert a.n_triangles == b.n_triangles
    assert np.allclose(a.tri_points3, b.tri_points3, rtol=1e-13, atol=1e-15)
    assert np.array_equal(a.tri_tags, b.tri_tags)
    assert np.array_equal(a.case_counts, b.case_counts)
