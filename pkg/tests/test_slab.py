import numpy as np
import pytest

from tess4d.errors import UnsupportedCapError
from tess4d.mesh4 import check_manifold, expected_volume, total_volume
from tess4d.slab import (TAG_CAP_FINAL, TAG_CAP_INITIAL, Slab, build_caps,
                         build_spacetime_mesh, connect_edge, connect_face,
                         connect_node)
from tess4d.tessellate import tessellate


def make_slab(geom, t_lo, t_hi, h, k=0):
    bottom = tessellate(geom, t_lo, h)
    top = tessellate(geom, t_hi, h)
    return Slab(k, t_lo, t_hi, bottom, top, 0, bottom.n_vertices)


def test_connect_node_static_box(box_geom):
    slab = make_slab(box_geom, 0.0, 1.0, 0.5)
    seg = connect_node(0, slab)
    lo = slab.bottom.coords[seg[0]]
    hi = slab.top.coords[seg[1] - slab.offset_hi]
    assert np.array_equal(lo, hi)           # static corner: same spatial point
    assert slab.bottom.time == 0.0 and slab.top.time == 1.0


def test_connect_node_expanding_sphere(expanding_sphere_geom):
    g = expanding_sphere_geom
    slab = make_slab(g, 0.0, 0.1, 0.1)
    for nid in range(8):                    # sphere shell corners move radially
        seg = connect_node(nid, slab)
        p0 = slab.bottom.coords[seg[0]]
        p1 = slab.top.coords[seg[1] - slab.offset_hi]
        d = p1 - p0
        expect = (g.eval_node(nid, 0.1) - g.eval_node(nid, 0.0))
        assert np.allclose(d, expect, atol=1e-15)


def test_connect_edge_area_and_conformity(expanding_sphere_geom):
    g = expanding_sphere_geom
    slab = make_slab(g, 0.0, 0.1, 0.08)
    for eid in range(0, g.n_edges, 5):
        sheet = connect_edge(g, eid, slab)
        s0, s1 = g.edge_range(eid)
        pts = np.stack([sheet.s, sheet.t], axis=1)
        t = sheet.triangles
        sa = 0.5 * ((pts[t[:, 1], 0] - pts[t[:, 0], 0]) * (pts[t[:, 2], 1] - pts[t[:, 0], 1])
                    - (pts[t[:, 1], 1] - pts[t[:, 0], 1]) * (pts[t[:, 2], 0] - pts[t[:, 0], 0]))
        assert (sa > 0).all()
        area = (s1 - s0) * (slab.t_hi - slab.t_lo)
        assert abs(sa.sum() - area) < 1e-12 * area
        # every bottom/top polyline segment appears verbatim
        count = {}
        gt = sheet.global_triangles()
        for tr in gt:
            for i in range(3):
                e = tuple(sorted((int(tr[i]), int(tr[(i + 1) % 3]))))
                count[e] = count.get(e, 0) + 1
        for pl, off in ((slab.bottom.edge_polylines[eid], 0),
                        (slab.top.edge_polylines[eid], slab.offset_hi)):
            for a, b in zip(pl[:-1], pl[1:]):
                e = tuple(sorted((int(a) + off, int(b) + off)))
                assert count.get(e) == 1, e


def test_connect_edge_mixed_resolutions(expanding_sphere_geom):
    # Bottom and top polylines with different vertex counts still conform.
    g = expanding_sphere_geom
    bottom = tessellate(g, 0.0, 0.06)
    top = tessellate(g, 1.0, 0.06)
    slab = Slab(0, 0.0, 1.0, bottom, top, 0, bottom.n_vertices)
    eid = 0
    assert len(bottom.edge_polylines[eid]) != len(top.edge_polylines[eid])
    sheet = connect_edge(g, eid, slab)
    assert len(sheet.triangles) > 0


def test_connect_face_volume_and_steiner(box_geom):
    slab = make_slab(box_geom, 0.0, 1.0, 0.5)
    sheets = {eid: connect_edge(box_geom, eid, slab) for eid in range(box_geom.n_edges)}
    apex_id = slab.offset_hi + slab.top.n_vertices
    tets, vol = connect_face(box_geom, 0, slab, sheets, apex_id)
    assert abs(vol - 1.0) < 1e-12           # (u,v,t) box volume, exact
    assert (tets == apex_id).sum() > 0      # the Steiner apex is used


def test_build_caps_volume(sphere_geom):
    tess = tessellate(sphere_geom, 0.0, 0.05)
    tets, vol = build_caps(sphere_geom, tess, 0, "initial")
    expect = 1.0 - (4.0 / 3.0) * np.pi * 0.1 ** 3
    assert abs(vol - expect) < 5e-3         # discretization error only
    n_sphere_tris = sum(len(tess.face_triangles[f]) for f in range(6))
    assert len(tets) == 3 * n_sphere_tris
    finer = tessellate(sphere_geom, 0.0, 0.025)
    _, vol2 = build_caps(sphere_geom, finer, 0, "initial")
    assert abs(vol2 - expect) < abs(vol - expect)


def test_build_caps_rejects_torus(torus_geom):
    tess = tessellate(torus_geom, 0.0, 0.2)
    with pytest.raises(UnsupportedCapError):
        build_caps(torus_geom, tess, 0, "initial")


def test_box_lateral_volume_exact(box_geom):
    mesh, stats = build_spacetime_mesh(box_geom, 1, 0.5, caps="open")
    assert abs(total_volume(mesh) - 6.0) < 1e-12
    assert stats.uvt_volume_error < 1e-12
    assert check_manifold(mesh, "with-boundary").passed


def test_sphere_closed_mesh(sphere_geom):
    mesh, stats = build_spacetime_mesh(sphere_geom, 4, 0.08, caps="closed")
    rep = check_manifold(mesh, "closed")
    assert rep.passed and rep.orientation_ok
    # Steiner accounting: one per Face per slab, all flagged
    assert mesh.steiner.sum() == 12 * 4 == stats.n_steiner
    # caps tagged
    assert (mesh.tet_tags == TAG_CAP_INITIAL).sum() > 0
    assert (mesh.tet_tags == TAG_CAP_FINAL).sum() > 0


def test_steiner_embedding_equation(expanding_sphere_geom):
    g = expanding_sphere_geom
    n = 3
    mesh, _ = build_spacetime_mesh(g, n, 0.1, caps="closed")
    times = np.linspace(0, 1, n + 1)
    steiner_ids = np.nonzero(mesh.steiner)[0]
    assert len(steiner_ids) == g.n_faces * n
    k = 0
    for slab_k in range(n):
        for fid in range(g.n_faces):
            vid = steiner_ids[k]
            k += 1
            umin, umax, vmin, vmax = g.face_range(fid)
            uc, vc = 0.5 * (umin + umax), 0.5 * (vmin + vmax)
            t_lo, t_hi = times[slab_k], times[slab_k + 1]
            w = 0.5
            spatial = ((1 - w) * g.eval_face(fid, uc, vc, t_lo)[0]
                       + w * g.eval_face(fid, uc, vc, t_hi)[0])
            expect = np.concatenate([spatial, [(1 - w) * t_lo + w * t_hi]])
            assert np.allclose(mesh.vertices[vid], expect, rtol=1e-12, atol=1e-15)


def test_inter_slab_conformity(expanding_sphere_geom):
    # Tets of neighbouring slabs share the interface triangles: every face
    # made of vertices at an interior time step is shared by exactly 2 tets.
    mesh, _ = build_spacetime_mesh(expanding_sphere_geom, 3, 0.12, caps="closed")
    rep = check_manifold(mesh, "closed")
    assert rep.passed


def test_mutation_breaks_manifold(sphere_geom):
    from tess4d.mesh4 import SpacetimeMesh
    mesh, _ = build_spacetime_mesh(sphere_geom, 2, 0.12, caps="closed")
    broken = SpacetimeMesh(vertices=mesh.vertices, tets=mesh.tets[1:],
                           tet_tags=mesh.tet_tags[1:], steiner=mesh.steiner)
    assert not check_manifold(broken, "closed").passed


def test_volumes_all_cases(sphere_geom, expanding_sphere_geom, torus_geom):
    for geom, case, caps, h in ((sphere_geom, "static-sphere", "closed", 0.08),
                                (expanding_sphere_geom, "expanding-sphere", "closed", 0.08),
                                (torus_geom, "expanding-torus", "open", 0.1)):
        mesh, _ = build_spacetime_mesh(geom, 5, h, caps=caps)
        v = total_volume(mesh)
        ev = expected_volume(case, caps)
        assert abs(v - ev) / ev < 0.05, (case, v, ev)


def test_closed_caps_rejected_for_torus(torus_geom):
    with pytest.raises(UnsupportedCapError):
        build_spacetime_mesh(torus_geom, 2, 0.2, caps="closed")


def test_vertex_count_audit(expanding_sphere_geom):
    n = 2
    mesh, stats = build_spacetime_mesh(expanding_sphere_geom, n, 0.1, caps="closed")
    times = np.linspace(0, 1, n + 1)
    tess_total = sum(tessellate(expanding_sphere_geom, float(t), 0.1).n_vertices
                     for t in times)
    assert mesh.n_vertices == tess_total + stats.n_steiner
    # no duplicate 4D vertices
    assert len(np.unique(mesh.vertices, axis=0)) == mesh.n_vertices


def test_node_segments_chain_across_slabs(expanding_sphere_geom):
    n = 4
    mesh, _ = build_spacetime_mesh(expanding_sphere_geom, n, 0.12, caps="closed")
    for nid in range(expanding_sphere_geom.n_nodes):
        segs = mesh.segments[mesh.seg_tags == nid]
        assert len(segs) == n
        for a, b in zip(segs[:-1], segs[1:]):
            assert a[1] == b[0]          # chained end-to-end
        t = mesh.vertices[segs[:, 0], 3]
        assert np.all(np.diff(t) > 0)


def test_sphere_open_mode_boundary_at_extremes(sphere_geom):
    mesh, _ = build_spacetime_mesh(sphere_geom, 3, 0.1, caps="open")
    rep = check_manifold(mesh, "with-boundary")
    assert rep.passed and rep.n_boundary_faces > 0
    # every exposed face sits wholly at t0 or tf (verified independently)
    faces = {}
    slots = [(1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)]
    for tet in mesh.tets:
        for s in slots:
            key = tuple(sorted(int(tet[i]) for i in s))
            faces[key] = faces.get(key, 0) + 1
    t = mesh.vertices[:, 3]
    for key, count in faces.items():
        if count == 1:
            tv = t[list(key)]
            assert np.all(tv == 0.0) or np.all(tv == 1.0)


def test_cap_boundary_matches_lateral_tessellation(sphere_geom):
    # The cap tets' faces lying in the t0 plane are exactly the t0 surface
    # tessellation triangles, referenced with identical vertex ids by the
    # first slab's lateral tets.
    from tess4d.slab import TAG_CAP_INITIAL
    mesh, _ = build_spacetime_mesh(sphere_geom, 2, 0.1, caps="closed")
    tess0 = tessellate(sphere_geom, 0.0, 0.1)
    surface0 = {tuple(sorted(map(int, tr)))
                for fid in range(sphere_geom.n_faces)
                for tr in tess0.face_triangles[fid]}
    slots = [(1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)]
    t = mesh.vertices[:, 3]

    def plane_faces(tets, boundary_only=False):
        count = {}
        for tet in tets:
            for s in slots:
                tri = tuple(sorted(int(tet[i]) for i in s))
                if np.all(t[list(tri)] == 0.0):
                    count[tri] = count.get(tri, 0) + 1
        if boundary_only:
            return {tri for tri, c in count.items() if c == 1}
        return set(count)

    # the cap is a volume mesh entirely inside the t0 hyperplane: its
    # boundary faces are exactly the surface tessellation, which the first
    # slab references with the same vertex ids
    cap_faces = plane_faces(mesh.tets[mesh.tet_tags == TAG_CAP_INITIAL],
                            boundary_only=True)
    lateral_faces = plane_faces(mesh.tets[mesh.tet_tags < TAG_CAP_INITIAL])
    assert cap_faces == surface0 == lateral_faces
