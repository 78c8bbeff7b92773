import io
import subprocess
import sys

import numpy as np
import pytest

from tess4d.cli import main
from tess4d.meshio import read_mesh4, read_pack4


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(scope="module")
def sphere_mesh_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "sphere.mesh4"
    code = main(["gen", "--case", "static-sphere", "--h", "0.1", "--n", "3",
                 "--out", str(path)])
    assert code == 0
    return str(path)


@pytest.fixture(scope="module")
def kuhn_mesh_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "kuhn.mesh4"
    assert main(["gen", "--case", "kuhn", "--n", "2", "--out", str(path)]) == 0
    return str(path)


def test_gen_prints_counts_and_timings(tmp_path, capsys):
    out = tmp_path / "m.mesh4"
    code, _, err = run(["gen", "--case", "static-sphere", "--h", "0.12", "--n", "2",
                        "--out", str(out)], capsys)
    assert code == 0
    assert out.exists()
    assert "# tetrahedra:" in err
    assert "# Steiner vertices:" in err
    assert "geometry tessellation (sec.):" in err
    assert "edge triangulation (sec.):" in err
    assert "face tetrahedralization (sec.):" in err


def test_gen_torus_closed_caps_errors(tmp_path, capsys):
    code, _, err = run(["gen", "--case", "expanding-torus", "--caps", "closed",
                        "--out", str(tmp_path / "t.mesh4")], capsys)
    assert code == 1
    assert "open mode" in err


def test_gen_kuhn_counts(kuhn_mesh_file):
    mesh = read_mesh4(kuhn_mesh_file)
    assert len(mesh.pentatopes) == 24 * 2 ** 4


def test_verify_pass(sphere_mesh_file, capsys):
    code, _, err = run(["verify", "--in", sphere_mesh_file,
                        "--case", "static-sphere"], capsys)
    assert code == 0
    assert "manifold (closed): pass" in err
    assert "verify: PASS" in err


def test_verify_detects_mutation(sphere_mesh_file, tmp_path, capsys):
    from tess4d.mesh4 import SpacetimeMesh
    from tess4d.meshio import write_mesh4
    mesh = read_mesh4(sphere_mesh_file)
    broken = SpacetimeMesh(vertices=mesh.vertices, tets=mesh.tets[1:],
                           tet_tags=mesh.tet_tags[1:], triangles=mesh.triangles,
                           tri_tags=mesh.tri_tags, segments=mesh.segments,
                           seg_tags=mesh.seg_tags, steiner=mesh.steiner)
    bad = tmp_path / "broken.mesh4"
    write_mesh4(bad, broken)
    code, _, err = run(["verify", "--in", str(bad), "--case", "static-sphere"],
                       capsys)
    assert code == 1
    assert "FAIL" in err


def test_verify_wrong_case_fails(sphere_mesh_file, capsys):
    # a bare box traces 3 units less volume than the sphere-in-box case
    code, _, err = run(["verify", "--in", sphere_mesh_file,
                        "--case", "box", "--caps", "open"], capsys)
    assert code == 1
    assert "rel error" in err


def test_convergence_csv(capsys):
    code, out, _ = run(["convergence", "--case", "box", "--levels", "2",
                        "--h0", "0.5"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "h,measured,expected,abs_error,observed_order"
    assert len(lines) == 3
    # box is exactly planar: error ~ 0 at every level
    for ln in lines[1:]:
        assert float(ln.split(",")[3]) < 1e-10


def test_slice_time_and_plane(sphere_mesh_file, tmp_path, capsys):
    out = tmp_path / "s.obj"
    code, _, err = run(["slice", "--in", sphere_mesh_file, "--time", "0.4",
                        "--out", str(out)], capsys)
    assert code == 0
    assert out.read_text().startswith("o ")
    out2 = tmp_path / "s2.obj"
    code, _, _ = run(["slice", "--in", sphere_mesh_file,
                      "--normal", "0,0,0,1", "--point", "0,0,0,0.4",
                      "--out", str(out2)], capsys)
    assert code == 0
    assert out.read_text() == out2.read_text()


def test_slice_outside_domain_empty(sphere_mesh_file, tmp_path, capsys):
    out = tmp_path / "empty.obj"
    code, _, _ = run(["slice", "--in", sphere_mesh_file, "--time", "9.0",
                      "--out", str(out)], capsys)
    assert code == 0
    assert out.read_text() == ""


def test_slice_bad_plane_spec(sphere_mesh_file, tmp_path, capsys):
    code, _, err = run(["slice", "--in", sphere_mesh_file,
                        "--normal", "0,0,1", "--point", "0,0,0,0",
                        "--out", str(tmp_path / "x.obj")], capsys)
    assert code == 1
    code, _, _ = run(["slice", "--in", sphere_mesh_file,
                      "--out", str(tmp_path / "x.obj")], capsys)
    assert code == 1


def test_bench_deterministic(sphere_mesh_file, capsys):
    code, _, err1 = run(["bench", "--in", sphere_mesh_file, "--samples", "5",
                         "--seed", "42"], capsys)
    assert code == 0
    code, _, err2 = run(["bench", "--in", sphere_mesh_file, "--samples", "5",
                         "--seed", "42"], capsys)
    assert code == 0

    def prim_count(err):
        line = [ln for ln in err.splitlines() if ln.startswith("primitives:")][0]
        return int(line.split()[1])

    assert prim_count(err1) == prim_count(err2)
    assert "samples=5" in err1


def test_bench_default_samples(sphere_mesh_file, capsys):
    code, _, err = run(["bench", "--in", sphere_mesh_file], capsys)
    assert code == 0
    assert "samples=50" in err


def test_bench_empty_mesh(tmp_path, capsys):
    from tess4d.mesh4 import SpacetimeMesh
    from tess4d.meshio import write_mesh4
    p = tmp_path / "empty.mesh4"
    write_mesh4(p, SpacetimeMesh(vertices=np.zeros((0, 4))))
    code, _, err = run(["bench", "--in", str(p), "--samples", "3"], capsys)
    assert code == 0
    assert "primitives: 0" in err


def test_pack_roundtrip(kuhn_mesh_file, tmp_path, capsys):
    out = tmp_path / "k.pack4"
    code, _, _ = run(["pack", "--in", kuhn_mesh_file, "--out", str(out)], capsys)
    assert code == 0
    pk = read_pack4(out)
    mesh = read_mesh4(kuhn_mesh_file)
    assert pk.bbox[0].min() <= 0.0 and pk.bbox[1].max() >= 1.0
    key = np.sort(pk.tets, axis=1)
    assert len(np.unique(key, axis=0)) == len(key)


def test_pack_missing_input(tmp_path, capsys):
    code, _, err = run(["pack", "--in", str(tmp_path / "nope.mesh4"),
                        "--out", str(tmp_path / "o.pack4")], capsys)
    assert code == 3


def test_usage_error_exit_code():
    proc = subprocess.run([sys.executable, "-m", "tess4d.cli", "gen"],
                          capture_output=True)
    assert proc.returncode == 2


def test_binary_gen(tmp_path, capsys):
    out = tmp_path / "b.mesh4"
    code, _, _ = run(["gen", "--case", "box", "--h", "0.5", "--n", "1",
                      "--caps", "open", "--binary", "--out", str(out)], capsys)
    assert code == 0
    assert out.read_bytes()[:4] == b"MSH4"
    mesh = read_mesh4(out)
    assert len(mesh.tets) > 0
