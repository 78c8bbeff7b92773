"""Generate the viewer test fixtures from the tess4d package.

Produces two pack4 meshes (a unit-tesseract Kuhn mesh with pentatopes
pre-expanded to unique tets, and a coarse expanding-sphere mesh) plus the
reference slice exports for five fixed hyperplanes each, and planes.json
describing them. The viewer self-test replays the same planes on the f32
pack and compares against these exports.
"""
import json
import pathlib

import numpy as np

from tess4d.geometry import make_sphere_in_box
from tess4d.mesh4 import SpacetimeMesh, kuhn_pentatopes, unique_boundary_tets
from tess4d.meshio import export_slice, write_pack4
from tess4d.slab import build_spacetime_mesh
from tess4d.slicer import Hyperplane, slice_mesh

OUT = pathlib.Path(__file__).resolve().parent.parent / "test" / "fixtures"

# Fixed plane set; times avoid slab boundaries and lattice planes so f32
# narrowing cannot flip any side bit.
PLANES = [
    {"n": [0.0, 0.0, 0.0, 1.0], "c": [0.0, 0.0, 0.0, 0.475]},
    {"n": [0.0, 0.0, 0.0, 1.0], "c": [0.0, 0.0, 0.0, 0.75]},
    {"n": [0.0, 0.0, 0.0, 1.0], "c": [0.0, 0.0, 0.0, 0.925]},
    {"n": [0.25, 0.15, -0.2, 1.0], "c": [0.01, -0.02, 0.03, 0.48]},
    {"n": [1.0, 0.7, 0.45, 0.8], "c": [0.05, 0.02, -0.04, 0.5]},
]


def emit(name: str, mesh: SpacetimeMesh):
    write_pack4(OUT / f"{name}.pack4", mesh)
    for i, spec in enumerate(PLANES):
        plane = Hyperplane(np.array(spec["n"]), np.array(spec["c"]))
        result = slice_mesh(mesh, plane)
        export_slice(OUT / f"{name}_slice{i}.obj", result)
        print(f"{name} plane {i}: {result.n_triangles} triangles, "
              f"{result.n_segments} segments")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "planes.json").write_text(json.dumps({"planes": PLANES}, indent=2) + "\n")

    kuhn = kuhn_pentatopes(1)
    tets, tags = unique_boundary_tets(kuhn)
    # pre-expanded tet mesh so the reference slice matches the pack 1:1
    kuhn_tets = SpacetimeMesh(vertices=kuhn.vertices, tets=tets, tet_tags=tags)
    emit("kuhn1", kuhn_tets)

    geom = make_sphere_in_box(0.1, 0.125, 1.0)
    mesh, _stats = build_spacetime_mesh(geom, 5, 0.08, caps="closed")
    emit("esphere", mesh)


if __name__ == "__main__":
    main()
