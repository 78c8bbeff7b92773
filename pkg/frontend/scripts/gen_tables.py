"""Emit the slicing lookup tables as a TypeScript module.

The viewer never hand-types these constants: this script derives them from
the tess4d package (the single source of truth) and writes src/gen/tables.ts.
Rerun after any change to the table derivation.
"""
import pathlib

from tess4d.slicer import derive_tables

OUT = pathlib.Path(__file__).resolve().parent.parent / "src" / "gen" / "tables.ts"


def fmt(arr):
    return ", ".join(str(int(v)) for v in arr.reshape(-1))


def main():
    t = derive_tables()
    text = f"""// GENERATED by scripts/gen_tables.py from the tess4d package. Do not edit.

/** 16 x 4 intersected-edge slots per case code; -1 marks empty cases. */
export const CASE_EDGES = new Int32Array([{fmt(t.case_edges)}]);

/** Tet-vertex pairs of the six tet edges (marching-tetrahedra order). */
export const EDGE_ENDPOINTS = new Int32Array([{fmt(t.edge_endpoints)}]);

/** Shape per case code: 0 none, 1 triangle, 2 quad. */
export const SHAPE_OF_CASE = new Int32Array([{fmt(t.shape_of_case)}]);

/** Vertex-to-edge-slot table for the 6-vertex expansion, per shape. */
export const V2E = new Int32Array([{fmt(t.v2e)}]);
"""
    OUT.write_text(text)
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
