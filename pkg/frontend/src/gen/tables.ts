// GENERATED by scripts/gen_tables.py from the tess4d package. Do not edit.

/** 16 x 4 intersected-edge slots per case code; -1 marks empty cases. */
export const CASE_EDGES = new Int32Array([-1, -1, -1, -1, 3, 0, 2, 2, 1, 0, 4, 4, 4, 1, 3, 2, 2, 1, 5, 5, 3, 0, 5, 1, 2, 0, 5, 4, 5, 3, 4, 4, 4, 3, 5, 5, 4, 0, 5, 2, 1, 0, 5, 3, 5, 1, 2, 2, 2, 1, 3, 4, 4, 0, 1, 1, 2, 0, 3, 3, -1, -1, -1, -1]);

/** Tet-vertex pairs of the six tet edges (marching-tetrahedra order). */
export const EDGE_ENDPOINTS = new Int32Array([0, 1, 1, 2, 2, 0, 0, 3, 1, 3, 2, 3]);

/** Shape per case code: 0 none, 1 triangle, 2 quad. */
export const SHAPE_OF_CASE = new Int32Array([0, 1, 1, 2, 1, 2, 2, 1, 1, 2, 2, 1, 2, 1, 1, 0]);

/** Vertex-to-edge-slot table for the 6-vertex expansion, per shape. */
export const V2E = new Int32Array([0, 0, 0, 0, 0, 0, 0, 1, 2, 0, 0, 0, 0, 1, 2, 1, 3, 2]);
