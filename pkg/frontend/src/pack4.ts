/** Parser for the pack4 binary mesh format (little-endian, f32/u32). */

export interface Pack4Mesh {
  /** xyzt per vertex, 4 floats each */
  vertices: Float32Array;
  vertexCount: number;
  /** 4 vertex ids per tet */
  tets: Uint32Array;
  tetCount: number;
  /** entity ref per tet (colors) */
  tetRefs: Uint32Array;
  /** 3 vertex ids per edge-surface triangle */
  edgeTris: Uint32Array;
  edgeTriCount: number;
  edgeRefs: Uint32Array;
  /** [min xyzt, max xyzt] */
  bboxMin: Float32Array;
  bboxMax: Float32Array;
}

const MAGIC = 0x344b4150; // "PAK4" little-endian

export class Pack4Error extends Error {}

export function parsePack4(buffer: ArrayBuffer): Pack4Mesh {
  const view = new DataView(buffer);
  if (buffer.byteLength < 20) {
    throw new Pack4Error(`file too small (${buffer.byteLength} bytes)`);
  }
  if (view.getUint32(0, true) !== MAGIC) {
    throw new Pack4Error("bad magic: not a pack4 file");
  }
  const version = view.getUint32(4, true);
  if (version !== 1) {
    throw new Pack4Error(`unsupported pack4 version ${version}`);
  }
  const nv = view.getUint32(8, true);
  const nt = view.getUint32(12, true);
  const ne = view.getUint32(16, true);
  const expected = 20 + 16 * nv + 20 * nt + 16 * ne + 32;
  if (buffer.byteLength !== expected) {
    throw new Pack4Error(
      `size mismatch: ${buffer.byteLength} bytes, expected ${expected}`);
  }

  let off = 20;
  const vertices = new Float32Array(buffer, off, 4 * nv).slice();
  off += 16 * nv;

  const tets = new Uint32Array(nt * 4);
  const tetRefs = new Uint32Array(nt);
  const tetBlock = new Uint32Array(buffer, off, 5 * nt);
  for (let i = 0; i < nt; i++) {
    tets[4 * i] = tetBlock[5 * i];
    tets[4 * i + 1] = tetBlock[5 * i + 1];
    tets[4 * i + 2] = tetBlock[5 * i + 2];
    tets[4 * i + 3] = tetBlock[5 * i + 3];
    tetRefs[i] = tetBlock[5 * i + 4];
  }
  off += 20 * nt;

  const edgeTris = new Uint32Array(ne * 3);
  const edgeRefs = new Uint32Array(ne);
  const triBlock = new Uint32Array(buffer, off, 4 * ne);
  for (let i = 0; i < ne; i++) {
    edgeTris[3 * i] = triBlock[4 * i];
    edgeTris[3 * i + 1] = triBlock[4 * i + 1];
    edgeTris[3 * i + 2] = triBlock[4 * i + 2];
    edgeRefs[i] = triBlock[4 * i + 3];
  }
  off += 16 * ne;

  const bbox = new Float32Array(buffer, off, 8);
  for (let i = 0; i < 4 * nv; i++) {
    const c = vertices[i];
    if (c < bbox[i % 4] || c > bbox[4 + (i % 4)]) {
      throw new Pack4Error("vertex outside the bounding-box footer");
    }
  }
  return {
    vertices,
    vertexCount: nv,
    tets,
    tetCount: nt,
    tetRefs,
    edgeTris,
    edgeTriCount: ne,
    edgeRefs,
    bboxMin: bbox.slice(0, 4),
    bboxMax: bbox.slice(4, 8),
  };
}
