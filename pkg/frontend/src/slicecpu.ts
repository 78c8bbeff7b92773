/** CPU twin of the GPU slicing path, used by the viewer self-test.
 *
 * Runs the identical lookup-table algorithm (same generated tables, same
 * side convention: distance <= 0 takes bit 1, alpha == 1 snaps onto the
 * endpoint) over a parsed pack4 mesh and returns projected primitives.
 */
import { CASE_EDGES, EDGE_ENDPOINTS, SHAPE_OF_CASE } from "./gen/tables.js";
import { Pack4Mesh } from "./pack4.js";
import { Hyperplane, planeBasis, projectPoint } from "./plane.js";

export interface CpuSlice {
  /** flattened xyz triples: 3 points for triangle cases, 4 for quads */
  primitives: { points3: Float64Array; ref: number; shape: number }[];
  triangleCount: number;
}

const MIN_AREA = 1e-20;

function area3(points3: Float64Array, a: number, b: number, c: number): number {
  const ux = points3[3 * b] - points3[3 * a];
  const uy = points3[3 * b + 1] - points3[3 * a + 1];
  const uz = points3[3 * b + 2] - points3[3 * a + 2];
  const vx = points3[3 * c] - points3[3 * a];
  const vy = points3[3 * c + 1] - points3[3 * a + 1];
  const vz = points3[3 * c + 2] - points3[3 * a + 2];
  const cx = uy * vz - uz * vy;
  const cy = uz * vx - ux * vz;
  const cz = ux * vy - uy * vx;
  return 0.5 * Math.hypot(cx, cy, cz);
}

export function sliceMeshCpu(mesh: Pack4Mesh, plane: Hyperplane): CpuSlice {
  const basis = planeBasis(plane);
  const cn = plane.c[0] * plane.n[0] + plane.c[1] * plane.n[1]
    + plane.c[2] * plane.n[2] + plane.c[3] * plane.n[3];
  const v = mesh.vertices;
  const dist = new Float64Array(mesh.vertexCount);
  for (let i = 0; i < mesh.vertexCount; i++) {
    dist[i] = v[4 * i] * plane.n[0] + v[4 * i + 1] * plane.n[1]
      + v[4 * i + 2] * plane.n[2] + v[4 * i + 3] * plane.n[3] - cn;
  }

  const primitives: CpuSlice["primitives"] = [];
  let triangleCount = 0;
  const p4 = new Float64Array(4);
  const p3 = new Float64Array(3);
  for (let t = 0; t < mesh.tetCount; t++) {
    let code = 0;
    for (let j = 0; j < 4; j++) {
      if (dist[mesh.tets[4 * t + j]] <= 0) code |= 1 << j;
    }
    const shape = SHAPE_OF_CASE[code];
    if (shape === 0) continue;
    const slots = shape === 1 ? 3 : 4;
    const points3 = new Float64Array(3 * slots);
    for (let slot = 0; slot < slots; slot++) {
      const e = CASE_EDGES[4 * code + slot];
      const a = mesh.tets[4 * t + EDGE_ENDPOINTS[2 * e]];
      const b = mesh.tets[4 * t + EDGE_ENDPOINTS[2 * e + 1]];
      const alpha = dist[a] / (dist[a] - dist[b]);
      for (let x = 0; x < 4; x++) {
        p4[x] = alpha === 1
          ? v[4 * b + x]
          : v[4 * a + x] + alpha * (v[4 * b + x] - v[4 * a + x]);
      }
      projectPoint(plane, basis, p4, p3);
      points3.set(p3, 3 * slot);
    }
    // drop fully collapsed primitives, mirroring the reference engine
    const kept = shape === 1
      ? area3(points3, 0, 1, 2) >= MIN_AREA
      : area3(points3, 0, 1, 2) >= MIN_AREA || area3(points3, 1, 3, 2) >= MIN_AREA;
    if (!kept) continue;
    primitives.push({ points3, ref: mesh.tetRefs[t], shape });
    triangleCount += shape === 1 ? 1 : 2;
  }
  return { primitives, triangleCount };
}
