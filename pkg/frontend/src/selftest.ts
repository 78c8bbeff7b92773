/** Cross-component equivalence check: the viewer's CPU slicing of a pack4
 * mesh must reproduce the reference engine's slice export for the same
 * hyperplane within the f32 narrowing bound.
 */
import { Pack4Mesh } from "./pack4.js";
import { Hyperplane } from "./plane.js";
import { sliceMeshCpu } from "./slicecpu.js";
import { parseSliceExport } from "./objtext.js";

export interface SelftestResult {
  pass: boolean;
  planeCount: number;
  maxDistance: number;
  detail: string;
}

/** Greedy nearest-neighbour multiset match; returns the largest pairing
 * distance or +inf when the counts differ. */
function matchPointSets(a: number[][], b: number[][]): number {
  if (a.length !== b.length) return Number.POSITIVE_INFINITY;
  const used = new Array(b.length).fill(false);
  let worst = 0;
  for (const p of a) {
    let best = -1;
    let bestD = Number.POSITIVE_INFINITY;
    for (let j = 0; j < b.length; j++) {
      if (used[j]) continue;
      const d = Math.hypot(p[0] - b[j][0], p[1] - b[j][1], p[2] - b[j][2]);
      if (d < bestD) {
        bestD = d;
        best = j;
      }
    }
    used[best] = true;
    worst = Math.max(worst, bestD);
  }
  return worst;
}

export function runSelftest(
  mesh: Pack4Mesh,
  planes: Hyperplane[],
  exports: string[],
  tolerance = 1e-4,
): SelftestResult {
  if (planes.length !== exports.length) {
    throw new Error("one export per plane required");
  }
  let maxDistance = 0;
  for (let k = 0; k < planes.length; k++) {
    const cpu = sliceMeshCpu(mesh, planes[k]);
    const ref = parseSliceExport(exports[k]);
    const cpuPoints: number[][] = [];
    for (const prim of cpu.primitives) {
      for (let i = 0; i < prim.points3.length / 3; i++) {
        cpuPoints.push([prim.points3[3 * i], prim.points3[3 * i + 1],
                        prim.points3[3 * i + 2]]);
      }
    }
    if (cpu.triangleCount !== ref.faceCount) {
      return {
        pass: false,
        planeCount: planes.length,
        maxDistance: Number.POSITIVE_INFINITY,
        detail: `plane ${k}: ${cpu.triangleCount} triangles vs export ${ref.faceCount}`,
      };
    }
    const worst = matchPointSets(cpuPoints, ref.facePoints);
    maxDistance = Math.max(maxDistance, worst);
    if (worst > tolerance) {
      return {
        pass: false,
        planeCount: planes.length,
        maxDistance,
        detail: `plane ${k}: first differing primitive at distance ${worst.toExponential(3)}`,
      };
    }
  }
  return {
    pass: true,
    planeCount: planes.length,
    maxDistance,
    detail: `max point distance ${maxDistance.toExponential(3)} over ${planes.length} planes`,
  };
}
