/** Slicing hyperplane in 4D and its deterministic in-plane 3D basis.
 *
 * The basis mirrors the CPU engine that produced the slice exports:
 * Gram-Schmidt of the three coordinate axes least aligned with the normal
 * (ties broken by axis index), so a pure time slice projects to identity
 * on (x, y, z).
 */

export interface Hyperplane {
  n: Float64Array; // 4
  c: Float64Array; // 4
}

export function timeSlice(t: number): Hyperplane {
  return { n: Float64Array.from([0, 0, 0, 1]), c: Float64Array.from([0, 0, 0, t]) };
}

export function makePlane(n: ArrayLike<number>, c: ArrayLike<number>): Hyperplane {
  if (n.length !== 4 || c.length !== 4) throw new Error("plane takes 4-vectors");
  return { n: Float64Array.from(n as number[]), c: Float64Array.from(c as number[]) };
}

function dot4(a: ArrayLike<number>, b: ArrayLike<number>): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

/** Rows of the orthonormal 3x4 in-plane basis. */
export function planeBasis(plane: Hyperplane): Float64Array[] {
  const norm = Math.hypot(plane.n[0], plane.n[1], plane.n[2], plane.n[3]);
  if (!(norm > 0)) throw new Error("hyperplane normal must be nonzero");
  const n = plane.n.map((v) => v / norm);
  const order = [0, 1, 2, 3]
    .map((ax) => ({ ax, mag: Math.abs(n[ax]) }))
    .sort((a, b) => (a.mag === b.mag ? a.ax - b.ax : a.mag - b.mag))
    .slice(0, 3)
    .map((e) => e.ax);
  const basis: Float64Array[] = [];
  for (const ax of order) {
    const v = new Float64Array(4);
    v[ax] = 1;
    const dn = dot4(v, n);
    for (let i = 0; i < 4; i++) v[i] -= dn * n[i];
    for (const b of basis) {
      const db = dot4(v, b);
      for (let i = 0; i < 4; i++) v[i] -= db * b[i];
    }
    const len = Math.hypot(v[0], v[1], v[2], v[3]);
    if (len < 1e-12) throw new Error("degenerate hyperplane basis");
    for (let i = 0; i < 4; i++) v[i] /= len;
    basis.push(v);
  }
  return basis;
}

export function signedDistance(plane: Hyperplane, p: ArrayLike<number>): number {
  return dot4(p, plane.n) - dot4(plane.c, plane.n);
}

/** Project an on-plane 4D point to the 3D basis coordinates. */
export function projectPoint(
  plane: Hyperplane, basis: Float64Array[], p: ArrayLike<number>, out: Float64Array,
): void {
  const d0 = p[0] - plane.c[0];
  const d1 = p[1] - plane.c[1];
  const d2 = p[2] - plane.c[2];
  const d3 = p[3] - plane.c[3];
  for (let r = 0; r < 3; r++) {
    const b = basis[r];
    out[r] = d0 * b[0] + d1 * b[1] + d2 * b[2] + d3 * b[3];
  }
}
