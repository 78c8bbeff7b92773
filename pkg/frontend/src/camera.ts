/** Arcball camera over the projected 3D slice space. */

export type Mat4 = Float32Array; // column-major 4x4
export type Quat = [number, number, number, number]; // x y z w

export function quatIdentity(): Quat {
  return [0, 0, 0, 1];
}

export function quatMultiply(a: Quat, b: Quat): Quat {
  return [
    a[3] * b[0] + a[0] * b[3] + a[1] * b[2] - a[2] * b[1],
    a[3] * b[1] - a[0] * b[2] + a[1] * b[3] + a[2] * b[0],
    a[3] * b[2] + a[0] * b[1] - a[1] * b[0] + a[2] * b[3],
    a[3] * b[3] - a[0] * b[0] - a[1] * b[1] - a[2] * b[2],
  ];
}

export function quatNormalize(q: Quat): Quat {
  const n = Math.hypot(q[0], q[1], q[2], q[3]) || 1;
  return [q[0] / n, q[1] / n, q[2] / n, q[3] / n];
}

/** Map a screen point (in [-1,1]^2) onto the arcball sphere. */
export function arcballVector(x: number, y: number): [number, number, number] {
  const d2 = x * x + y * y;
  if (d2 <= 0.5) return [x, y, Math.sqrt(1 - d2)];
  return [x, y, 0.5 / Math.sqrt(d2)];
}

/** Rotation taking one arcball vector to another. */
export function arcballRotation(
  from: [number, number, number], to: [number, number, number],
): Quat {
  const cx = from[1] * to[2] - from[2] * to[1];
  const cy = from[2] * to[0] - from[0] * to[2];
  const cz = from[0] * to[1] - from[1] * to[0];
  const d = from[0] * to[0] + from[1] * to[1] + from[2] * to[2];
  return quatNormalize([cx, cy, cz, 1 + d]);
}

export function quatToMat4(q: Quat): Mat4 {
  const [x, y, z, w] = q;
  const m = new Float32Array(16);
  m[0] = 1 - 2 * (y * y + z * z);
  m[1] = 2 * (x * y + z * w);
  m[2] = 2 * (x * z - y * w);
  m[4] = 2 * (x * y - z * w);
  m[5] = 1 - 2 * (x * x + z * z);
  m[6] = 2 * (y * z + x * w);
  m[8] = 2 * (x * z + y * w);
  m[9] = 2 * (y * z - x * w);
  m[10] = 1 - 2 * (x * x + y * y);
  m[15] = 1;
  return m;
}

export function mat4Multiply(a: Mat4, b: Mat4): Mat4 {
  const out = new Float32Array(16);
  for (let c = 0; c < 4; c++) {
    for (let r = 0; r < 4; r++) {
      let acc = 0;
      for (let k = 0; k < 4; k++) acc += a[4 * k + r] * b[4 * c + k];
      out[4 * c + r] = acc;
    }
  }
  return out;
}

export function mat4Perspective(fovY: number, aspect: number, near: number, far: number): Mat4 {
  const f = 1 / Math.tan(fovY / 2);
  const m = new Float32Array(16);
  m[0] = f / aspect;
  m[5] = f;
  m[10] = (far + near) / (near - far);
  m[11] = -1;
  m[14] = (2 * far * near) / (near - far);
  return m;
}

export function mat4Translate(x: number, y: number, z: number): Mat4 {
  const m = new Float32Array(16);
  m[0] = m[5] = m[10] = m[15] = 1;
  m[12] = x;
  m[13] = y;
  m[14] = z;
  return m;
}

export class ArcballCamera {
  rotation: Quat = quatIdentity();
  distance: number;
  target: [number, number, number];

  constructor(distance = 3, target: [number, number, number] = [0, 0, 0]) {
    if (!(distance > 0)) throw new Error("camera distance must be positive");
    this.distance = distance;
    this.target = target;
  }

  drag(x0: number, y0: number, x1: number, y1: number): void {
    const rot = arcballRotation(arcballVector(x0, y0), arcballVector(x1, y1));
    this.rotation = quatNormalize(quatMultiply(rot, this.rotation));
  }

  zoom(factor: number): void {
    this.distance = Math.max(1e-3, this.distance * factor);
  }

  /** Model-view-projection for the current pose. */
  mvp(aspect: number): Mat4 {
    const proj = mat4Perspective(Math.PI / 4, aspect, 0.01, 100);
    const view = mat4Translate(0, 0, -this.distance);
    const model = mat4Multiply(
      quatToMat4(this.rotation),
      mat4Translate(-this.target[0], -this.target[1], -this.target[2]));
    return mat4Multiply(proj, mat4Multiply(view, model));
  }
}
