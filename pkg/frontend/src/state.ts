/** Viewer state mutated by input handlers between frames. */
import { ArcballCamera } from "./camera.js";
import { Hyperplane, timeSlice } from "./plane.js";

export type ColorMode = "by-ref" | "uniform";

export class ViewerState {
  plane: Hyperplane = timeSlice(0.5);
  camera = new ArcballCamera();
  colorMode: ColorMode = "by-ref";
  wireframe = true;
  showEdgeCurves = true;
  /** time-slider shortcut: sets plane = timeSlice(t) */
  setTime(t: number): void {
    this.plane = timeSlice(t);
  }
  setPlane(n: number[], c: number[]): void {
    const norm = Math.hypot(n[0], n[1], n[2], n[3]);
    if (!(norm > 0)) throw new Error("normal must be nonzero");
    this.plane = {
      n: Float64Array.from(n.map((v) => v / norm)),
      c: Float64Array.from(c),
    };
  }
}

export interface FrameStats {
  frameTimeMs: number;
  fps: number;
  trianglesIssued: number;
}
