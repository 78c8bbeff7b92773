/** Renderer contract: mesh data uploads once, frames touch only uniforms
 * and draws (the interactivity requirement), even while the time slider
 * animates over a >= 100k tet mesh.
 */
import { describe, expect, it } from "vitest";

import { Pack4Mesh } from "../src/pack4.js";
import { SliceRenderer } from "../src/renderer.js";
import { ViewerState } from "../src/state.js";

class RecordingGL {
  calls: Record<string, number> = {};
  drawCounts: number[] = [];

  // constants (values only need to be distinct)
  VERTEX_SHADER = 1; FRAGMENT_SHADER = 2; COMPILE_STATUS = 3; LINK_STATUS = 4;
  TEXTURE_2D = 5; TEXTURE0 = 33984; RGBA32F = 7; RGBA32UI = 8; RGBA = 9;
  RGBA_INTEGER = 10; FLOAT = 11; UNSIGNED_INT = 12; NEAREST = 13;
  CLAMP_TO_EDGE = 14; TEXTURE_MIN_FILTER = 15; TEXTURE_MAG_FILTER = 16;
  TEXTURE_WRAP_S = 17; TEXTURE_WRAP_T = 18; TRIANGLES = 19; LINES = 20;
  DEPTH_TEST = 21; COLOR_BUFFER_BIT = 1 << 6; DEPTH_BUFFER_BIT = 1 << 7;

  private count(name: string) {
    this.calls[name] = (this.calls[name] ?? 0) + 1;
  }
  createShader() { this.count("createShader"); return {}; }
  shaderSource() { this.count("shaderSource"); }
  compileShader() { this.count("compileShader"); }
  getShaderParameter() { return true; }
  getShaderInfoLog() { return ""; }
  createProgram() { this.count("createProgram"); return {}; }
  attachShader() { this.count("attachShader"); }
  linkProgram() { this.count("linkProgram"); }
  getProgramParameter() { return true; }
  getProgramInfoLog() { return ""; }
  useProgram() { this.count("useProgram"); }
  createVertexArray() { return {}; }
  bindVertexArray() { this.count("bindVertexArray"); }
  getExtension() { return null; }
  createTexture() { this.count("createTexture"); return {}; }
  activeTexture() { this.count("activeTexture"); }
  bindTexture() { this.count("bindTexture"); }
  texParameteri() { this.count("texParameteri"); }
  texImage2D() { this.count("texImage2D"); }
  texSubImage2D() { this.count("texSubImage2D"); }
  bufferData() { this.count("bufferData"); }
  getUniformLocation() { this.count("getUniformLocation"); return {}; }
  uniform1i() { this.count("uniform1i"); }
  uniform4fv() { this.count("uniform4fv"); }
  uniformMatrix4fv() { this.count("uniformMatrix4fv"); }
  viewport() { this.count("viewport"); }
  clearColor() { this.count("clearColor"); }
  enable() { this.count("enable"); }
  clear() { this.count("clear"); }
  drawArrays(_mode: number, _first: number, count: number) {
    this.count("drawArrays");
    this.drawCounts.push(count);
  }
}

function syntheticPack(tetCount: number): Pack4Mesh {
  const nv = 64;
  const vertices = new Float32Array(nv * 4);
  for (let i = 0; i < nv; i++) {
    vertices[4 * i] = Math.sin(i * 1.7);
    vertices[4 * i + 1] = Math.cos(i * 2.3);
    vertices[4 * i + 2] = Math.sin(i * 0.9 + 1);
    vertices[4 * i + 3] = (i % 16) / 15;
  }
  const tets = new Uint32Array(tetCount * 4);
  for (let i = 0; i < tetCount; i++) {
    tets[4 * i] = i % nv;
    tets[4 * i + 1] = (i + 7) % nv;
    tets[4 * i + 2] = (i + 23) % nv;
    tets[4 * i + 3] = (i + 41) % nv;
  }
  return {
    vertices, vertexCount: nv,
    tets, tetCount, tetRefs: new Uint32Array(tetCount),
    edgeTris: new Uint32Array(0), edgeTriCount: 0, edgeRefs: new Uint32Array(0),
    bboxMin: Float32Array.from([-1, -1, -1, 0]),
    bboxMax: Float32Array.from([1, 1, 1, 1]),
  };
}

describe("renderer upload discipline", () => {
  it("uploads mesh data once and never re-uploads while animating", () => {
    const gl = new RecordingGL();
    const renderer = new SliceRenderer(gl as unknown as WebGL2RenderingContext);
    const mesh = syntheticPack(120_000);
    renderer.load(mesh);
    const uploadsAfterLoad = gl.calls["texImage2D"] ?? 0;
    expect(uploadsAfterLoad).toBe(4);  // coords, tets, refs, edge tris

    const state = new ViewerState();
    const frames = 25;
    for (let f = 0; f < frames; f++) {
      state.setTime(f / (frames - 1));         // animate across [t0, tf]
      const stats = renderer.render(state, 800, 600);
      expect(stats.trianglesIssued).toBe(2 * mesh.tetCount);
    }
    expect(gl.calls["texImage2D"]).toBe(uploadsAfterLoad);
    expect(gl.calls["texSubImage2D"] ?? 0).toBe(0);
    expect(gl.calls["bufferData"] ?? 0).toBe(0);
    // one slice draw per frame, six vertices per tet
    expect(gl.drawCounts.length).toBe(frames);
    for (const count of gl.drawCounts) {
      expect(count).toBe(6 * mesh.tetCount);
    }
    // the hyperplane travels as per-frame uniforms
    expect(gl.calls["uniform4fv"]).toBeGreaterThanOrEqual(frames * 5);
  });

  it("draws the edge pass only when enabled and present", () => {
    const gl = new RecordingGL();
    const renderer = new SliceRenderer(gl as unknown as WebGL2RenderingContext);
    const mesh = syntheticPack(10);
    mesh.edgeTris = new Uint32Array([0, 1, 2, 3, 4, 5]);
    mesh.edgeRefs = new Uint32Array([0, 1]);
    mesh.edgeTriCount = 2;
    renderer.load(mesh);
    const state = new ViewerState();
    renderer.render(state, 100, 100);
    expect(gl.drawCounts).toEqual([60, 4]);    // 6*tets, then 2*edgeTris
    state.showEdgeCurves = false;
    renderer.render(state, 100, 100);
    expect(gl.drawCounts).toEqual([60, 4, 60]);
  });

  it("refuses to render before load", () => {
    const gl = new RecordingGL();
    const renderer = new SliceRenderer(gl as unknown as WebGL2RenderingContext);
    expect(() => renderer.render(new ViewerState(), 10, 10)).toThrow(/no mesh/);
  });
});
