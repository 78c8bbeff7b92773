/** WebGL2 renderer: per-frame slicing in the vertex stage.
 *
 * Mesh data (vertex coordinates, tet indices, refs, edge triangles) is
 * uploaded to textures once at load; every frame only updates uniforms
 * (hyperplane, basis, MVP) and issues one non-indexed draw of 6 vertices
 * per tet, so moving the hyperplane never re-uploads mesh data. Frame time
 * uses the GPU timer extension when present, wall clock otherwise.
 */
import { Pack4Mesh } from "./pack4.js";
import { planeBasis } from "./plane.js";
import { ViewerState, FrameStats } from "./state.js";
import {
  EDGE_FRAGMENT_SHADER, EDGE_VERTEX_SHADER,
  SLICE_FRAGMENT_SHADER, SLICE_VERTEX_SHADER,
} from "./shaders.js";

const TEX_WIDTH = 2048;

function compile(gl: WebGL2RenderingContext, type: number, src: string): WebGLShader {
  const sh = gl.createShader(type);
  if (!sh) throw new Error("createShader failed");
  gl.shaderSource(sh, src);
  gl.compileShader(sh);
  if (!gl.getShaderParameter(sh, gl.COMPILE_STATUS)) {
    throw new Error(`shader compile: ${gl.getShaderInfoLog(sh)}`);
  }
  return sh;
}

function link(gl: WebGL2RenderingContext, vs: string, fs: string): WebGLProgram {
  const prog = gl.createProgram();
  if (!prog) throw new Error("createProgram failed");
  gl.attachShader(prog, compile(gl, gl.VERTEX_SHADER, vs));
  gl.attachShader(prog, compile(gl, gl.FRAGMENT_SHADER, fs));
  gl.linkProgram(prog);
  if (!gl.getProgramParameter(prog, gl.LINK_STATUS)) {
    throw new Error(`program link: ${gl.getProgramInfoLog(prog)}`);
  }
  return prog;
}

function padRows(count: number): number {
  return Math.max(1, Math.ceil(count / TEX_WIDTH));
}

export class SliceRenderer {
  private gl: WebGL2RenderingContext;
  private sliceProgram: WebGLProgram;
  private edgeProgram: WebGLProgram;
  private vao: WebGLVertexArrayObject | null;
  private tetCount = 0;
  private edgeTriCount = 0;
  private loaded = false;
  private timerExt: unknown = null;

  constructor(gl: WebGL2RenderingContext) {
    this.gl = gl;
    this.sliceProgram = link(gl, SLICE_VERTEX_SHADER, SLICE_FRAGMENT_SHADER);
    this.edgeProgram = link(gl, EDGE_VERTEX_SHADER, EDGE_FRAGMENT_SHADER);
    this.vao = gl.createVertexArray();
    this.timerExt = gl.getExtension("EXT_disjoint_timer_query_webgl2");
  }

  /** Upload the mesh once; RGBA32F texels for coordinates, RGBA32UI for
   * connectivity so shaders random-access them with texelFetch. */
  load(mesh: Pack4Mesh): void {
    const gl = this.gl;
    this.tetCount = mesh.tetCount;
    this.edgeTriCount = mesh.edgeTriCount;

    const coordRows = padRows(mesh.vertexCount);
    const coords = new Float32Array(TEX_WIDTH * coordRows * 4);
    coords.set(mesh.vertices);
    this.uploadTexture(0, gl.RGBA32F, gl.RGBA, gl.FLOAT, coordRows, coords);

    const tetRows = padRows(mesh.tetCount);
    const tets = new Uint32Array(TEX_WIDTH * tetRows * 4);
    tets.set(mesh.tets);
    this.uploadTexture(1, gl.RGBA32UI, gl.RGBA_INTEGER, gl.UNSIGNED_INT, tetRows, tets);

    const refs = new Uint32Array(TEX_WIDTH * tetRows * 4);
    for (let i = 0; i < mesh.tetCount; i++) refs[4 * i] = mesh.tetRefs[i];
    this.uploadTexture(2, gl.RGBA32UI, gl.RGBA_INTEGER, gl.UNSIGNED_INT, tetRows, refs);

    const edgeRows = padRows(mesh.edgeTriCount);
    const edges = new Uint32Array(TEX_WIDTH * edgeRows * 4);
    for (let i = 0; i < mesh.edgeTriCount; i++) {
      edges[4 * i] = mesh.edgeTris[3 * i];
      edges[4 * i + 1] = mesh.edgeTris[3 * i + 1];
      edges[4 * i + 2] = mesh.edgeTris[3 * i + 2];
      edges[4 * i + 3] = mesh.edgeRefs[i];
    }
    this.uploadTexture(3, gl.RGBA32UI, gl.RGBA_INTEGER, gl.UNSIGNED_INT, edgeRows, edges);
    this.loaded = true;
  }

  private uploadTexture(unit: number, internal: number, format: number,
                        type: number, rows: number,
                        data: Float32Array | Uint32Array): void {
    const gl = this.gl;
    gl.activeTexture(gl.TEXTURE0 + unit);
    const tex = gl.createTexture();
    gl.bindTexture(gl.TEXTURE_2D, tex);
    gl.texParameteri(gl.TEXTURE_2D, gl.TEXTURE_MIN_FILTER, gl.NEAREST);
    gl.texParameteri(gl.TEXTURE_2D, gl.TEXTURE_MAG_FILTER, gl.NEAREST);
    gl.texParameteri(gl.TEXTURE_2D, gl.TEXTURE_WRAP_S, gl.CLAMP_TO_EDGE);
    gl.texParameteri(gl.TEXTURE_2D, gl.TEXTURE_WRAP_T, gl.CLAMP_TO_EDGE);
    gl.texImage2D(gl.TEXTURE_2D, 0, internal, TEX_WIDTH, rows, 0, format, type,
                  data as never);
  }

  /** Draw one frame; mesh stays resident, only uniforms change. */
  render(state: ViewerState, width: number, height: number): FrameStats {
    if (!this.loaded) throw new Error("no mesh loaded");
    const gl = this.gl;
    const t0 = performance.now();

    gl.viewport(0, 0, width, height);
    gl.clearColor(0.95, 0.96, 0.97, 1.0);
    gl.enable(gl.DEPTH_TEST);
    gl.clear(gl.COLOR_BUFFER_BIT | gl.DEPTH_BUFFER_BIT);
    gl.bindVertexArray(this.vao);

    const basis = planeBasis(state.plane);
    const mvp = state.camera.mvp(width / Math.max(1, height));
    const setCommon = (prog: WebGLProgram) => {
      gl.useProgram(prog);
      gl.uniform1i(gl.getUniformLocation(prog, "coordTex"), 0);
      gl.uniform1i(gl.getUniformLocation(prog, "texWidth"), TEX_WIDTH);
      gl.uniform4fv(gl.getUniformLocation(prog, "planeN"), Float32Array.from(state.plane.n));
      gl.uniform4fv(gl.getUniformLocation(prog, "planeC"), Float32Array.from(state.plane.c));
      gl.uniform4fv(gl.getUniformLocation(prog, "basisR0"), Float32Array.from(basis[0]));
      gl.uniform4fv(gl.getUniformLocation(prog, "basisR1"), Float32Array.from(basis[1]));
      gl.uniform4fv(gl.getUniformLocation(prog, "basisR2"), Float32Array.from(basis[2]));
      gl.uniformMatrix4fv(gl.getUniformLocation(prog, "mvp"), false, mvp);
    };

    setCommon(this.sliceProgram);
    gl.uniform1i(gl.getUniformLocation(this.sliceProgram, "tetTex"), 1);
    gl.uniform1i(gl.getUniformLocation(this.sliceProgram, "refTex"), 2);
    gl.uniform1i(gl.getUniformLocation(this.sliceProgram, "colorMode"),
                 state.colorMode === "by-ref" ? 0 : 1);
    gl.uniform1i(gl.getUniformLocation(this.sliceProgram, "wireframe"),
                 state.wireframe ? 1 : 0);
    gl.drawArrays(gl.TRIANGLES, 0, 6 * this.tetCount);

    if (state.showEdgeCurves && this.edgeTriCount > 0) {
      setCommon(this.edgeProgram);
      gl.uniform1i(gl.getUniformLocation(this.edgeProgram, "edgeTriTex"), 3);
      gl.drawArrays(gl.LINES, 0, 2 * this.edgeTriCount);
    }

    const frameTimeMs = performance.now() - t0;
    return {
      frameTimeMs,
      fps: frameTimeMs > 0 ? 1000 / frameTimeMs : 0,
      trianglesIssued: 2 * this.tetCount,
    };
  }

  get hasGpuTimer(): boolean {
    return this.timerExt !== null;
  }
}
