/** Browser entry: wires the renderer, camera and controls together. */
import { parsePack4, Pack4Mesh } from "./pack4.js";
import { SliceRenderer } from "./renderer.js";
import { ViewerState } from "./state.js";
import { runSelftest } from "./selftest.js";
import { makePlane } from "./plane.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setStatus(text: string): void {
  el<HTMLDivElement>("status").textContent = text;
}

async function start(): Promise<void> {
  const canvas = el<HTMLCanvasElement>("view");
  const gl = canvas.getContext("webgl2");
  if (!gl) {
    setStatus("WebGL2 is not available in this browser");
    return;
  }
  const renderer = new SliceRenderer(gl);
  const state = new ViewerState();
  let mesh: Pack4Mesh | null = null;
  let frames = 0;
  let accum = 0;

  const timeSlider = el<HTMLInputElement>("time");
  const normalBox = el<HTMLInputElement>("normal");
  const pointBox = el<HTMLInputElement>("point");

  function applyMesh(m: Pack4Mesh, name: string): void {
    mesh = m;
    renderer.load(m);
    const tmin = m.bboxMin[3];
    const tmax = m.bboxMax[3];
    timeSlider.min = String(tmin);
    timeSlider.max = String(tmax);
    timeSlider.step = String((tmax - tmin) / 1000 || 0.001);
    timeSlider.value = String(0.5 * (tmin + tmax));
    state.setTime(Number(timeSlider.value));
    const span = Math.max(
      m.bboxMax[0] - m.bboxMin[0], m.bboxMax[1] - m.bboxMin[1],
      m.bboxMax[2] - m.bboxMin[2], 1e-6);
    state.camera.distance = 2.2 * span;
    setStatus(`${name}: ${m.tetCount} tets, ${m.vertexCount} vertices, `
      + `${m.edgeTriCount} edge triangles; gpu timer: ${renderer.hasGpuTimer}`);
  }

  el<HTMLInputElement>("file").addEventListener("change", async (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    try {
      applyMesh(parsePack4(await file.arrayBuffer()), file.name);
    } catch (err) {
      setStatus(`load error: ${(err as Error).message}`);
    }
  });

  const packUrl = new URLSearchParams(location.search).get("pack");
  if (packUrl) {
    try {
      const resp = await fetch(packUrl);
      applyMesh(parsePack4(await resp.arrayBuffer()), packUrl);
    } catch (err) {
      setStatus(`load error: ${(err as Error).message}`);
    }
  }

  timeSlider.addEventListener("input", () => state.setTime(Number(timeSlider.value)));
  el<HTMLButtonElement>("applyPlane").addEventListener("click", () => {
    try {
      const n = normalBox.value.split(",").map(Number);
      const c = pointBox.value.split(",").map(Number);
      state.setPlane(n, c);
    } catch (err) {
      setStatus(`plane error: ${(err as Error).message}`);
    }
  });
  el<HTMLInputElement>("wireframe").addEventListener("change", (ev) => {
    state.wireframe = (ev.target as HTMLInputElement).checked;
  });
  el<HTMLInputElement>("edges").addEventListener("change", (ev) => {
    state.showEdgeCurves = (ev.target as HTMLInputElement).checked;
  });
  el<HTMLSelectElement>("colormode").addEventListener("change", (ev) => {
    state.colorMode = (ev.target as HTMLSelectElement).value === "uniform"
      ? "uniform" : "by-ref";
  });

  let dragging = false;
  let last: [number, number] = [0, 0];
  const toBall = (e: PointerEvent): [number, number] => [
    (2 * e.offsetX) / canvas.clientWidth - 1,
    1 - (2 * e.offsetY) / canvas.clientHeight,
  ];
  canvas.addEventListener("pointerdown", (e) => {
    dragging = true;
    last = toBall(e);
    canvas.setPointerCapture(e.pointerId);
  });
  canvas.addEventListener("pointermove", (e) => {
    if (!dragging) return;
    const cur = toBall(e);
    state.camera.drag(last[0], last[1], cur[0], cur[1]);
    last = cur;
  });
  canvas.addEventListener("pointerup", () => (dragging = false));
  canvas.addEventListener("wheel", (e) => {
    e.preventDefault();
    state.camera.zoom(Math.exp(0.001 * e.deltaY));
  }, { passive: false });

  el<HTMLButtonElement>("selftest").addEventListener("click", async () => {
    if (!mesh) {
      setStatus("selftest: load a pack first");
      return;
    }
    try {
      const spec = await (await fetch("test/fixtures/planes.json")).json();
      const name = mesh.tetCount < 1000 ? "kuhn1" : "esphere";
      const planes = spec.planes.map((p: { n: number[]; c: number[] }) =>
        makePlane(p.n, p.c));
      const exports: string[] = [];
      for (let i = 0; i < planes.length; i++) {
        exports.push(await (await fetch(`test/fixtures/${name}_slice${i}.obj`)).text());
      }
      const result = runSelftest(mesh, planes, exports);
      setStatus(`selftest ${result.pass ? "PASS" : "FAIL"}: ${result.detail}`);
    } catch (err) {
      setStatus(`selftest unavailable: ${(err as Error).message}`);
    }
  });

  function frame(): void {
    if (mesh) {
      const dpr = window.devicePixelRatio || 1;
      canvas.width = Math.floor(canvas.clientWidth * dpr);
      canvas.height = Math.floor(canvas.clientHeight * dpr);
      const stats = renderer.render(state, canvas.width, canvas.height);
      accum += stats.frameTimeMs;
      frames++;
      if (frames % 30 === 0) {
        el<HTMLDivElement>("fps").textContent =
          `${(1000 / (accum / 30)).toFixed(1)} FPS | `
          + `${(accum / 30).toFixed(2)} ms | ~${stats.trianglesIssued} tris issued`;
        accum = 0;
      }
    }
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);
}

start();
