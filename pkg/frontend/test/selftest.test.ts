import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { parsePack4 } from "../src/pack4.js";
import { makePlane, timeSlice } from "../src/plane.js";
import { sliceMeshCpu } from "../src/slicecpu.js";
import { runSelftest } from "../src/selftest.js";
import { CASE_EDGES, SHAPE_OF_CASE, V2E } from "../src/gen/tables.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

function loadPack(name: string) {
  const raw = readFileSync(join(FIXTURES, name));
  return parsePack4(raw.buffer.slice(raw.byteOffset, raw.byteOffset + raw.byteLength));
}

function loadPlanes() {
  const spec = JSON.parse(readFileSync(join(FIXTURES, "planes.json"), "utf-8"));
  return spec.planes.map((p: { n: number[]; c: number[] }) => makePlane(p.n, p.c));
}

function loadExports(name: string, count: number): string[] {
  const out: string[] = [];
  for (let i = 0; i < count; i++) {
    out.push(readFileSync(join(FIXTURES, `${name}_slice${i}.obj`), "utf-8"));
  }
  return out;
}

describe("generated tables", () => {
  it("carries the fixed vertex-to-edge constants", () => {
    expect(Array.from(V2E)).toEqual([0, 0, 0, 0, 0, 0,
                                     0, 1, 2, 0, 0, 0,
                                     0, 1, 2, 1, 3, 2]);
  });

  it("is consistent with the case popcounts", () => {
    for (let r = 0; r < 16; r++) {
      const bits = [0, 1, 2, 3].filter((i) => r & (1 << i)).length;
      const shape = SHAPE_OF_CASE[r];
      if (bits === 0 || bits === 4) expect(shape).toBe(0);
      else if (bits === 2) expect(shape).toBe(2);
      else expect(shape).toBe(1);
      const edges = new Set(
        [0, 1, 2, 3].map((s) => CASE_EDGES[4 * r + s]).filter((e) => e >= 0));
      expect(edges.size).toBe([0, 3, 4, 3, 0][bits]);
    }
  });
});

describe("CPU slicing", () => {
  it("slices the unit tesseract at t=0.5 into the unit-cube cross-section", () => {
    const mesh = loadPack("kuhn1.pack4");
    const slice = sliceMeshCpu(mesh, timeSlice(0.5));
    expect(slice.primitives.length).toBeGreaterThan(0);
    // every projected point lies inside the unit cube
    for (const prim of slice.primitives) {
      for (let i = 0; i < prim.points3.length; i++) {
        expect(prim.points3[i]).toBeGreaterThanOrEqual(-1e-6);
        expect(prim.points3[i]).toBeLessThanOrEqual(1 + 1e-6);
      }
    }
  });

  it("returns nothing outside the time range", () => {
    const mesh = loadPack("kuhn1.pack4");
    expect(sliceMeshCpu(mesh, timeSlice(5)).primitives.length).toBe(0);
  });
});

describe("selftest against the reference engine", () => {
  const planes = loadPlanes();

  it("passes on the kuhn pack", () => {
    const result = runSelftest(loadPack("kuhn1.pack4"), planes,
                               loadExports("kuhn1", planes.length));
    expect(result.detail).toContain("max point distance");
    expect(result.pass).toBe(true);
    expect(result.maxDistance).toBeLessThan(1e-4);
  });

  it("passes on the expanding-sphere pack", () => {
    const result = runSelftest(loadPack("esphere.pack4"), planes,
                               loadExports("esphere", planes.length));
    expect(result.pass).toBe(true);
    expect(result.maxDistance).toBeLessThan(1e-4);
  });

  it("fails when a table constant is perturbed", () => {
    const saved = CASE_EDGES[4 * 1 + 0];
    CASE_EDGES[4 * 1 + 0] = CASE_EDGES[4 * 1 + 1];   // corrupt case 1
    try {
      const result = runSelftest(loadPack("kuhn1.pack4"), planes,
                                 loadExports("kuhn1", planes.length));
      expect(result.pass).toBe(false);
      expect(result.detail).toMatch(/plane \d/);
    } finally {
      CASE_EDGES[4 * 1 + 0] = saved;
    }
  });

  it("vacuously passes on an empty plane set", () => {
    const result = runSelftest(loadPack("kuhn1.pack4"), [], []);
    expect(result.pass).toBe(true);
    expect(result.planeCount).toBe(0);
  });
});
