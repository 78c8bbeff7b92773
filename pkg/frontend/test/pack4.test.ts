import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { Pack4Error, parsePack4 } from "../src/pack4.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

function loadPack(name: string) {
  const raw = readFileSync(join(FIXTURES, name));
  return parsePack4(raw.buffer.slice(raw.byteOffset, raw.byteOffset + raw.byteLength));
}

describe("pack4 parser", () => {
  it("parses the kuhn fixture", () => {
    const mesh = loadPack("kuhn1.pack4");
    expect(mesh.vertexCount).toBe(16);
    expect(mesh.tetCount).toBe(84);       // unique boundary tets of 24 pentatopes
    expect(mesh.edgeTriCount).toBe(0);
    expect(Array.from(mesh.bboxMin).every((v, i) => v <= 0 || i === 3)).toBe(true);
    expect(mesh.bboxMax[3]).toBeGreaterThanOrEqual(1);
  });

  it("parses the expanding-sphere fixture with refs and edge triangles", () => {
    const mesh = loadPack("esphere.pack4");
    expect(mesh.tetCount).toBeGreaterThan(1000);
    expect(mesh.edgeTriCount).toBeGreaterThan(0);
    expect(mesh.tetRefs.length).toBe(mesh.tetCount);
    // cap tags present
    const refs = new Set(mesh.tetRefs);
    expect(refs.has(1000000)).toBe(true);
    expect(refs.has(1000001)).toBe(true);
    // bbox covers the time range [0, 1]
    expect(mesh.bboxMin[3]).toBeLessThanOrEqual(0);
    expect(mesh.bboxMax[3]).toBeGreaterThanOrEqual(1);
  });

  it("rejects bad magic", () => {
    const buf = new ArrayBuffer(64);
    expect(() => parsePack4(buf)).toThrow(Pack4Error);
  });

  it("rejects truncated files", () => {
    const raw = readFileSync(join(FIXTURES, "kuhn1.pack4"));
    const cut = raw.buffer.slice(raw.byteOffset, raw.byteOffset + raw.byteLength - 8);
    expect(() => parsePack4(cut)).toThrow(/size mismatch/);
  });

  it("handles an empty mesh", () => {
    // header + zero counts + bbox footer
    const buf = new ArrayBuffer(20 + 32);
    const view = new DataView(buf);
    view.setUint32(0, 0x344b4150, true);
    view.setUint32(4, 1, true);
    const mesh = parsePack4(buf);
    expect(mesh.tetCount).toBe(0);
    expect(mesh.vertexCount).toBe(0);
  });
});
