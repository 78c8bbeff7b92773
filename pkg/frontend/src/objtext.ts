/** Minimal reader for the CLI slice-export text format (v / f / l lines
 * in one object group per entity tag). */

export interface SliceExport {
  groups: { name: string; points: number[][]; faces: number[][]; lines: number[][] }[];
  facePoints: number[][];   // all vertices belonging to face_* groups
  faceCount: number;
}

export function parseSliceExport(text: string): SliceExport {
  const groups: SliceExport["groups"] = [];
  const allPoints: number[][] = [];
  let current: SliceExport["groups"][number] | null = null;
  let faceCount = 0;
  for (const raw of text.split("\n")) {
    const line = raw.trim();
    if (!line) continue;
    const parts = line.split(/\s+/);
    if (parts[0] === "o") {
      current = { name: parts[1], points: [], faces: [], lines: [] };
      groups.push(current);
    } else if (parts[0] === "v") {
      const p = [Number(parts[1]), Number(parts[2]), Number(parts[3])];
      allPoints.push(p);
      current?.points.push(p);
    } else if (parts[0] === "f") {
      current?.faces.push(parts.slice(1).map((s) => Number(s) - 1));
      faceCount++;
    } else if (parts[0] === "l") {
      current?.lines.push(parts.slice(1).map((s) => Number(s) - 1));
    }
  }
  const facePoints: number[][] = [];
  for (const g of groups) {
    if (g.name.startsWith("face_")) facePoints.push(...g.points);
  }
  return { groups, facePoints, faceCount };
}
