/** GLSL programs. The slicing constants are injected from the generated
 * tables module so the shader and the reference engine share one source. */
import { CASE_EDGES, EDGE_ENDPOINTS, SHAPE_OF_CASE, V2E } from "./gen/tables.js";

function glslIntArray(name: string, arr: Int32Array): string {
  return `const int ${name}[${arr.length}] = int[](${Array.from(arr).join(", ")});`;
}

/** Vertex stage: one invocation per potential slice-triangle vertex.
 *
 * tet = id / 6, vtx = id - 6 * tet; side bits form the case code; the
 * vertex-to-edge table picks the intersected edge; empty cases emit
 * degenerate (collapsed) triangles so there is no divergent discard path.
 */
export const SLICE_VERTEX_SHADER = `#version 300 es
precision highp float;
precision highp int;
precision highp usampler2D;
precision highp sampler2D;

uniform sampler2D coordTex;    // one RGBA32F texel per vertex (x y z t)
uniform usampler2D tetTex;     // one RGBA32UI texel per tet (4 vertex ids)
uniform usampler2D refTex;     // one R32UI texel per tet (entity ref)
uniform int texWidth;
uniform vec4 planeN;
uniform vec4 planeC;
uniform vec4 basisR0;
uniform vec4 basisR1;
uniform vec4 basisR2;
uniform mat4 mvp;
uniform int colorMode;         // 0 by-ref, 1 uniform

out vec3 vColor;
out vec3 vAltitude;
out vec3 vPos;

${glslIntArray("CASE_EDGES", CASE_EDGES)}
${glslIntArray("EDGE_A", new Int32Array(Array.from({ length: 6 }, (_, i) => EDGE_ENDPOINTS[2 * i])))}
${glslIntArray("EDGE_B", new Int32Array(Array.from({ length: 6 }, (_, i) => EDGE_ENDPOINTS[2 * i + 1])))}
${glslIntArray("SHAPE_OF_CASE", SHAPE_OF_CASE)}
${glslIntArray("V2E", V2E)}

vec4 fetchCoord(uint id) {
  ivec2 uv = ivec2(int(id) % texWidth, int(id) / texWidth);
  return texelFetch(coordTex, uv, 0);
}

vec3 refColor(uint r) {
  float h = fract(float(r) * 0.61803398875);
  vec3 k = mod(vec3(5.0, 3.0, 1.0) + h * 6.0, 6.0);
  return 0.35 + 0.6 * clamp(min(k, 4.0 - k), 0.0, 1.0);
}

vec3 slotPoint(int slot, int rcode, uvec4 ids, vec4 p0, vec4 p1, vec4 p2, vec4 p3,
               float d0, float d1, float d2, float d3) {
  int e = CASE_EDGES[4 * rcode + slot];
  vec4 pa; vec4 pb; float da; float db;
  int a = EDGE_A[e]; int b = EDGE_B[e];
  pa = a == 0 ? p0 : (a == 1 ? p1 : (a == 2 ? p2 : p3));
  pb = b == 0 ? p0 : (b == 1 ? p1 : (b == 2 ? p2 : p3));
  da = a == 0 ? d0 : (a == 1 ? d1 : (a == 2 ? d2 : d3));
  db = b == 0 ? d0 : (b == 1 ? d1 : (b == 2 ? d2 : d3));
  float alpha = da / (da - db);
  vec4 p = alpha == 1.0 ? pb : pa + alpha * (pb - pa);
  vec4 rel = p - planeC;
  return vec3(dot(rel, basisR0), dot(rel, basisR1), dot(rel, basisR2));
}

void main() {
  int tet = gl_VertexID / 6;
  int vtx = gl_VertexID - 6 * tet;
  ivec2 tuv = ivec2(tet % texWidth, tet / texWidth);
  uvec4 ids = texelFetch(tetTex, tuv, 0);
  vec4 p0 = fetchCoord(ids.x);
  vec4 p1 = fetchCoord(ids.y);
  vec4 p2 = fetchCoord(ids.z);
  vec4 p3 = fetchCoord(ids.w);
  float d0 = dot(p0 - planeC, planeN);
  float d1 = dot(p1 - planeC, planeN);
  float d2 = dot(p2 - planeC, planeN);
  float d3 = dot(p3 - planeC, planeN);
  int rcode = (d0 <= 0.0 ? 1 : 0) | (d1 <= 0.0 ? 2 : 0)
            | (d2 <= 0.0 ? 4 : 0) | (d3 <= 0.0 ? 8 : 0);
  int shape = SHAPE_OF_CASE[rcode];
  if (shape == 0) {
    gl_Position = vec4(0.0, 0.0, 2.0, 1.0);   // collapsed: clipped away
    vColor = vec3(0.0);
    vAltitude = vec3(0.0);
    vPos = vec3(0.0);
    return;
  }
  int slot = V2E[6 * shape + vtx];
  vec3 p = slotPoint(slot, rcode, ids, p0, p1, p2, p3, d0, d1, d2, d3);

  // Altitudes for the solid wireframe: each emitted vertex carries its
  // distance to the opposite edge of its triangle; the quad's internal
  // diagonal is suppressed with a large constant.
  int tri = vtx / 3;
  int corner = vtx - 3 * tri;
  int s0 = V2E[6 * shape + 3 * tri];
  int s1 = V2E[6 * shape + 3 * tri + 1];
  int s2 = V2E[6 * shape + 3 * tri + 2];
  vec3 q0 = slotPoint(s0, rcode, ids, p0, p1, p2, p3, d0, d1, d2, d3);
  vec3 q1 = slotPoint(s1, rcode, ids, p0, p1, p2, p3, d0, d1, d2, d3);
  vec3 q2 = slotPoint(s2, rcode, ids, p0, p1, p2, p3, d0, d1, d2, d3);
  float twice = length(cross(q1 - q0, q2 - q0));
  vec3 alt = vec3(0.0);
  float opp = corner == 0 ? length(q2 - q1)
            : (corner == 1 ? length(q0 - q2) : length(q1 - q0));
  float h = opp > 0.0 ? twice / opp : 0.0;
  bool suppressed = (shape == 2) && ((tri == 0 && corner == 0) || (tri == 1 && corner == 1));
  alt[corner] = suppressed ? 1.0e4 : h;

  vColor = colorMode == 0 ? refColor(texelFetch(refTex, tuv, 0).x) : vec3(0.65, 0.7, 0.8);
  vAltitude = alt;
  vPos = p;
  gl_Position = mvp * vec4(p, 1.0);
}
`;

export const SLICE_FRAGMENT_SHADER = `#version 300 es
precision highp float;
in vec3 vColor;
in vec3 vAltitude;
in vec3 vPos;
uniform int wireframe;
out vec4 outColor;

void main() {
  vec3 n = normalize(cross(dFdx(vPos), dFdy(vPos)));
  vec3 l = normalize(vec3(0.4, 0.55, 1.0));
  float diffuse = abs(dot(n, l));
  vec3 shade = vColor * (0.3 + 0.7 * diffuse);
  if (wireframe == 1) {
    float d = min(min(vAltitude.x, vAltitude.y), vAltitude.z);
    float w = fwidth(d);
    float edge = 1.0 - smoothstep(0.0, 1.6 * w, d);
    shade = mix(shade, vec3(0.05), 0.85 * edge);
  }
  outColor = vec4(shade, 1.0);
}
`;

/** Edge-surface curves: segments from sliced Edge triangles, drawn as thick
 * red lines via a second (small) draw. One invocation per potential segment
 * endpoint: seg = id / 2. */
export const EDGE_VERTEX_SHADER = `#version 300 es
precision highp float;
precision highp int;
precision highp usampler2D;
precision highp sampler2D;

uniform sampler2D coordTex;
uniform usampler2D edgeTriTex;   // RGBA32UI: 3 vertex ids + ref
uniform int texWidth;
uniform vec4 planeN;
uniform vec4 planeC;
uniform vec4 basisR0;
uniform vec4 basisR1;
uniform vec4 basisR2;
uniform mat4 mvp;

vec4 fetchCoord(uint id) {
  ivec2 uv = ivec2(int(id) % texWidth, int(id) / texWidth);
  return texelFetch(coordTex, uv, 0);
}

void main() {
  int seg = gl_VertexID / 2;
  int end = gl_VertexID - 2 * seg;
  ivec2 tuv = ivec2(seg % texWidth, seg / texWidth);
  uvec4 tri = texelFetch(edgeTriTex, tuv, 0);
  vec4 p[3];
  p[0] = fetchCoord(tri.x);
  p[1] = fetchCoord(tri.y);
  p[2] = fetchCoord(tri.z);
  float d0 = dot(p[0] - planeC, planeN);
  float d1 = dot(p[1] - planeC, planeN);
  float d2 = dot(p[2] - planeC, planeN);
  bool b0 = d0 <= 0.0;
  bool b1 = d1 <= 0.0;
  bool b2 = d2 <= 0.0;
  if ((b0 && b1 && b2) || (!b0 && !b1 && !b2)) {
    gl_Position = vec4(0.0, 0.0, 2.0, 1.0);
    return;
  }
  // the two crossing edges of the triangle, in cyclic order
  int found = 0;
  vec4 hit = vec4(0.0);
  for (int k = 0; k < 3; k++) {
    int i = k;
    int j = k == 2 ? 0 : k + 1;
    float di = i == 0 ? d0 : (i == 1 ? d1 : d2);
    float dj = j == 0 ? d0 : (j == 1 ? d1 : d2);
    if ((di <= 0.0) != (dj <= 0.0)) {
      if (found == end) {
        float alpha = di / (di - dj);
        hit = alpha == 1.0 ? p[j] : p[i] + alpha * (p[j] - p[i]);
      }
      found++;
    }
  }
  vec4 rel = hit - planeC;
  vec3 q = vec3(dot(rel, basisR0), dot(rel, basisR1), dot(rel, basisR2));
  gl_Position = mvp * vec4(q, 1.0);
}
`;

export const EDGE_FRAGMENT_SHADER = `#version 300 es
precision highp float;
out vec4 outColor;
void main() { outColor = vec4(0.85, 0.1, 0.1, 1.0); }
`;
