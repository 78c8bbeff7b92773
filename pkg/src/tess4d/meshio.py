"""Mesh file formats.

Native 4D format: keyword/section text layout (17-significant-digit reals,
1-based indices, vertex ref carries the Steiner flag) plus a little-endian
binary twin that round-trips float64 bit-exactly. Pack4: a little-endian
GPU upload format with float32 coordinates, u32 indices and a bounding-box
footer; pentatopes are pre-expanded to their unique boundary tets. Slice
export: plain text 3D surface (v/f/l lines) grouped per entity tag.
"""
from __future__ import annotations

import struct

import numpy as np

from .errors import CapacityError, MeshParseError
from .mesh4 import SpacetimeMesh, unique_boundary_tets

__all__ = ["write_mesh4", "read_mesh4", "write_pack4", "read_pack4", "Pack4",
           "export_slice"]

_MESH4_VERSION = 1
_TEXT_HEADER = "Mesh4Format"
_BINARY_MAGIC = b"MSH4"
_PACK_MAGIC = b"PAK4"

_SECTIONS = [
    ("Vertices", "vertices", 4),
    ("Tetrahedra", "tets", 4),
    ("Triangles", "triangles", 3),
    ("Edges", "segments", 2),
    ("Pentatopes", "pentatopes", 5),
]
_TAGS = {"tets": "tet_tags", "triangles": "tri_tags",
         "segments": "seg_tags", "pentatopes": "penta_tags"}


# ---------------------------------------------------------------------------
# Native text format

def _write_mesh4_text(path, mesh: SpacetimeMesh):
    lines = [f"{_TEXT_HEADER} {_MESH4_VERSION}", "Dimension 4"]
    for keyword, attr, width in _SECTIONS:
        if attr == "vertices":
            lines.append("Vertices")
            lines.append(str(mesh.n_vertices))
            flags = mesh.steiner.astype(int)
            for row, flag in zip(mesh.vertices, flags):
                coords = " ".join(f"{x:.17g}" for x in row)
                lines.append(f"{coords} {flag}")
            continue
        elems = getattr(mesh, attr)
        if len(elems) == 0:
            continue
        tags = getattr(mesh, _TAGS[attr])
        lines.append(keyword)
        lines.append(str(len(elems)))
        for row, tag in zip(elems + 1, tags):      # 1-based in text form
            lines.append(" ".join(str(v) for v in row) + f" {tag}")
    lines.append("End")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _read_mesh4_text(path):
    with open(path, "r") as fh:
        lines = [ln.strip() for ln in fh]
    lines = [ln for ln in lines if ln]
    pos = 0

    def take(expect=None):
        nonlocal pos
        if pos >= len(lines):
            raise MeshParseError(f"{path}: unexpected end of file at line {pos + 1}")
        ln = lines[pos]
        pos += 1
        if expect is not None and not ln.startswith(expect):
            raise MeshParseError(f"{path}:{pos}: expected {expect!r}, got {ln!r}")
        return ln

    header = take(_TEXT_HEADER).split()
    if len(header) != 2 or header[1] != str(_MESH4_VERSION):
        raise MeshParseError(f"{path}:1: unsupported version {header!r}")
    take("Dimension")

    data = {}
    steiner = None
    while pos < len(lines):
        keyword = take()
        if keyword == "End":
            break
        section = {k: (a, w) for k, a, w in _SECTIONS}.get(keyword)
        if section is None:
            raise MeshParseError(f"{path}:{pos}: unknown section {keyword!r}")
        attr, width = section
        try:
            count = int(take())
        except ValueError as exc:
            raise MeshParseError(f"{path}:{pos}: bad section count") from exc
        rows = []
        tags = []
        for _ in range(count):
            parts = take().split()
            if len(parts) != width + 1:
                raise MeshParseError(f"{path}:{pos}: expected {width + 1} fields")
            rows.append(parts[:width])
            tags.append(parts[width])
        if attr == "vertices":
            data["vertices"] = np.array(rows, dtype=float).reshape(-1, 4)
            steiner = np.array(tags, dtype=np.int64).astype(bool)
        else:
            arr = np.array(rows, dtype=np.int64).reshape(-1, width) - 1
            data[attr] = arr
            data[_TAGS[attr]] = np.array(tags, dtype=np.int64)
    else:
        raise MeshParseError(f"{path}: missing End keyword")
    if "vertices" not in data:
        raise MeshParseError(f"{path}: missing Vertices section")
    return SpacetimeMesh(steiner=steiner, **data).validate()


# ---------------------------------------------------------------------------
# Native binary format

def _write_mesh4_binary(path, mesh: SpacetimeMesh):
    with open(path, "wb") as fh:
        fh.write(_BINARY_MAGIC)
        fh.write(struct.pack("<I", _MESH4_VERSION))
        fh.write(struct.pack("<Q", mesh.n_vertices))
        fh.write(mesh.vertices.astype("<f8").tobytes())
        fh.write(mesh.steiner.astype("<u1").tobytes())
        for _, attr, width in _SECTIONS[1:]:
            elems = getattr(mesh, attr)
            tags = getattr(mesh, _TAGS[attr])
            fh.write(struct.pack("<Q", len(elems)))
            fh.write(elems.astype("<i8").tobytes())
            fh.write(tags.astype("<i8").tobytes())


def _read_mesh4_binary(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    off = 0

    def chunk(n, what):
        nonlocal off
        if off + n > len(raw):
            raise MeshParseError(f"{path}: truncated at byte {off} reading {what}")
        out = raw[off:off + n]
        off += n
        return out

    if chunk(4, "magic") != _BINARY_MAGIC:
        raise MeshParseError(f"{path}: bad magic (not a binary mesh4 file)")
    (version,) = struct.unpack("<I", chunk(4, "version"))
    if version != _MESH4_VERSION:
        raise MeshParseError(f"{path}: unsupported version {version}")
    (nv,) = struct.unpack("<Q", chunk(8, "vertex count"))
    vertices = np.frombuffer(chunk(32 * nv, "vertices"), dtype="<f8").reshape(nv, 4)
    steiner = np.frombuffer(chunk(nv, "steiner flags"), dtype="<u1").astype(bool)
    data = {"vertices": vertices, "steiner": steiner}
    for _, attr, width in _SECTIONS[1:]:
        (count,) = struct.unpack("<Q", chunk(8, f"{attr} count"))
        elems = np.frombuffer(chunk(8 * width * count, attr), dtype="<i8")
        data[attr] = elems.reshape(count, width)
        data[_TAGS[attr]] = np.frombuffer(chunk(8 * count, "tags"), dtype="<i8")
    if off != len(raw):
        raise MeshParseError(f"{path}: {len(raw) - off} trailing bytes")
    return SpacetimeMesh(**data).validate()


def write_mesh4(path, mesh: SpacetimeMesh, binary: bool = False):
    """Write the native format; read(write(m)) == m exactly for both forms."""
    if binary:
        _write_mesh4_binary(path, mesh)
    else:
        _write_mesh4_text(path, mesh)


def read_mesh4(path) -> SpacetimeMesh:
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == _BINARY_MAGIC:
        return _read_mesh4_binary(path)
    return _read_mesh4_text(path)


# ---------------------------------------------------------------------------
# Pack4: GPU upload format

class Pack4:
    """In-memory view of a Pack4 file (f32 coords, u32 indices)."""

    def __init__(self, vertices, tets, tet_refs, edge_tris, edge_refs, bbox):
        self.vertices = vertices
        self.tets = tets
        self.tet_refs = tet_refs
        self.edge_tris = edge_tris
        self.edge_refs = edge_refs
        self.bbox = bbox


def write_pack4(path, mesh: SpacetimeMesh):
    """Pack the mesh for the viewer (pentatopes expanded to unique tets)."""
    tets, tet_tags = unique_boundary_tets(mesh)
    for name, arr in (("vertex", mesh.vertices), ("tet", tets),
                      ("edge triangle", mesh.triangles)):
        if len(arr) >= 2 ** 32:
            raise CapacityError(f"{name} count {len(arr)} exceeds u32 capacity")
    if (tet_tags < 0).any() or (mesh.tri_tags < 0).any():
        raise CapacityError("negative refs cannot be packed as u32")

    verts32 = mesh.vertices.astype("<f4")
    # Round the box outward so the f32 bbox still contains every f32 vertex.
    lo = np.nextafter(verts32.min(axis=0), -np.inf).astype("<f4") if len(verts32) \
        else np.zeros(4, "<f4")
    hi = np.nextafter(verts32.max(axis=0), np.inf).astype("<f4") if len(verts32) \
        else np.zeros(4, "<f4")
    with open(path, "wb") as fh:
        fh.write(_PACK_MAGIC)
        fh.write(struct.pack("<IIII", 1, len(verts32), len(tets), len(mesh.triangles)))
        fh.write(verts32.tobytes())
        tet_block = np.column_stack([tets, tet_tags]).astype("<u4")
        fh.write(tet_block.tobytes())
        tri_block = np.column_stack([mesh.triangles, mesh.tri_tags]).astype("<u4")
        fh.write(tri_block.tobytes())
        fh.write(lo.tobytes())
        fh.write(hi.tobytes())


def read_pack4(path) -> Pack4:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != _PACK_MAGIC:
        raise MeshParseError(f"{path}: bad magic (not a pack4 file)")
    version, nv, nt, ne = struct.unpack("<IIII", raw[4:20])
    if version != 1:
        raise MeshParseError(f"{path}: unsupported pack4 version {version}")
    need = 20 + 16 * nv + 20 * nt + 16 * ne + 32
    if len(raw) != need:
        raise MeshParseError(f"{path}: size {len(raw)} != expected {need}")
    off = 20
    verts = np.frombuffer(raw, "<f4", 4 * nv, off).reshape(nv, 4)
    off += 16 * nv
    tet_block = np.frombuffer(raw, "<u4", 5 * nt, off).reshape(nt, 5)
    off += 20 * nt
    tri_block = np.frombuffer(raw, "<u4", 4 * ne, off).reshape(ne, 4)
    off += 16 * ne
    bbox = np.frombuffer(raw, "<f4", 8, off).reshape(2, 4)
    return Pack4(verts.copy(), tet_block[:, :4].astype(np.int64),
                 tet_block[:, 4].astype(np.int64),
                 tri_block[:, :3].astype(np.int64),
                 tri_block[:, 3].astype(np.int64), bbox.copy())


# ---------------------------------------------------------------------------
# Slice export: 3D surface text format

def export_slice(path, result):
    """Write slice triangles/segments grouped per entity tag.

    Quad-derived triangle pairs share their four corner vertices; vertex
    indices are 1-based and global across groups, deterministic ordering.
    """
    lines = []
    vcount = 0

    def emit_points(pts):
        nonlocal vcount
        base = vcount
        for p in pts:
            lines.append(f"v {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}")
        vcount += len(pts)
        return base

    for tag in np.unique(result.tri_tags) if result.n_triangles else []:
        lines.append(f"o face_{int(tag)}")
        rows = np.nonzero(result.tri_tags == tag)[0]
        by_element = {}
        for r in rows:
            by_element.setdefault(int(result.tri_elements[r]), []).append(int(r))
        for _elem, rlist in sorted(by_element.items()):
            pts = []
            index = {}
            faces = []
            for r in rlist:
                face = []
                for corner in range(3):
                    key = tuple(result.tri_points3[r, corner])
                    if key not in index:
                        index[key] = len(pts)
                        pts.append(key)
                    face.append(index[key])
                faces.append(face)
            base = emit_points(pts)
            for f in faces:
                lines.append(f"f {base + f[0] + 1} {base + f[1] + 1} {base + f[2] + 1}")

    for tag in np.unique(result.seg_tags) if result.n_segments else []:
        lines.append(f"o edge_{int(tag)}")
        rows = np.nonzero(result.seg_tags == tag)[0]
        for r in rows:
            base = emit_points(result.seg_points3[r])
            lines.append(f"l {base + 1} {base + 2}")

    with open(path, "w") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))
