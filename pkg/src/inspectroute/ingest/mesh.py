"""Triangle meshes and the STL / OBJ readers and writers."""
from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateFace, ParseError

_STL_RECORD = np.dtype([("normal", "<f4", 3), ("v", "<f4", (3, 3)), ("attr", "<u2")])


@dataclass(frozen=True, eq=False)
class Mesh:
    """Triangulated surface. Normals follow the right-hand rule on vertex winding."""

    vertices: np.ndarray
    faces: np.ndarray
    normals: np.ndarray
    areas: np.ndarray

    @classmethod
    def from_arrays(cls, vertices, faces) -> "Mesh":
        V = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
        F = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
        if F.size and (F.min() < 0 or F.max() >= len(V)):
            raise ValueError("face index out of range")
        normals, areas = _face_geometry(V, F)
        if np.any(areas <= 0):
            bad = int(np.flatnonzero(areas <= 0)[0])
            raise ValueError(f"face {bad} is degenerate")
        for a in (V, F, normals, areas):
            a.setflags(write=False)
        return cls(V, F, normals, areas)

    @property
    def n_faces(self) -> int:
        return self.faces.shape[0]

    @property
    def total_area(self) -> float:
        return float(np.sum(self.areas))

    def face_centroids(self) -> np.ndarray:
        return self.vertices[self.faces].mean(axis=1)

    def face_adjacency(self) -> list[list[int]]:
        """Faces sharing an edge, each list sorted ascending."""
        owners: dict[tuple[int, int], list[int]] = {}
        for f, (a, b, c) in enumerate(self.faces.tolist()):
            for u, v in ((a, b), (b, c), (c, a)):
                owners.setdefault((min(u, v), max(u, v)), []).append(f)
        nbrs: list[set[int]] = [set() for _ in range(self.n_faces)]
        for fs in owners.values():
            for f in fs:
                nbrs[f].update(g for g in fs if g != f)
        return [sorted(s) for s in nbrs]


def _face_geometry(V, F):
    if F.shape[0] == 0:
        return np.zeros((0, 3)), np.zeros(0)
    tri = V[F]
    cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    norm = np.linalg.norm(cross, axis=1)
    areas = 0.5 * norm
    with np.errstate(invalid="ignore", divide="ignore"):
        normals = cross / norm[:, None]
    return normals, areas


def _from_triangles(tri: np.ndarray) -> Mesh:
    """Deduplicate vertices by exact coordinates and drop zero-area faces."""
    tri = np.asarray(tri, dtype=np.float64).reshape(-1, 3, 3)
    if tri.shape[0] == 0:
        raise ParseError("no triangles in stream")
    index: dict[tuple, int] = {}
    verts = []
    faces = np.empty((tri.shape[0], 3), dtype=np.int64)
    for f, t in enumerate(tri.tolist()):
        for c, p in enumerate(t):
            key = tuple(p)
            if key not in index:
                index[key] = len(verts)
                verts.append(p)
            faces[f, c] = index[key]
    return _drop_degenerate(np.array(verts), faces)


def _drop_degenerate(V, F) -> Mesh:
    if not np.all(np.isfinite(V)):
        raise ParseError("non-finite vertex coordinate")
    _, areas = _face_geometry(V, F)
    bad = ~(areas > 0)
    for f in np.flatnonzero(bad):
        warnings.warn(DegenerateFace(int(f)), stacklevel=3)
    F = F[~bad]
    if F.shape[0] == 0:
        raise ParseError("mesh has no non-degenerate faces")
    return Mesh.from_arrays(V, F)


def _parse_stl_ascii(text: str) -> Mesh:
    tris = []
    facet: list[list[float]] | None = None
    state = "solid"
    for lineno, raw in enumerate(text.splitlines(), 1):
        tok = raw.split()
        if not tok:
            continue
        key = tok[0].lower()
        if state == "solid":
            if key != "solid":
                raise ParseError("expected 'solid'", line=lineno)
            state = "facet"
        elif state == "facet":
            if key == "facet" and len(tok) >= 2 and tok[1].lower() == "normal":
                facet = []
                state = "loop"
            elif key == "endsolid":
                state = "solid"
            else:
                raise ParseError(f"unexpected {tok[0]!r}", line=lineno)
        elif state == "loop":
            if key == "outer" and len(tok) == 2 and tok[1].lower() == "loop":
                state = "vertex"
            else:
                raise ParseError("expected 'outer loop'", line=lineno)
        elif state == "vertex":
            if key == "vertex":
                if len(tok) != 4:
                    raise ParseError("vertex needs three coordinates", line=lineno)
                try:
                    facet.append([float(x) for x in tok[1:]])
                except ValueError:
                    raise ParseError("bad coordinate", line=lineno) from None
            elif key == "endloop":
                if len(facet) != 3:
                    raise ParseError(f"facet has {len(facet)} vertices, expected 3", line=lineno)
                state = "endfacet"
            else:
                raise ParseError(f"unexpected {tok[0]!r}", line=lineno)
        elif state == "endfacet":
            if key != "endfacet":
                raise ParseError("expected 'endfacet'", line=lineno)
            tris.append(facet)
            state = "facet"
    if state not in ("solid", "facet"):
        raise ParseError("truncated facet at end of stream")
    return _from_triangles(np.array(tris) if tris else np.zeros((0, 3, 3)))


def _parse_stl_binary(data: bytes) -> Mesh:
    if len(data) < 84:
        raise ParseError("binary STL shorter than its 84-byte header", offset=len(data))
    (count,) = struct.unpack_from("<I", data, 80)
    need = 84 + 50 * count
    if len(data) != need:
        raise ParseError(f"binary STL declares {count} triangles ({need} bytes), got {len(data)}", offset=min(len(data), need))
    rec = np.frombuffer(data, dtype=_STL_RECORD, count=count, offset=84)
    return _from_triangles(rec["v"].astype(np.float64))


_OBJ_IGNORED = {"vn", "vt", "vp", "o", "g", "s", "usemtl", "mtllib", "l"}


def _parse_obj(text: str) -> Mesh:
    verts = []
    faces = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        tok = line.split()
        if not tok:
            continue
        key = tok[0]
        if key == "v":
            if len(tok) not in (4, 5):
                raise ParseError("vertex needs three coordinates", line=lineno)
            try:
                verts.append([float(x) for x in tok[1:4]])
            except ValueError:
                raise ParseError("bad coordinate", line=lineno) from None
        elif key == "f":
            if len(tok) != 4:
                raise ParseError("only triangular faces are supported", line=lineno)
            face = []
            for t in tok[1:]:
                try:
                    idx = int(t.split("/", 1)[0])
                except ValueError:
                    raise ParseError(f"bad face index {t!r}", line=lineno) from None
                idx = idx - 1 if idx > 0 else len(verts) + idx
                if not 0 <= idx < len(verts):
                    raise ParseError(f"face index {t!r} out of range", line=lineno)
                face.append(idx)
            faces.append(face)
        elif key not in _OBJ_IGNORED:
            raise ParseError(f"unsupported OBJ statement {key!r}", line=lineno)
    if not faces:
        raise ParseError("no triangles in stream")
    V = np.array(verts, dtype=np.float64)
    return _from_triangles(V[np.array(faces)])


def detect_format(data: bytes) -> str:
    if len(data) >= 84:
        (count,) = struct.unpack_from("<I", data, 80)
        if len(data) == 84 + 50 * count:
            return "stl-binary"
    head = data.lstrip()[:5].lower()
    if head == b"solid":
        return "stl-ascii"
    for line in data.splitlines():
        s = line.strip()
        if s.startswith((b"v ", b"f ")):
            return "obj"
    raise ParseError("unrecognised mesh format", offset=0)


def load_mesh(data: bytes, format: str | None = None) -> Mesh:
    """Parse an STL (ASCII or binary) or triangle-only OBJ stream.

    ``format`` is one of ``"stl-ascii"``, ``"stl-binary"``, ``"obj"``, or
    ``None`` to sniff it. Stored facet normals are ignored.
    """
    if isinstance(data, str):
        data = data.encode()
    if not data or not data.strip():
        raise ParseError("empty stream", offset=0)
    fmt = format or detect_format(data)
    if fmt == "stl-binary":
        return _parse_stl_binary(data)
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as e:
        raise ParseError("non-ASCII byte in text mesh", offset=e.start) from None
    if fmt == "stl-ascii":
        return _parse_stl_ascii(text)
    if fmt == "obj":
        return _parse_obj(text)
    raise ValueError(f"unknown mesh format {format!r}")


def to_stl_ascii(mesh: Mesh, name: str = "mesh") -> bytes:
    out = [f"solid {name}"]
    for f, n in zip(mesh.faces, mesh.normals):
        out.append("  facet normal {!r} {!r} {!r}".format(*n.tolist()))
        out.append("    outer loop")
        for v in mesh.vertices[f].tolist():
            out.append("      vertex {!r} {!r} {!r}".format(*v))
        out.append("    endloop")
        out.append("  endfacet")
    out.append(f"endsolid {name}")
    return ("\n".join(out) + "\n").encode("ascii")


def to_stl_binary(mesh: Mesh) -> bytes:
    rec = np.zeros(mesh.n_faces, dtype=_STL_RECORD)
    rec["normal"] = mesh.normals
    rec["v"] = mesh.vertices[mesh.faces]
    header = b"inspectroute binary STL".ljust(80, b" ")
    return header + struct.pack("<I", mesh.n_faces) + rec.tobytes()


def to_obj(mesh: Mesh) -> bytes:
    out = ["v {!r} {!r} {!r}".format(*v) for v in mesh.vertices.tolist()]
    out += ["f {} {} {}".format(*(i + 1 for i in f)) for f in mesh.faces.tolist()]
    return ("\n".join(out) + "\n").encode("ascii")
