# Copyright (c) 2026- sgwc_bof contributors
#
# BSD 3-Clause License

"""
Triangle meshes and the per-element geometry of the discrete Laplace-Beltrami operator.

A :class:`Mesh` is immutable once constructed. Vertex areas follow the mixed
Voronoi scheme with the obtuse-triangle fallback, and edge weights are the
halved cotangents of the angles opposite each edge.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import BinaryIO, TextIO

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from sgwc_bof.utils import hash_arrays

logger = logging.getLogger(__name__)

#: Cotangents are clamped to [-COT_CLAMP, COT_CLAMP] so slivers cannot overflow.
COT_CLAMP = 1e6


class MeshFormat(str, Enum):
    """Supported mesh file formats."""

    OFF = "off"
    OBJ = "obj"

    @classmethod
    def from_path(cls, path: str | Path) -> MeshFormat:
        suffix = Path(path).suffix.lower().lstrip(".")
        try:
            return cls(suffix)
        except ValueError:
            raise ValueError(
                f"Cannot infer mesh format from {str(path)!r}; expected a .off or .obj file."
            ) from None


class MeshFormatError(ValueError):
    """Raised when a mesh file cannot be parsed."""

    def __init__(self, message: str, line: int | None = None, source: str = "<stream>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


class MeshIndexError(MeshFormatError):
    """Raised when a face references a vertex that does not exist."""


@dataclass(frozen=True, eq=False)
class Mesh:
    """Triangle mesh with derived adjacency.

    Attributes:
        vertices: (m, 3) float64 coordinates in model units.
        triangles: (F, 3) int64 vertex indices.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        vertices = np.array(self.vertices, dtype=np.float64, copy=True)
        triangles = np.array(self.triangles, dtype=np.int64, copy=True)
        if vertices.ndim != 2 or vertices.shape[1] != 3:
            raise ValueError(f"vertices must have shape (m, 3), got {vertices.shape}")
        if triangles.ndim != 2 or triangles.shape[1] != 3:
            raise ValueError(f"triangles must have shape (F, 3), got {triangles.shape}")
        m = vertices.shape[0]
        if m < 3:
            raise ValueError(f"A mesh needs at least 3 vertices, got {m}.")
        if triangles.shape[0] == 0:
            raise ValueError("A mesh needs at least one triangle.")
        if not np.all(np.isfinite(vertices)):
            raise ValueError("Vertex coordinates must be finite.")
        if triangles.min() < 0 or triangles.max() >= m:
            bad = int(np.flatnonzero((triangles < 0).any(1) | (triangles >= m).any(1))[0])
            raise MeshIndexError(
                f"Triangle {bad} references vertex outside [0, {m}): {triangles[bad].tolist()}"
            )
        repeats = (
            (triangles[:, 0] == triangles[:, 1])
            | (triangles[:, 1] == triangles[:, 2])
            | (triangles[:, 0] == triangles[:, 2])
        )
        if repeats.any():
            bad = int(np.flatnonzero(repeats)[0])
            raise ValueError(f"Triangle {bad} repeats a vertex index: {triangles[bad].tolist()}")
        vertices.flags.writeable = False
        triangles.flags.writeable = False
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "triangles", triangles)

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def n_triangles(self) -> int:
        return int(self.triangles.shape[0])

    @cached_property
    def edges(self) -> np.ndarray:
        """(E, 2) unique undirected edges, each row sorted ascending."""
        t = self.triangles
        pairs = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]], axis=0)
        pairs.sort(axis=1)
        unique = np.unique(pairs, axis=0)
        unique.flags.writeable = False
        return unique

    def edge_lengths(self) -> np.ndarray:
        """Euclidean length of every edge in :attr:`edges` order."""
        e = self.edges
        return np.linalg.norm(self.vertices[e[:, 0]] - self.vertices[e[:, 1]], axis=1)

    def adjacency(self, weighted: bool = False) -> sparse.csr_matrix:
        """Symmetric vertex adjacency; edge lengths as weights when *weighted*."""
        e = self.edges
        data = self.edge_lengths() if weighted else np.ones(len(e))
        upper = sparse.coo_matrix((data, (e[:, 0], e[:, 1])), shape=(self.n_vertices,) * 2)
        return (upper + upper.T).tocsr()

    def is_connected(self) -> bool:
        n_components = csgraph.connected_components(
            self.adjacency(), directed=False, return_labels=False
        )
        return n_components == 1

    def triangle_areas(self) -> np.ndarray:
        v = self.vertices
        t = self.triangles
        cross = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
        return 0.5 * np.linalg.norm(cross, axis=1)

    def total_area(self) -> float:
        return float(self.triangle_areas().sum())

    def content_hash(self) -> str:
        """Hash of the geometry and connectivity; names are ignored."""
        return hash_arrays(self.vertices, self.triangles)

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<Mesh{label} m={self.n_vertices} faces={self.n_triangles}>"


# ── Parsing ───────────────────────────────────────────────────────────


def _read_text(source: str | Path | bytes | BinaryIO | TextIO) -> tuple[str, str]:
    """Return (text, label) for any supported mesh source."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        return path.read_text(encoding="utf-8"), str(path)
    if isinstance(source, bytes):
        return source.decode("utf-8"), "<bytes>"
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data, getattr(source, "name", "<stream>")


def _fan(polygon: list[int]) -> list[list[int]]:
    """Fan-triangulate a polygon in file order."""
    return [[polygon[0], polygon[i], polygon[i + 1]] for i in range(1, len(polygon) - 1)]


def _parse_off(text: str, label: str) -> tuple[list[list[float]], list[list[int]]]:
    lines = [
        (number, line.split("#", 1)[0].strip())
        for number, line in enumerate(text.splitlines(), start=1)
    ]
    lines = [(number, line) for number, line in lines if line]
    if not lines:
        raise MeshFormatError("empty file", line=1, source=label)

    number, header = lines[0]
    tokens = header.split()
    if tokens[0].upper() != "OFF":
        raise MeshFormatError(f"expected 'OFF' header, got {tokens[0]!r}", number, label)
    cursor = 1
    counts = tokens[1:]
    if not counts:
        if len(lines) < 2:
            raise MeshFormatError("missing counts line", number, label)
        number, counts_line = lines[1]
        counts = counts_line.split()
        cursor = 2
    try:
        n_vertices, n_faces = int(counts[0]), int(counts[1])
    except (IndexError, ValueError):
        raise MeshFormatError(f"malformed counts line {' '.join(counts)!r}", number, label) from None

    vertices: list[list[float]] = []
    for number, line in lines[cursor : cursor + n_vertices]:
        parts = line.split()
        try:
            vertices.append([float(parts[0]), float(parts[1]), float(parts[2])])
        except (IndexError, ValueError):
            raise MeshFormatError(f"malformed vertex line {line!r}", number, label) from None
    if len(vertices) < n_vertices:
        raise MeshFormatError(
            f"expected {n_vertices} vertices, found {len(vertices)}", lines[-1][0], label
        )
    cursor += n_vertices

    triangles: list[list[int]] = []
    face_lines = lines[cursor : cursor + n_faces]
    if len(face_lines) < n_faces:
        raise MeshFormatError(
            f"expected {n_faces} faces, found {len(face_lines)}", lines[-1][0], label
        )
    for number, line in face_lines:
        parts = line.split()
        try:
            arity = int(parts[0])
            polygon = [int(p) for p in parts[1 : 1 + arity]]
        except (IndexError, ValueError):
            raise MeshFormatError(f"malformed face line {line!r}", number, label) from None
        if arity < 3 or len(polygon) != arity:
            raise MeshFormatError(f"face needs at least 3 indices: {line!r}", number, label)
        for index in polygon:
            if index < 0 or index >= n_vertices:
                raise MeshIndexError(
                    f"vertex index {index} outside [0, {n_vertices})", number, label
                )
        triangles.extend(_fan(polygon))
    return vertices, triangles


def _obj_index(token: str, n_vertices: int, number: int, label: str) -> int:
    try:
        raw = int(token.split("/", 1)[0])
    except ValueError:
        raise MeshFormatError(f"malformed face index {token!r}", number, label) from None
    if raw == 0:
        raise MeshIndexError("OBJ indices are 1-based; index 0 is invalid", number, label)
    index = raw - 1 if raw > 0 else n_vertices + raw
    if index < 0 or index >= n_vertices:
        raise MeshIndexError(
            f"vertex index {raw} outside the {n_vertices} vertices defined so far", number, label
        )
    return index


def _parse_obj(text: str, label: str) -> tuple[list[list[float]], list[list[int]]]:
    vertices: list[list[float]] = []
    triangles: list[list[int]] = []
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        keyword = parts[0]
        if keyword == "v":
            try:
                vertices.append([float(parts[1]), float(parts[2]), float(parts[3])])
            except (IndexError, ValueError):
                raise MeshFormatError(f"malformed vertex line {line!r}", number, label) from None
        elif keyword == "f":
            if len(parts) < 4:
                raise MeshFormatError(f"face needs at least 3 indices: {line!r}", number, label)
            polygon = [_obj_index(p, len(vertices), number, label) for p in parts[1:]]
            triangles.extend(_fan(polygon))
        # vn, vt, groups, materials: not intrinsic geometry
    return vertices, triangles


def load_mesh(
    source: str | Path | bytes | BinaryIO | TextIO,
    format: MeshFormat | str | None = None,  # noqa: A002
    name: str = "",
) -> Mesh:
    """Load and validate a triangle mesh from an OFF or OBJ source.

    Args:
        source: File path, raw bytes, or an open (binary or text) stream.
        format: ``off`` or ``obj``; inferred from the file suffix when *source* is a path.
        name: Optional label, defaults to the file stem.

    Returns:
        The validated :class:`Mesh`, with vertex order preserved from the file.

    Raises:
        MeshFormatError: On malformed content; the message names the line.
        MeshIndexError: When a face references a missing vertex.
        ValueError: When the mesh has fewer than 3 vertices or no faces.
    """
    if format is None:
        if not isinstance(source, (str, Path)):
            raise ValueError("format is required when loading from a stream")
        format = MeshFormat.from_path(source)  # noqa: A001
    fmt = MeshFormat(str(format.value if isinstance(format, MeshFormat) else format).lower())
    text, label = _read_text(source)
    if isinstance(source, (str, Path)) and not name:
        name = Path(source).stem

    parse = _parse_off if fmt is MeshFormat.OFF else _parse_obj
    vertices, triangles = parse(text, label)
    if len(vertices) < 3:
        raise MeshFormatError(f"a mesh needs at least 3 vertices, found {len(vertices)}", None, label)
    if not triangles:
        raise MeshFormatError("a mesh needs at least one face", None, label)
    try:
        return Mesh(np.asarray(vertices), np.asarray(triangles), name=name)
    except MeshFormatError:
        raise
    except ValueError as e:
        raise MeshFormatError(str(e), None, label) from e


def save_mesh(
    mesh: Mesh,
    target: str | Path | TextIO,
    format: MeshFormat | str | None = None,  # noqa: A002
) -> None:
    """Write *mesh* as OFF (0-based) or OBJ (1-based) text."""
    if format is None:
        if not isinstance(target, (str, Path)):
            raise ValueError("format is required when writing to a stream")
        format = MeshFormat.from_path(target)  # noqa: A001
    fmt = MeshFormat(str(format.value if isinstance(format, MeshFormat) else format).lower())

    buffer = io.StringIO()
    if fmt is MeshFormat.OFF:
        buffer.write("OFF\n")
        buffer.write(f"{mesh.n_vertices} {mesh.n_triangles} {len(mesh.edges)}\n")
        for x, y, z in mesh.vertices:
            buffer.write(f"{float(x)!r} {float(y)!r} {float(z)!r}\n")
        for i, j, k in mesh.triangles:
            buffer.write(f"3 {i} {j} {k}\n")
    else:
        for x, y, z in mesh.vertices:
            buffer.write(f"v {float(x)!r} {float(y)!r} {float(z)!r}\n")
        for i, j, k in mesh.triangles:
            buffer.write(f"f {i + 1} {j + 1} {k + 1}\n")

    if isinstance(target, (str, Path)):
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        Path(target).write_text(buffer.getvalue(), encoding="utf-8")
    else:
        target.write(buffer.getvalue())


# ── Discrete geometry ─────────────────────────────────────────────────


def _corner_cotangents(mesh: Mesh) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-triangle cotangents at each corner, edge vectors and doubled areas.

    Returns:
        cot: (F, 3) cotangent of the angle at corner c (opposite edge (c+1, c+2)).
        sq_len: (F, 3) squared length of the edge opposite corner c.
        double_area: (F,) twice the triangle area.
    """
    v = mesh.vertices
    t = mesh.triangles
    cot = np.empty(t.shape, dtype=np.float64)
    sq_len = np.empty(t.shape, dtype=np.float64)
    double_area = np.linalg.norm(
        np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]]), axis=1
    )
    for c in range(3):
        p = v[t[:, c]]
        a = v[t[:, (c + 1) % 3]] - p
        b = v[t[:, (c + 2) % 3]] - p
        dot = np.einsum("ij,ij->i", a, b)
        with np.errstate(divide="ignore", invalid="ignore"):
            value = dot / double_area
        degenerate = double_area == 0.0
        value[degenerate] = np.sign(dot[degenerate]) * COT_CLAMP
        cot[:, c] = value
        edge = v[t[:, (c + 2) % 3]] - v[t[:, (c + 1) % 3]]
        sq_len[:, c] = np.einsum("ij,ij->i", edge, edge)
    clamped = np.abs(cot) > COT_CLAMP
    if clamped.any():
        logger.debug(f"Clamped {int(clamped.sum())} cotangents to +/-{COT_CLAMP:g}")
    np.clip(cot, -COT_CLAMP, COT_CLAMP, out=cot)
    return cot, sq_len, double_area


def vertex_areas(mesh: Mesh) -> np.ndarray:
    """Mixed Voronoi vertex areas (the diagonal of the mass matrix).

    Non-obtuse triangles contribute their Voronoi sectors; an obtuse triangle
    gives half its area to the obtuse corner and a quarter to the other two.
    Zero-area triangles contribute nothing.
    """
    cot, sq_len, double_area = _corner_cotangents(mesh)
    area = 0.5 * double_area
    t = mesh.triangles

    degenerate = area == 0.0
    if degenerate.any():
        logger.warning(
            f"{int(degenerate.sum())} zero-area triangle(s) in {mesh!r} contribute no vertex area"
        )

    # Voronoi sector at corner c uses the two edges incident to c, each weighted
    # by the cotangent of the angle opposite it.
    sectors = np.empty(t.shape, dtype=np.float64)
    for c in range(3):
        n1, n2 = (c + 1) % 3, (c + 2) % 3
        sectors[:, c] = (sq_len[:, n1] * cot[:, n1] + sq_len[:, n2] * cot[:, n2]) / 8.0

    obtuse_corner = cot < 0.0
    obtuse = obtuse_corner.any(axis=1)
    contribution = np.where(obtuse[:, None], 0.25 * area[:, None], sectors)
    contribution = np.where(obtuse_corner, 0.5 * area[:, None], contribution)
    contribution[degenerate] = 0.0

    return np.bincount(t.ravel(), weights=contribution.ravel(), minlength=mesh.n_vertices)


def cotangent_weights(mesh: Mesh) -> sparse.csr_matrix:
    """Symmetric edge weights c_ij = (cot alpha_ij + cot beta_ij) / 2.

    Boundary edges keep their single halved cotangent. The matrix has a zero
    diagonal and is bit-identical across (i, j) and (j, i).
    """
    cot, _, _ = _corner_cotangents(mesh)
    t = mesh.triangles
    rows, cols, data = [], [], []
    for c in range(3):
        i = t[:, (c + 1) % 3]
        j = t[:, (c + 2) % 3]
        rows.append(np.minimum(i, j))
        cols.append(np.maximum(i, j))
        data.append(0.5 * cot[:, c])
    m = mesh.n_vertices
    upper = sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(m, m)
    ).tocsr()
    upper.sum_duplicates()
    return (upper + upper.T).tocsr()
