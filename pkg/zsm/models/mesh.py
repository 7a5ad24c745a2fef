# zsm/models/mesh.py
"""
Triangle meshes: OBJ-subset and JSON loading, building segmentation.
"""

import json
import logging
from dataclasses import dataclass
from enum import Enum
from typing import BinaryIO, List, Optional, Union

import numpy as np
from pydantic import ValidationError
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from zsm.core.config import get_settings
from zsm.core.errors import MeshParseError
from zsm.geometry.linalg import weld
from zsm.schemas.mesh import MeshDocument

logger = logging.getLogger(__name__)


class MeshFormat(str, Enum):
    """Supported mesh encodings"""
    OBJ = "obj"
    JSON = "json"


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Vertices (V, 3) in local ENU meters and triangles (T, 3) of vertex indices."""

    vertices: np.ndarray
    triangles: np.ndarray

    @classmethod
    def create(cls, vertices, triangles) -> "TriangleMesh":
        vertices = np.asarray(vertices, dtype=float).reshape(-1, 3)
        triangles = np.asarray(triangles, dtype=int).reshape(-1, 3)
        if triangles.size and (triangles.min() < 0 or triangles.max() >= vertices.shape[0]):
            raise MeshParseError(
                f"Triangle index out of range for {vertices.shape[0]} vertices"
            )
        if not np.all(np.isfinite(vertices)):
            raise MeshParseError("Mesh contains non-finite coordinates")
        vertices.setflags(write=False)
        triangles.setflags(write=False)
        return cls(vertices=vertices, triangles=triangles)

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    def corners(self) -> np.ndarray:
        """(T, 3, 3) array of triangle corner coordinates."""
        return self.vertices[self.triangles]

    def triangle_areas(self) -> np.ndarray:
        corners = self.corners()
        cross = np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])
        return 0.5 * np.linalg.norm(cross, axis=1)

    def submesh(self, triangle_ids: np.ndarray) -> "TriangleMesh":
        """Mesh of the selected triangles with unused vertices dropped."""
        chosen = self.triangles[np.asarray(triangle_ids, dtype=int)]
        used, remapped = np.unique(chosen, return_inverse=True)
        return TriangleMesh.create(self.vertices[used], remapped.reshape(-1, 3))

    def to_document(self) -> MeshDocument:
        return MeshDocument(
            vertices=[tuple(v) for v in self.vertices.tolist()],
            triangles=[tuple(t) for t in self.triangles.tolist()],
        )

    def __repr__(self) -> str:
        return f"<TriangleMesh(vertices={self.vertices.shape[0]}, triangles={self.n_triangles})>"


def _drop_degenerate(mesh: TriangleMesh) -> TriangleMesh:
    areas = mesh.triangle_areas()
    keep = areas > get_settings().TRIANGLE_AREA_TOL
    if np.all(keep):
        return mesh
    logger.warning(f"Dropped {int((~keep).sum())} degenerate triangles")
    return TriangleMesh.create(mesh.vertices, mesh.triangles[keep])


def _obj_index(token: str, count: int, line: int) -> int:
    head = token.split("/")[0]
    try:
        index = int(head)
    except ValueError:
        raise MeshParseError(f"Invalid face index '{token}'", line)
    if index == 0:
        raise MeshParseError("Face index 0 is not valid in OBJ", line)
    resolved = index - 1 if index > 0 else count + index
    if not 0 <= resolved < count:
        raise MeshParseError(f"Face index {index} out of range", line)
    return resolved


def _parse_obj(text: str, fan: bool) -> TriangleMesh:
    vertices: List[List[float]] = []
    triangles: List[List[int]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, *fields = line.split()
        if keyword == "v":
            if len(fields) < 3:
                raise MeshParseError("Vertex record needs three coordinates", number)
            try:
                vertices.append([float(f) for f in fields[:3]])
            except ValueError:
                raise MeshParseError(f"Invalid vertex coordinates: {' '.join(fields[:3])}", number)
        elif keyword == "f":
            if len(fields) < 3:
                raise MeshParseError("Face record needs at least three indices", number)
            if len(fields) > 3 and not fan:
                raise MeshParseError(f"Non-triangular face with {len(fields)} corners", number)
            indices = [_obj_index(f, len(vertices), number) for f in fields]
            for k in range(1, len(indices) - 1):
                triangles.append([indices[0], indices[k], indices[k + 1]])
        # other OBJ records (vn, vt, o, g, s, usemtl, ...) carry no geometry we need
    return TriangleMesh.create(vertices, triangles)


def load_mesh(
    source: Union[BinaryIO, bytes, str],
    fmt: Union[MeshFormat, str] = MeshFormat.OBJ,
    fan: bool = True,
) -> TriangleMesh:
    """
    Parse a triangle mesh.

    Args:
        source: byte stream, raw bytes or text
        fmt: "obj" (v and f records, polygonal faces fan-triangulated) or "json"
        fan: fan-triangulate polygonal OBJ faces; otherwise they are an error

    Returns:
        TriangleMesh: parsed mesh with degenerate triangles removed

    Raises:
        MeshParseError: malformed input (with the line number for OBJ)
    """
    fmt = MeshFormat(fmt)
    if isinstance(source, (bytes, str)):
        data = source
    else:
        data = source.read()
    try:
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    except UnicodeDecodeError as e:
        raise MeshParseError(f"Mesh is not UTF-8 text (byte {e.start})") from e

    if fmt is MeshFormat.OBJ:
        mesh = _parse_obj(text, fan)
    else:
        try:
            document = MeshDocument.model_validate_json(text)
        except ValidationError as e:
            raise MeshParseError(f"Invalid mesh document: {e.errors()[0]['msg']}")
        mesh = TriangleMesh.create(document.vertices, document.triangles)
    logger.info(f"Loaded {mesh!r}")
    return _drop_degenerate(mesh)


def dump_mesh(mesh: TriangleMesh) -> str:
    return json.dumps(mesh.to_document().model_dump(mode="json"), indent=2)


def segment_buildings(mesh: TriangleMesh, weld_tol: Optional[float] = None) -> List[TriangleMesh]:
    """
    Split a mesh into buildings: connected components of the vertex graph
    whose edges are triangle sides, after welding vertices within weld_tol.

    Components are ordered by their first triangle.
    """
    weld_tol = get_settings().WELD_TOL if weld_tol is None else weld_tol
    if mesh.n_triangles == 0:
        return []
    labels = weld(mesh.vertices, weld_tol)
    welded = labels[mesh.triangles]
    rows = np.concatenate([welded[:, 0], welded[:, 1]])
    cols = np.concatenate([welded[:, 1], welded[:, 2]])
    count = int(labels.max()) + 1
    graph = coo_matrix((np.ones(rows.size), (rows, cols)), shape=(count, count))
    _, component = connected_components(graph, directed=False)
    triangle_component = component[welded[:, 0]]
    _, first = np.unique(triangle_component, return_index=True)
    order = triangle_component[np.sort(first)]
    parts = [mesh.submesh(np.flatnonzero(triangle_component == label)) for label in order]
    logger.info(f"Segmented mesh into {len(parts)} buildings")
    return parts


def read_mesh_file(path, fan: bool = True) -> TriangleMesh:
    """Load a mesh from disk; the suffix picks the format."""
    fmt = MeshFormat.JSON if str(path).lower().endswith(".json") else MeshFormat.OBJ
    with open(path, "rb") as handle:
        return load_mesh(handle, fmt, fan=fan)
