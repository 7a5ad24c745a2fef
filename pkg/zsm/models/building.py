# zsm/models/building.py
"""
Buildings as unions of 3-D constrained zonotopes.
"""

import hashlib
import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import ConvexHull, Delaunay, QhullError

from zsm.core.config import get_settings
from zsm.core.errors import ScenarioError, ZsmError
from zsm.geometry.conzono import ConZono, convex_hull_pair, vertices
from zsm.geometry.linalg import extreme_points
from zsm.geometry.polygon import MultiPolygon2D, from_convex_vertices, union_all
from zsm.models.mesh import TriangleMesh

logger = logging.getLogger(__name__)


def triangle_to_conzono(t1, t2, t3) -> ConZono:
    """
    Triangle conv{t1, t2, t3} as the hull of the hull of {t1, t2} with t3.

    Raises:
        ZsmError: triangle area below the configured tolerance
    """
    corners = np.array([t1, t2, t3], dtype=float)
    area = 0.5 * np.linalg.norm(np.cross(corners[1] - corners[0], corners[2] - corners[0]))
    if area <= get_settings().TRIANGLE_AREA_TOL:
        raise ZsmError(f"Degenerate triangle (area {area:.3e} m²)")
    edge = convex_hull_pair(ConZono.point(corners[0]), ConZono.point(corners[1]))
    return convex_hull_pair(edge, ConZono.point(corners[2]))


def part_vertex_mean(parts: Sequence[ConZono]) -> np.ndarray:
    """Mean of the concatenated per-part vertex lists."""
    stacked = np.vstack([vertices(part).points for part in parts])
    if stacked.shape[0] == 0:
        raise ZsmError("Building parts have no vertices")
    return stacked.mean(axis=0)


def parts_footprint(parts: Sequence[ConZono]) -> MultiPolygon2D:
    """Union over parts of the ground projection of each part's hull."""
    return union_all(from_convex_vertices(vertices(part).points[:, :2]) for part in parts)


@dataclass(frozen=True, eq=False)
class Building:
    """One building: its parts, anchor point, footprint and roof height."""

    id: str
    parts: Tuple[ConZono, ...]
    anchor: np.ndarray
    footprint: MultiPolygon2D
    height: float

    @classmethod
    def create(cls, building_id: str, parts: Sequence[ConZono]) -> "Building":
        parts = tuple(parts)
        if not parts:
            raise ZsmError(f"Building {building_id} has no parts")
        if any(p.dimension != 3 for p in parts):
            raise ZsmError(f"Building {building_id} parts must be 3-D")
        anchor = part_vertex_mean(parts)
        anchor.setflags(write=False)
        height = max(float(vertices(p).points[:, 2].max()) for p in parts)
        return cls(
            id=building_id,
            parts=parts,
            anchor=anchor,
            footprint=parts_footprint(parts),
            height=height,
        )

    @property
    def n_parts(self) -> int:
        return len(self.parts)

    def __repr__(self) -> str:
        return f"<Building(id={self.id}, parts={self.n_parts}, height={self.height:.2f})>"


def footprint(b: Building) -> MultiPolygon2D:
    """Recomputed ground projection of a building."""
    return parts_footprint(b.parts)


def _is_convex_solid(points: np.ndarray, mesh: TriangleMesh) -> bool:
    """Whether every mesh triangle lies on the boundary of the vertex hull."""
    try:
        hull = ConvexHull(points)
    except QhullError:
        return True
    scale = max(1.0, float(np.abs(points).max()))
    centroids = mesh.corners().mean(axis=1)
    distance = centroids @ hull.equations[:, :-1].T + hull.equations[:, -1]
    on_boundary = np.abs(distance).min(axis=1) <= 1e-6 * scale
    return bool(np.all(on_boundary))


# Direction generator plus a triangular AOI piece join every part in a shadow.
SHADOW_GENERATORS = 4


def part_vertex_budget() -> int:
    """Most hull vertices a merged part may have and still cast an enumerable shadow."""
    return get_settings().MAX_GENERATORS - SHADOW_GENERATORS


def _cut(points: np.ndarray, normal: np.ndarray, offset: float, tol: float):
    """Hull vertices of the two halves of conv(points) on either side of a plane."""
    distance = points @ normal - offset
    low, high = np.nonzero((distance[:, None] < -tol) & (distance[None, :] > tol))
    t = distance[low] / (distance[low] - distance[high])
    crossings = points[low] + t[:, None] * (points[high] - points[low])
    below = np.vstack([points[distance <= tol], crossings])
    above = np.vstack([points[distance >= -tol], crossings])
    return extreme_points(below, tol), extreme_points(above, tol)


def split_convex(points: np.ndarray, budget: int) -> List[np.ndarray]:
    """
    Cut a convex hull into convex pieces with at most ``budget`` vertices each.

    Cuts go through the median vertex along a principal axis; the axis with
    the smallest larger half wins. A hull no cut improves is split into
    Delaunay tetrahedra.
    """
    tol = get_settings().VERTEX_TOL
    hull = extreme_points(points, tol)
    if hull.shape[0] <= budget:
        return [hull]
    scale = tol * max(1.0, float(np.abs(hull).max()))
    _, _, axes = np.linalg.svd(hull - hull.mean(axis=0))
    best = None
    for normal in axes:
        along = hull @ normal
        offset = float(np.median(along))
        if not (np.any(along < offset - scale) and np.any(along > offset + scale)):
            continue
        below, above = _cut(hull, normal, offset, scale)
        size = max(below.shape[0], above.shape[0])
        if size < hull.shape[0] and (best is None or size < best[0]):
            best = (size, below, above)
    if best is None:
        try:
            simplices = Delaunay(hull).simplices
        except QhullError as exc:
            raise ZsmError(f"Cannot split a hull of {hull.shape[0]} vertices") from exc
        return [hull[s] for s in simplices]
    _, below, above = best
    return split_convex(below, budget) + split_convex(above, budget)


def build_building(
    parts_mesh: TriangleMesh, merge: bool = True, building_id: str = "B0"
) -> Building:
    """
    Convert a building mesh to constrained zonotopes.

    Args:
        parts_mesh: triangles of one building
        merge: one set for the whole building (its convex hull) instead of one per triangle
        building_id: identifier stored on the building

    Raises:
        ZsmError: the mesh has no triangles
    """
    if parts_mesh.n_triangles == 0:
        raise ZsmError(f"Building {building_id} mesh is empty")
    if not merge:
        parts = [triangle_to_conzono(*corners) for corners in parts_mesh.corners()]
        return Building.create(building_id, parts)

    used = parts_mesh.vertices[np.unique(parts_mesh.triangles)]
    if not _is_convex_solid(used, parts_mesh):
        logger.warning(
            f"Building {building_id} is not convex; merging replaces it by its convex hull"
        )
    pieces = split_convex(used, part_vertex_budget())
    if len(pieces) > 1:
        logger.warning(
            f"Building {building_id} hull is too detailed for one part; "
            f"split into {len(pieces)} convex parts"
        )
    return Building.create(building_id, [ConZono.from_points(piece) for piece in pieces])


@dataclass(frozen=True, eq=False)
class BuildingSet:
    """Ordered collection of buildings."""

    buildings: Tuple[Building, ...] = ()

    @classmethod
    def create(cls, buildings: Sequence[Building]) -> "BuildingSet":
        ids = [b.id for b in buildings]
        if len(set(ids)) != len(ids):
            raise ScenarioError(f"Duplicate building ids in {ids}")
        return cls(tuple(buildings))

    def __iter__(self) -> Iterator[Building]:
        return iter(self.buildings)

    def __len__(self) -> int:
        return len(self.buildings)

    def __getitem__(self, index: int) -> Building:
        return self.buildings[index]

    @property
    def tallest(self) -> float:
        return max((b.height for b in self.buildings), default=0.0)

    @property
    def footprints(self) -> MultiPolygon2D:
        return union_all(b.footprint for b in self.buildings)

    def all_parts(self) -> List[ConZono]:
        return [part for b in self.buildings for part in b.parts]

    def digest(self) -> str:
        """sha256 over ids and part arrays; stable across runs."""
        sha = hashlib.sha256()
        for b in self.buildings:
            sha.update(b.id.encode("utf-8"))
            for part in b.parts:
                for array in (part.center, part.generators, part.con_matrix, part.con_vector):
                    sha.update(np.ascontiguousarray(array, dtype="<f8").tobytes())
                    sha.update(str(array.shape).encode("ascii"))
        return sha.hexdigest()


def build_buildings(
    meshes: Sequence[TriangleMesh], merge: bool = True, prefix: str = "B"
) -> BuildingSet:
    """Convert segmented meshes to a BuildingSet with ids prefix1, prefix2, ..."""
    buildings = [
        build_building(mesh, merge=merge, building_id=f"{prefix}{index}")
        for index, mesh in enumerate(meshes, start=1)
    ]
    logger.info(f"Built {len(buildings)} buildings (merge={merge})")
    return BuildingSet.create(buildings)


def building_from_parts(
    building_id: str, parts: Sequence[ConZono], anchor: Optional[np.ndarray] = None
) -> Building:
    """Rebuild a cached building; a stored anchor must match the recomputed one."""
    b = Building.create(building_id, parts)
    if anchor is not None and not np.allclose(b.anchor, anchor, atol=1e-9, rtol=0):
        raise ZsmError(f"Cached anchor of building {building_id} does not match its parts")
    return b

