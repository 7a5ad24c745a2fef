# zsm/geometry/polygon.py
"""
Planar multi-polygons for GNSS shadows and the position estimate.

Boolean operations run on a 1e-9 m precision grid; slivers below 1e-12 m²
are dropped and rings are re-oriented (outer counterclockwise, holes
clockwise) after every operation.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
import shapely
from shapely.geometry import MultiPolygon, Polygon, mapping, shape
from shapely.geometry.base import BaseGeometry
from shapely.geometry.polygon import orient

from zsm.core.config import get_settings


class BooleanOp(str, Enum):
    """Set operations on regions"""
    UNION = "union"
    INTERSECTION = "intersection"
    DIFFERENCE = "difference"


def _polygons(geometry: BaseGeometry) -> List[Polygon]:
    if geometry is None or geometry.is_empty:
        return []
    if isinstance(geometry, Polygon):
        return [geometry]
    if hasattr(geometry, "geoms"):
        found: List[Polygon] = []
        for part in geometry.geoms:
            found.extend(_polygons(part))
        return found
    return []


@dataclass(frozen=True, eq=False)
class MultiPolygon2D:
    """A planar region made of interior-disjoint polygons with holes."""

    geometry: MultiPolygon

    @classmethod
    def from_geometry(cls, geometry: Optional[BaseGeometry]) -> "MultiPolygon2D":
        """Normalize any shapely result: polygonal parts only, no slivers, oriented rings."""
        sliver = get_settings().SLIVER_AREA
        parts = []
        for polygon in _polygons(geometry):
            if not polygon.is_valid:
                polygon = shapely.make_valid(polygon)
                for fixed in _polygons(polygon):
                    if fixed.area > sliver:
                        parts.append(orient(fixed, sign=1.0))
                continue
            if polygon.area > sliver:
                parts.append(orient(polygon, sign=1.0))
        return cls(MultiPolygon(parts))

    @classmethod
    def empty(cls) -> "MultiPolygon2D":
        return cls(MultiPolygon())

    @classmethod
    def box(cls, xmin: float, ymin: float, xmax: float, ymax: float) -> "MultiPolygon2D":
        return cls.from_geometry(shapely.box(xmin, ymin, xmax, ymax))

    @classmethod
    def from_rings(cls, rings: Iterable[Iterable[Tuple[float, float]]]) -> "MultiPolygon2D":
        """Union of simple polygons given by their outer rings."""
        polygons = [Polygon(ring) for ring in rings]
        if not polygons:
            return cls.empty()
        return cls.from_geometry(
            shapely.union_all(polygons, grid_size=get_settings().SNAP_GRID)
        )

    @property
    def components(self) -> List[Polygon]:
        return list(self.geometry.geoms)

    @property
    def area(self) -> float:
        return float(self.geometry.area)

    @property
    def is_empty(self) -> bool:
        return len(self.geometry.geoms) == 0

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        return tuple(float(v) for v in self.geometry.bounds)

    def to_geojson(self) -> Dict[str, Any]:
        return mapping(self.geometry)

    @classmethod
    def from_geojson(cls, document: Dict[str, Any]) -> "MultiPolygon2D":
        if not document.get("coordinates"):
            return cls.empty()
        return cls.from_geometry(shape(document))

    def svg_path(self, transform=None) -> str:
        """SVG path data with one closed subpath per ring (even-odd fill)."""
        commands = []
        for polygon in self.components:
            for ring in [polygon.exterior, *polygon.interiors]:
                coords = np.asarray(ring.coords)[:-1]
                if transform is not None:
                    coords = transform(coords)
                head, *tail = coords
                commands.append(
                    f"M{head[0]:.3f},{head[1]:.3f}"
                    + "".join(f" L{x:.3f},{y:.3f}" for x, y in tail)
                    + " Z"
                )
        return " ".join(commands)

    def __repr__(self) -> str:
        return f"<MultiPolygon2D(components={len(self.geometry.geoms)}, area={self.area:.6g})>"


# ======================================================================================
# Operations
# ======================================================================================
def from_convex_vertices(points: np.ndarray) -> MultiPolygon2D:
    """Convex hull of 2-D points as a single component; degenerate hulls are empty."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if points.shape[0] < 3:
        return MultiPolygon2D.empty()
    hull = shapely.multipoints(points).convex_hull
    if not isinstance(hull, Polygon):
        return MultiPolygon2D.empty()
    return MultiPolygon2D.from_geometry(hull)


def boolean_op(kind: BooleanOp, a: MultiPolygon2D, b: MultiPolygon2D) -> MultiPolygon2D:
    kind = BooleanOp(kind)
    grid = get_settings().SNAP_GRID
    if kind is BooleanOp.UNION:
        result = shapely.union(a.geometry, b.geometry, grid_size=grid)
    elif kind is BooleanOp.INTERSECTION:
        if a.is_empty or b.is_empty:
            return MultiPolygon2D.empty()
        result = shapely.intersection(a.geometry, b.geometry, grid_size=grid)
    else:
        if b.is_empty:
            return a
        result = shapely.difference(a.geometry, b.geometry, grid_size=grid)
    return MultiPolygon2D.from_geometry(result)


def drop_thin(a: MultiPolygon2D, width: Optional[float] = None) -> MultiPolygon2D:
    """Remove components that are narrower than ``width`` everywhere."""
    width = get_settings().SLIVER_WIDTH if width is None else width
    if a.is_empty or width <= 0.0:
        return a
    kept = [p for p in a.components if not p.buffer(-width / 2.0).is_empty]
    if len(kept) == len(a.components):
        return a
    return MultiPolygon2D(MultiPolygon(kept))


def union_all(regions: Iterable[MultiPolygon2D]) -> MultiPolygon2D:
    geometries = [r.geometry for r in regions if not r.is_empty]
    if not geometries:
        return MultiPolygon2D.empty()
    return MultiPolygon2D.from_geometry(
        shapely.union_all(geometries, grid_size=get_settings().SNAP_GRID)
    )


@dataclass(frozen=True)
class Measures:
    area: float
    bbox: Optional[Tuple[float, float, float, float]]
    centroids: List[Tuple[float, float]]
    component_areas: List[float]
    component_bboxes: List[Tuple[float, float, float, float]]

    @property
    def component_count(self) -> int:
        return len(self.centroids)

    @property
    def widths(self) -> Tuple[float, float]:
        if self.bbox is None:
            return (0.0, 0.0)
        return (self.bbox[2] - self.bbox[0], self.bbox[3] - self.bbox[1])


def measures(a: MultiPolygon2D) -> Measures:
    """Area, global bbox and per-component centroid, area and bbox."""
    components = a.components
    return Measures(
        area=a.area,
        bbox=None if a.is_empty else a.bounds,
        centroids=[(float(c.centroid.x), float(c.centroid.y)) for c in components],
        component_areas=[float(c.area) for c in components],
        component_bboxes=[tuple(float(v) for v in c.bounds) for c in components],
    )


def point_in(a: MultiPolygon2D, x, tol: Optional[float] = None) -> bool:
    """Membership with the boundary counted inside."""
    return bool(points_in(a, np.asarray(x, dtype=float).reshape(1, 2), tol)[0])


def points_in(a: MultiPolygon2D, xy: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    tol = get_settings().POINT_TOL if tol is None else tol
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    if a.is_empty:
        return np.zeros(xy.shape[0], dtype=bool)
    distance = shapely.distance(a.geometry, shapely.points(xy))
    return distance <= tol


def boundary_distance(a: MultiPolygon2D, xy: np.ndarray) -> np.ndarray:
    """Distance from each point to the region boundary (inf for an empty region)."""
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    if a.is_empty:
        return np.full(xy.shape[0], np.inf)
    return shapely.distance(a.geometry.boundary, shapely.points(xy))


def sym_diff_area(a: MultiPolygon2D, b: MultiPolygon2D) -> float:
    return (
        boolean_op(BooleanOp.DIFFERENCE, a, b).area
        + boolean_op(BooleanOp.DIFFERENCE, b, a).area
    )


def triangulate(a: MultiPolygon2D) -> List[np.ndarray]:
    """Constrained Delaunay triangles of the region, each as a (3, 2) array."""
    if a.is_empty:
        return []
    sliver = get_settings().SLIVER_AREA
    triangles = []
    for polygon in a.components:
        for triangle in shapely.constrained_delaunay_triangles(polygon).geoms:
            if triangle.area > sliver:
                triangles.append(np.asarray(triangle.exterior.coords)[:3])
    return triangles
