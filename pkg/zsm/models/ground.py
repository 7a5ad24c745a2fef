# zsm/models/ground.py
"""
Ground plane and area of interest as constant-height 2-D pieces.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import shapely

from zsm.core.errors import ScenarioError
from zsm.geometry.conzono import ConZono, vertices
from zsm.geometry.polygon import (
    BooleanOp,
    MultiPolygon2D,
    boolean_op,
    points_in,
    triangulate,
    union_all,
)
from zsm.models.building import BuildingSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GroundPiece:
    """A convex piece of ground at a constant height."""

    region: ConZono
    height: float
    polygon: MultiPolygon2D

    @classmethod
    def from_triangle(cls, triangle: np.ndarray, height: float) -> "GroundPiece":
        return cls(
            region=ConZono.from_points(triangle, detect_parallelotope=False),
            height=float(height),
            polygon=MultiPolygon2D.from_geometry(shapely.Polygon(triangle)),
        )


@dataclass(frozen=True, eq=False)
class GroundModel:
    """Ground pieces, the AOI region and the AOI split into convex pieces."""

    pieces: Tuple[GroundPiece, ...]
    aoi: MultiPolygon2D
    aoi_pieces: Tuple[GroundPiece, ...]

    @property
    def centroid(self) -> np.ndarray:
        c = self.aoi.geometry.centroid
        return np.array([c.x, c.y])

    def heights_at(self, xy: np.ndarray, default: float = 0.0) -> np.ndarray:
        """Ground height under each point; AOI pieces first, then ground pieces."""
        xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        heights = np.full(xy.shape[0], np.nan)
        for piece in (*self.aoi_pieces, *self.pieces):
            unset = np.isnan(heights)
            if not np.any(unset):
                break
            inside = np.zeros_like(unset)
            inside[unset] = points_in(piece.polygon, xy[unset])
            heights[inside] = piece.height
        heights[np.isnan(heights)] = default
        return heights

    def height_at(self, x) -> float:
        return float(self.heights_at(np.asarray(x, dtype=float)[None, :])[0])

    @property
    def lowest(self) -> float:
        return min(p.height for p in (*self.pieces, *self.aoi_pieces))

    def __repr__(self) -> str:
        return (
            f"<GroundModel(pieces={len(self.pieces)}, aoi_pieces={len(self.aoi_pieces)}, "
            f"aoi_area={self.aoi.area:.1f})>"
        )


GroundSpec = Sequence[Tuple[Sequence[Tuple[float, float]], float]]


def _pieces_of(region: MultiPolygon2D, height: float) -> Tuple[GroundPiece, ...]:
    return tuple(GroundPiece.from_triangle(t, height) for t in triangulate(region))


def _check_bounded(region: MultiPolygon2D, what: str) -> None:
    if region.is_empty:
        raise ScenarioError(f"{what} is empty")
    if not np.all(np.isfinite(region.bounds)):
        raise ScenarioError(f"{what} is unbounded")


def make_ground(spec: GroundSpec) -> GroundModel:
    """
    Ground from (polygon ring, height) entries; the whole ground is the AOI.

    Raises:
        ScenarioError: empty or unbounded specification
    """
    if not spec:
        raise ScenarioError("Ground specification is empty")
    pieces = []
    regions = []
    for ring, height in spec:
        region = MultiPolygon2D.from_rings([ring])
        _check_bounded(region, "Ground polygon")
        regions.append(region)
        pieces.extend(_pieces_of(region, height))
    aoi = union_all(regions)
    return GroundModel(pieces=tuple(pieces), aoi=aoi, aoi_pieces=tuple(pieces))


def base_height(buildings: BuildingSet) -> float:
    """Lowest building vertex, used as flat ground when a scenario declares none."""
    lows = [float(vertices(p).points[:, 2].min()) for p in buildings.all_parts()]
    return min(lows, default=0.0)


def aoi_from(
    polygons: Sequence[Sequence[Tuple[float, float]]],
    exclude_footprints: bool,
    buildings: BuildingSet,
    ground: Optional[GroundModel] = None,
    height: float = 0.0,
) -> GroundModel:
    """
    Build the AOI: union of polygons, optionally minus building footprints,
    split into convex pieces that take their heights from the ground model
    (or ``height`` when no ground is given).

    Raises:
        ScenarioError: empty or unbounded AOI
    """
    if not polygons:
        raise ScenarioError("AOI specification is empty")
    aoi = MultiPolygon2D.from_rings(polygons)
    _check_bounded(aoi, "AOI")
    if exclude_footprints and len(buildings):
        aoi = boolean_op(BooleanOp.DIFFERENCE, aoi, buildings.footprints)
        _check_bounded(aoi, "AOI after footprint exclusion")

    if ground is None:
        ground_pieces = _pieces_of(aoi, height)
        return GroundModel(pieces=ground_pieces, aoi=aoi, aoi_pieces=ground_pieces)

    aoi_pieces = []
    covered = []
    for piece in ground.pieces:
        overlap = boolean_op(BooleanOp.INTERSECTION, aoi, piece.polygon)
        if not overlap.is_empty:
            covered.append(overlap)
            aoi_pieces.extend(_pieces_of(overlap, piece.height))
    clipped = union_all(covered)
    lost = aoi.area - clipped.area
    if lost > 1e-6 * max(aoi.area, 1.0):
        logger.warning(f"{lost:.3f} m² of the AOI lies outside the ground model and is dropped")
    _check_bounded(clipped, "AOI within the ground model")
    return GroundModel(pieces=ground.pieces, aoi=clipped, aoi_pieces=tuple(aoi_pieces))
