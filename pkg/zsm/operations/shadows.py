# zsm/operations/shadows.py
"""
Shadow directions, shadow volumes and 2-D GNSS shadows on the ground.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from zsm.core.config import get_settings
from zsm.core.errors import ConfigurationError, FlatnessError, ScenarioError
from zsm.geometry.conzono import ConZono, affine_map, intersect, minkowski_sum, vertices
from zsm.geometry.polygon import (
    BooleanOp,
    MultiPolygon2D,
    boolean_op,
    from_convex_vertices,
    union_all,
)
from zsm.models.building import Building, BuildingSet, part_vertex_mean
from zsm.models.ground import GroundModel

logger = logging.getLogger(__name__)

# Lifts a 2-D ground piece into 3-D; the height goes into the offset.
EMBED = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])


@dataclass(frozen=True)
class ShadowDirection:
    unit: np.ndarray
    satellite_id: str = ""
    building_id: str = ""


@dataclass(frozen=True, eq=False)
class SatelliteShadow:
    satellite_id: str
    region: MultiPolygon2D

    @property
    def area(self) -> float:
        return self.region.area


def building_anchor(b: Building) -> np.ndarray:
    """Mean of the vertices of all parts of the building."""
    return part_vertex_mean(b.parts)


def shadow_direction(
    b: Building, sat_pos: np.ndarray, satellite_id: str = ""
) -> ShadowDirection:
    """
    Unit vector from the building anchor toward the satellite.

    Raises:
        ScenarioError: satellite coincides with the anchor
    """
    offset = np.asarray(sat_pos, dtype=float) - b.anchor
    norm = np.linalg.norm(offset)
    if norm == 0.0:
        raise ScenarioError(f"Satellite {satellite_id} coincides with building {b.id}")
    return ShadowDirection(unit=offset / norm, satellite_id=satellite_id, building_id=b.id)


def check_epsilon(epsilon: float, buildings: BuildingSet) -> None:
    if not epsilon > buildings.tallest:
        raise ConfigurationError(
            f"epsilon {epsilon:g} m must exceed the tallest building ({buildings.tallest:g} m)"
        )


def make_direction_zono(d: ShadowDirection, epsilon: Optional[float] = None) -> ConZono:
    """Segment [-epsilon, epsilon] * unit as a one-generator zonotope."""
    epsilon = get_settings().EPSILON if epsilon is None else epsilon
    if not epsilon > 0:
        raise ConfigurationError(f"epsilon must be positive, got {epsilon}")
    return ConZono.zonotope(np.zeros(3), (epsilon * d.unit)[:, None])


def shadow_volume(part: ConZono, dir_zono: ConZono) -> ConZono:
    return minkowski_sum(part, dir_zono)


def gnss_shadow_piece(vol: ConZono, aoi_piece: ConZono, height: float) -> MultiPolygon2D:
    """
    Ground shadow of a volume inside one AOI piece.

    The piece is lifted to its height and intersected with the volume; the
    vertices must stay on that height.

    Raises:
        FlatnessError: a vertex left the ground plane
    """
    embedded = affine_map(EMBED, np.array([0.0, 0.0, height]), aoi_piece)
    points = vertices(intersect(embedded, vol)).points
    if points.shape[0] == 0:
        return MultiPolygon2D.empty()
    drift = np.abs(points[:, 2] - height).max()
    if drift > get_settings().FLATNESS_TOL:
        raise FlatnessError(f"Shadow vertex {drift:.3e} m off the ground plane at {height}")
    if np.ptp(points[:, :2], axis=0).max() <= get_settings().SEGMENT_TOL:
        return MultiPolygon2D.empty()
    return from_convex_vertices(points[:, :2])


def _projected_bounds(points: np.ndarray, unit: np.ndarray, height: float):
    """Bounding box of points slid along unit down to z = height."""
    travel = (points[:, 2] - height) / unit[2]
    flat = points[:, :2] - travel[:, None] * unit[None, :2]
    return flat.min(axis=0), flat.max(axis=0)


def _building_shadow(
    b: Building,
    sat_pos: np.ndarray,
    satellite_id: str,
    ground: GroundModel,
    epsilon: float,
) -> List[MultiPolygon2D]:
    direction = shadow_direction(b, sat_pos, satellite_id)
    dir_zono = make_direction_zono(direction, epsilon)
    unit = direction.unit
    pieces: List[MultiPolygon2D] = []
    for part in b.parts:
        vol = shadow_volume(part, dir_zono)
        part_points = vertices(part).points
        for piece in ground.aoi_pieces:
            if unit[2] > 1e-9:
                lo, hi = _projected_bounds(part_points, unit, piece.height)
                pxmin, pymin, pxmax, pymax = piece.polygon.bounds
                slack = get_settings().SEGMENT_TOL
                if (
                    lo[0] > pxmax + slack
                    or hi[0] < pxmin - slack
                    or lo[1] > pymax + slack
                    or hi[1] < pymin - slack
                ):
                    continue
            shadow = gnss_shadow_piece(vol, piece.region, piece.height)
            if not shadow.is_empty:
                pieces.append(shadow)
    return pieces


def satellite_shadow(
    buildings: BuildingSet,
    sat_pos: np.ndarray,
    ground: GroundModel,
    epsilon: Optional[float] = None,
    satellite_id: str = "",
    threads: int = 1,
) -> SatelliteShadow:
    """
    Union of the ground shadows of every building part in every AOI piece.

    Buildings are processed concurrently when threads > 1; the union is
    taken in building order.
    """
    epsilon = get_settings().EPSILON if epsilon is None else epsilon
    sat_pos = np.asarray(sat_pos, dtype=float)
    if not len(buildings):
        return SatelliteShadow(satellite_id, MultiPolygon2D.empty())

    def run(b: Building) -> List[MultiPolygon2D]:
        return _building_shadow(b, sat_pos, satellite_id, ground, epsilon)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, buildings))
    else:
        results = [run(b) for b in buildings]

    _warn_truncation(buildings, sat_pos, ground, epsilon, satellite_id)
    region = union_all(piece for pieces in results for piece in pieces)
    region = boolean_op(BooleanOp.INTERSECTION, region, ground.aoi)
    logger.debug(f"Satellite {satellite_id}: shadow area {region.area:.2f} m²")
    return SatelliteShadow(satellite_id, region)


def _warn_truncation(
    buildings: BuildingSet,
    sat_pos: np.ndarray,
    ground: GroundModel,
    epsilon: float,
    satellite_id: str,
) -> None:
    lowest = ground.lowest
    for b in buildings:
        unit = shadow_direction(b, sat_pos, satellite_id).unit
        if epsilon * abs(unit[2]) < b.height - lowest:
            logger.warning(
                f"Shadow of {b.id} for satellite {satellite_id} is truncated; "
                f"epsilon {epsilon:g} m is too short at this elevation"
            )
