# zsm/models/scenario.py
"""
Runtime scenario: satellites placed in ENU, measurements and the AOI.
"""

import dataclasses
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from zsm.core.config import get_settings
from zsm.core.errors import ScenarioError
from zsm.models.building import BuildingSet
from zsm.models.ground import GroundModel, aoi_from, base_height, make_ground
from zsm.schemas.scenario import ScenarioDocument


def sat_position(azimuth: float, elevation: float, distance: float) -> np.ndarray:
    """
    ENU position of a satellite seen from the local origin.

    Args:
        azimuth: degrees clockwise from north
        elevation: degrees in (0, 90]
        distance: meters, positive

    Raises:
        ScenarioError: angle or range out of bounds
    """
    if not 0.0 < elevation <= 90.0:
        raise ScenarioError(f"Elevation must be in (0, 90] degrees, got {elevation}")
    if not distance > 0.0 or not math.isfinite(distance):
        raise ScenarioError(f"Range must be positive, got {distance}")
    if not math.isfinite(azimuth):
        raise ScenarioError(f"Azimuth must be finite, got {azimuth}")
    az, el = math.radians(azimuth), math.radians(elevation)
    return distance * np.array(
        [math.sin(az) * math.cos(el), math.cos(az) * math.cos(el), math.sin(el)]
    )


@dataclass(frozen=True, eq=False)
class Satellite:
    id: str
    position: np.ndarray
    elevation: Optional[float] = None


@dataclass(frozen=True, eq=False)
class Scenario:
    """Everything one ZSM or SM run needs besides the buildings."""

    satellites: Tuple[Satellite, ...]
    cno: Dict[str, float]
    los_threshold: float
    ground: GroundModel
    street_frame: np.ndarray
    true_position: Optional[np.ndarray] = None
    min_elevation_deg: float = 0.0
    name: str = "scenario"

    def elevation_of(self, satellite: Satellite) -> float:
        """Declared elevation, or the elevation seen from the AOI centroid."""
        if satellite.elevation is not None:
            return satellite.elevation
        origin = self.ground.centroid
        base = np.array([origin[0], origin[1], self.ground.height_at(origin)])
        offset = satellite.position - base
        return math.degrees(math.asin(offset[2] / np.linalg.norm(offset)))

    def positions(self) -> np.ndarray:
        return np.array([s.position for s in self.satellites]).reshape(-1, 3)

    def with_satellites(self, satellites: Sequence[Satellite]) -> "Scenario":
        ids = {s.id for s in satellites}
        return dataclasses.replace(
            self,
            satellites=tuple(satellites),
            cno={k: v for k, v in self.cno.items() if k in ids},
        )


def load_scenario(document: ScenarioDocument, buildings: BuildingSet) -> Scenario:
    """Place satellites, build the ground model and AOI for a scenario document."""
    default_range = get_settings().DEFAULT_RANGE
    satellites = []
    for record in document.satellites:
        if record.position is not None:
            satellites.append(Satellite(record.id, np.array(record.position, dtype=float)))
        else:
            distance = record.range if record.range is not None else default_range
            satellites.append(
                Satellite(
                    record.id,
                    sat_position(record.azimuth, record.elevation, distance),
                    record.elevation,
                )
            )

    aoi = document.aoi
    if aoi.ground:
        ground = make_ground([(piece.polygon, piece.height) for piece in aoi.ground])
        model = aoi_from(aoi.polygons, aoi.exclude_footprints, buildings, ground=ground)
    else:
        model = aoi_from(
            aoi.polygons, aoi.exclude_footprints, buildings, height=base_height(buildings)
        )

    return Scenario(
        satellites=tuple(satellites),
        cno=dict(document.cno),
        los_threshold=document.los_threshold,
        ground=model,
        street_frame=np.array(document.street_frame, dtype=float),
        true_position=None if document.true_position is None else np.array(document.true_position),
        min_elevation_deg=document.min_elevation_deg,
        name=document.name,
    )
