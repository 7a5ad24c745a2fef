# zsm/operations/emulation.py
"""
Ideal-classifier C/N0 emulation: blocked satellites get an attenuated value
below the LOS threshold, visible ones the open-sky value.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from zsm.core.config import get_settings
from zsm.core.errors import ScenarioError
from zsm.geometry.conzono import segments_hit
from zsm.geometry.polygon import MultiPolygon2D, boundary_distance, point_in
from zsm.models.building import BuildingSet
from zsm.models.scenario import Satellite
from zsm.schemas.scenario import EmulationSpec, ScenarioDocument, Visibility

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Emulation:
    cno: Dict[str, float]
    labels: Dict[str, Visibility]

    @property
    def nlos_count(self) -> int:
        return sum(1 for v in self.labels.values() if v is Visibility.NLOS)


def occluded(receiver: np.ndarray, sat_pos: np.ndarray, buildings: BuildingSet) -> bool:
    """Whether the segment receiver -> satellite meets any building part."""
    start = np.asarray(receiver, dtype=float)[None, :]
    return any(bool(segments_hit(part, start, sat_pos)[0]) for part in buildings.all_parts())


def emulate(
    true_pos,
    buildings: BuildingSet,
    satellites: Sequence[Satellite],
    spec: Optional[EmulationSpec] = None,
    ground_height: float = 0.0,
    aoi: Optional[MultiPolygon2D] = None,
) -> Emulation:
    """
    C/N0 values and labels for a receiver at true_pos on the ground.

    Jitter is uniform in [-jitter, jitter] and clipped so that no value
    crosses the threshold; classify() on the output reproduces the labels.

    Raises:
        ScenarioError: true position outside the AOI or inside a building footprint
    """
    spec = EmulationSpec() if spec is None else spec
    xy = np.asarray(true_pos, dtype=float).reshape(2)
    if aoi is not None and not point_in(aoi, xy):
        raise ScenarioError(f"True position {tuple(xy)} lies outside the AOI")
    footprints = buildings.footprints
    tol = get_settings().POINT_TOL
    if point_in(footprints, xy) and boundary_distance(footprints, xy[None, :])[0] > tol:
        raise ScenarioError(f"True position {tuple(xy)} lies inside a building footprint")

    receiver = np.array([xy[0], xy[1], ground_height])
    rng = np.random.default_rng(spec.seed)
    offsets = rng.uniform(-spec.jitter, spec.jitter, size=len(satellites))
    below = np.nextafter(spec.threshold, -np.inf)
    cno: Dict[str, float] = {}
    labels: Dict[str, Visibility] = {}
    for satellite, offset in zip(satellites, offsets):
        if occluded(receiver, satellite.position, buildings):
            labels[satellite.id] = Visibility.NLOS
            cno[satellite.id] = float(min(spec.attenuated_cno + offset, below))
        else:
            labels[satellite.id] = Visibility.LOS
            cno[satellite.id] = float(max(spec.base_cno + offset, spec.threshold))
    result = Emulation(cno=cno, labels=labels)
    logger.info(
        f"Emulated {len(satellites)} satellites at {tuple(xy)}: {result.nlos_count} NLOS"
    )
    return result


def emulate_document(
    document: ScenarioDocument,
    buildings: BuildingSet,
    satellites: Sequence[Satellite],
    spec: Optional[EmulationSpec] = None,
    ground_height: float = 0.0,
) -> ScenarioDocument:
    """Fill a scenario template's C/N0 values from its true position."""
    if document.true_position is None:
        raise ScenarioError("Scenario template has no true_position to emulate from")
    spec = EmulationSpec() if spec is None else spec
    aoi = MultiPolygon2D.from_rings(document.aoi.polygons)
    result = emulate(document.true_position, buildings, satellites, spec, ground_height, aoi)
    return document.model_copy(update={"cno": result.cno, "los_threshold": spec.threshold})
