# zsm/operations/oracle.py
"""
Raster oracle: classify cell centers by direct occlusion tests and compare
with estimate membership.
"""

import logging
from typing import Optional

import numpy as np

from zsm.core.config import get_settings
from zsm.core.errors import ConfigurationError, ScenarioError
from zsm.geometry.polygon import MultiPolygon2D, boundary_distance, points_in
from zsm.models.building import BuildingSet
from zsm.models.scenario import Scenario
from zsm.operations.baseline import CandidateGrid, predict_visibility
from zsm.operations.matching import measured_labels, usable_satellites
from zsm.schemas.report import OracleReport
from zsm.schemas.scenario import Visibility

logger = logging.getLogger(__name__)


def raster(scenario: Scenario, pitch: float) -> CandidateGrid:
    """Cell centers at the given pitch inside the AOI (boundary included)."""
    if not pitch > 0:
        raise ConfigurationError(f"Raster pitch must be positive, got {pitch}")
    aoi = scenario.ground.aoi
    xmin, ymin, xmax, ymax = aoi.bounds
    xs = np.arange(xmin + pitch / 2.0, xmax, pitch)
    ys = np.arange(ymin + pitch / 2.0, ymax, pitch)
    cells = np.array(np.meshgrid(xs, ys, indexing="xy")).reshape(2, -1).T
    cells = cells[points_in(aoi, cells)]
    return CandidateGrid(
        origin=np.array([xmin, ymin]) + pitch / 2.0,
        spacing=float(pitch),
        candidates=cells,
        heights=scenario.ground.heights_at(cells),
    )


def oracle_membership(
    buildings: BuildingSet, scenario: Scenario, cells: CandidateGrid, threads: int = 1
) -> np.ndarray:
    """True for cells whose predicted visibility matches every measured label."""
    satellites = usable_satellites(scenario)
    if not satellites:
        raise ScenarioError("No usable satellites after elevation filtering")
    labels = measured_labels(scenario, satellites)
    measured = np.array([labels[s.id] is Visibility.LOS for s in satellites])
    positions = np.array([s.position for s in satellites])
    predicted = predict_visibility(cells, buildings, positions, threads=threads)
    return np.all(predicted == measured[None, :], axis=1)


def oracle_check(
    buildings: BuildingSet,
    scenario: Scenario,
    estimate: MultiPolygon2D,
    pitch: float = 0.5,
    band: Optional[float] = None,
    threads: Optional[int] = None,
) -> OracleReport:
    """
    Agreement between estimate membership and the raster oracle.

    Cells closer than ``band`` (default two pitches) to the estimate boundary
    are left out of the comparison.
    """
    threads = get_settings().THREADS if threads is None else threads
    band = 2.0 * pitch if band is None else band
    cells = raster(scenario, pitch)
    inside_oracle = oracle_membership(buildings, scenario, cells, threads=threads)
    inside_estimate = points_in(estimate, cells.candidates)
    compared = boundary_distance(estimate, cells.candidates) > band
    disagreements = int(np.sum(compared & (inside_oracle != inside_estimate)))
    n_compared = int(compared.sum())
    agreement = 1.0 if n_compared == 0 else 1.0 - disagreements / n_compared
    degenerate = estimate.area < pitch * pitch
    if degenerate:
        logger.warning(f"Estimate area {estimate.area:.3g} m² is below one raster cell")
    logger.info(
        f"Oracle at {pitch:g} m: {n_compared} of {len(cells)} cells compared, "
        f"agreement {agreement:.4%}"
    )
    return OracleReport(
        scenario=scenario.name,
        pitch=pitch,
        band=band,
        cells_total=len(cells),
        cells_compared=n_compared,
        disagreements=disagreements,
        agreement=agreement,
        estimate_area=estimate.area,
        degenerate=degenerate,
    )
