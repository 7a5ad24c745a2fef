# zsm/operations/matching.py
"""
Zonotope shadow matching: fold per-satellite GNSS shadows into the AOI.

NLOS satellites intersect the running estimate with their shadow, LOS
satellites subtract it. The estimate starts as the AOI region.
"""

import dataclasses
import logging
import time
from typing import Dict, List, Optional, Sequence

import numpy as np

from zsm.core.config import get_settings
from zsm.core.errors import ScenarioError
from zsm.geometry.polygon import BooleanOp, MultiPolygon2D, boolean_op, drop_thin, point_in
from zsm.models.building import BuildingSet
from zsm.models.scenario import Satellite, Scenario
from zsm.operations.shadows import check_epsilon, satellite_shadow
from zsm.schemas.report import ComponentMetrics, EstimateReport, StepRecord, Timings
from zsm.schemas.scenario import Visibility

logger = logging.getLogger(__name__)


def classify(cno: float, threshold: float) -> Visibility:
    """NLOS iff cno is strictly below the threshold."""
    return Visibility.NLOS if cno < threshold else Visibility.LOS


def street_axes(street_frame) -> np.ndarray:
    """Rows (cross-street, along-street); cross is the left normal of along."""
    along = np.asarray(street_frame, dtype=float).reshape(2)
    along = along / np.linalg.norm(along)
    return np.array([[-along[1], along[0]], along])


def usable_satellites(scenario: Scenario) -> List[Satellite]:
    """Satellites strictly above the scenario elevation mask."""
    mask = scenario.min_elevation_deg
    kept = [s for s in scenario.satellites if scenario.elevation_of(s) > mask]
    dropped = len(scenario.satellites) - len(kept)
    if dropped:
        logger.info(f"Elevation mask {mask:g}° removed {dropped} satellites")
    return kept


def select_satellites(
    scenario: Scenario,
    ids: Optional[Sequence[str]] = None,
    count: Optional[int] = None,
    seed: int = 0,
    min_elevation_deg: Optional[float] = None,
) -> Scenario:
    """
    Restrict a scenario to a subset of its satellites.

    Args:
        ids: keep these satellites, in scenario order
        count: keep a seeded random subset of this size (after ids)
        seed: seed for the random subset
        min_elevation_deg: raise the elevation mask

    Raises:
        ScenarioError: unknown ids or a subset larger than what is left
    """
    satellites = list(scenario.satellites)
    if ids is not None:
        known = {s.id for s in satellites}
        unknown = sorted(set(ids) - known)
        if unknown:
            raise ScenarioError(f"Unknown satellite ids: {', '.join(unknown)}")
        wanted = set(ids)
        satellites = [s for s in satellites if s.id in wanted]
    if count is not None:
        if not 0 < count <= len(satellites):
            raise ScenarioError(
                f"Cannot pick {count} satellites out of {len(satellites)}"
            )
        chosen = np.sort(np.random.default_rng(seed).choice(len(satellites), count, replace=False))
        satellites = [satellites[i] for i in chosen]
    result = scenario.with_satellites(satellites)
    if min_elevation_deg is not None:
        mask = max(min_elevation_deg, scenario.min_elevation_deg)
        result = dataclasses.replace(result, min_elevation_deg=mask)
    return result


def order_satellites(scenario: Scenario, satellites: List[Satellite], order: str) -> List[Satellite]:
    if order == "input":
        return satellites
    if order == "elevation":
        # stable, so ties keep input order
        return sorted(satellites, key=lambda s: -scenario.elevation_of(s))
    raise ScenarioError(f"Unknown satellite order '{order}'")


def street_metrics(
    estimate: MultiPolygon2D, street_frame, true_position=None
) -> List[ComponentMetrics]:
    """
    Per-component centroid, street-frame bounding-box widths and centroid error.

    Widths and errors are (cross-street, along-street); errors are centroid
    minus truth.
    """
    axes = street_axes(street_frame)
    truth = None if true_position is None else np.asarray(true_position, dtype=float)
    metrics = []
    for polygon in estimate.components:
        ring = np.asarray(polygon.exterior.coords) @ axes.T
        centroid = np.array([polygon.centroid.x, polygon.centroid.y])
        widths = ring.max(axis=0) - ring.min(axis=0)
        contains = None
        error = None
        if truth is not None:
            contains = point_in(MultiPolygon2D.from_geometry(polygon), truth)
            error = tuple(float(v) for v in axes @ (centroid - truth))
        metrics.append(
            ComponentMetrics(
                centroid=tuple(float(v) for v in centroid),
                widths=tuple(float(v) for v in widths),
                area=float(polygon.area),
                contains_truth=contains,
                centroid_error=error,
            )
        )
    return metrics


def measured_labels(scenario: Scenario, satellites: Sequence[Satellite]) -> Dict[str, Visibility]:
    missing = [s.id for s in satellites if s.id not in scenario.cno]
    if missing:
        raise ScenarioError(f"No C/N0 measurement for satellites {', '.join(missing)}")
    return {s.id: classify(scenario.cno[s.id], scenario.los_threshold) for s in satellites}


def run_zsm(
    buildings: BuildingSet,
    scenario: Scenario,
    epsilon: Optional[float] = None,
    order: str = "input",
    threads: Optional[int] = None,
) -> EstimateReport:
    """
    Set-valued position estimate for one epoch.

    Args:
        buildings: converted building set
        scenario: satellites, C/N0 values and the AOI
        epsilon: shadow-volume half length, must exceed the tallest building
        order: "input" or "elevation" (descending); changes only the step trace
        threads: workers for per-building shadows

    Returns:
        EstimateReport: estimate, components, step trace; an empty estimate
        is returned with ``inconsistent`` set

    Raises:
        ScenarioError: empty AOI, no usable satellites or missing C/N0
        ConfigurationError: epsilon not above the tallest building
    """
    config = get_settings()
    epsilon = config.EPSILON if epsilon is None else epsilon
    threads = config.THREADS if threads is None else threads
    check_epsilon(epsilon, buildings)
    if scenario.ground.aoi.is_empty:
        raise ScenarioError("AOI is empty")
    satellites = usable_satellites(scenario)
    if not satellites:
        raise ScenarioError("No usable satellites after elevation filtering")
    satellites = order_satellites(scenario, satellites, order)
    labels = measured_labels(scenario, satellites)

    started = time.perf_counter()
    estimate = scenario.ground.aoi
    steps = []
    for satellite in satellites:
        shadow = satellite_shadow(
            buildings,
            satellite.position,
            scenario.ground,
            epsilon=epsilon,
            satellite_id=satellite.id,
            threads=threads,
        )
        label = labels[satellite.id]
        op = BooleanOp.INTERSECTION if label is Visibility.NLOS else BooleanOp.DIFFERENCE
        # finite-range directions leave micrometer slivers along footprint edges
        estimate = drop_thin(boolean_op(op, estimate, shadow.region))
        steps.append(
            StepRecord(
                satellite_id=satellite.id,
                label=label,
                shadow_area=shadow.area,
                estimate_area=estimate.area,
                component_count=len(estimate.components),
            )
        )
        logger.debug(
            f"{satellite.id} {label.value}: estimate {estimate.area:.2f} m² "
            f"in {len(estimate.components)} components"
        )
    online = time.perf_counter() - started

    if estimate.is_empty:
        logger.warning(
            "Estimate is empty: the LOS/NLOS classification is inconsistent with the map"
        )
    truth = scenario.true_position
    components = street_metrics(estimate, scenario.street_frame, truth)
    report = EstimateReport(
        scenario=scenario.name,
        estimate=estimate,
        area=estimate.area,
        components=components,
        inconsistent=estimate.is_empty,
        truth_inside=None if truth is None else point_in(estimate, truth),
        satellites_used=[s.id for s in satellites],
        labels=labels,
        epsilon=epsilon,
        order=order,
        street_frame=tuple(float(v) for v in scenario.street_frame),
        steps=steps,
        timings=Timings(online_s=online),
    )
    logger.info(
        f"ZSM on {scenario.name}: {len(satellites)} satellites, "
        f"{len(components)} components, {estimate.area:.2f} m² in {online:.3f} s"
    )
    return report
