# zsm/operations/baseline.py
"""
Grid shadow matching: score lattice candidates by how many predicted
satellite visibilities match the measured LOS/NLOS labels.
"""

import hashlib
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from zsm.core.config import get_settings
from zsm.core.errors import ConfigurationError, ScenarioError
from zsm.geometry.conzono import segments_hit
from zsm.geometry.polygon import points_in
from zsm.models.building import BuildingSet
from zsm.models.ground import GroundModel
from zsm.models.scenario import Scenario
from zsm.operations.matching import measured_labels, street_axes, usable_satellites
from zsm.schemas.cache import VisibilityCacheDocument
from zsm.schemas.report import SmCandidate, SmReport, Timings
from zsm.schemas.scenario import Visibility

logger = logging.getLogger(__name__)

TOP_CANDIDATES = 3


@dataclass(frozen=True, eq=False)
class CandidateGrid:
    """Cell-centered square lattice clipped to the AOI."""

    origin: np.ndarray
    spacing: float
    candidates: np.ndarray
    heights: np.ndarray

    def __len__(self) -> int:
        return self.candidates.shape[0]


def make_grid(aoi: GroundModel, spacing: float) -> CandidateGrid:
    """
    Lattice points origin + spacing * (i, j) inside the AOI, boundary included.

    The origin is the AOI bounding-box corner shifted by half a spacing.

    Raises:
        ConfigurationError: spacing not positive
        ScenarioError: spacing beyond the AOI extent, or no candidate inside the AOI
    """
    if not spacing > 0:
        raise ConfigurationError(f"Grid spacing must be positive, got {spacing}")
    xmin, ymin, xmax, ymax = aoi.aoi.bounds
    if spacing > max(xmax - xmin, ymax - ymin):
        raise ScenarioError(f"Grid spacing {spacing:g} m exceeds the AOI extent")
    origin = np.array([xmin, ymin]) + spacing / 2.0
    xs = np.arange(origin[0], xmax + 1e-9 * spacing, spacing)
    ys = np.arange(origin[1], ymax + 1e-9 * spacing, spacing)
    lattice = np.array(np.meshgrid(xs, ys, indexing="xy")).reshape(2, -1).T
    candidates = lattice[points_in(aoi.aoi, lattice)]
    if candidates.shape[0] == 0:
        raise ScenarioError(f"Grid spacing {spacing:g} m leaves no candidate inside the AOI")
    logger.info(f"Grid at {spacing:g} m: {candidates.shape[0]} candidates")
    return CandidateGrid(
        origin=origin,
        spacing=float(spacing),
        candidates=candidates,
        heights=aoi.heights_at(candidates),
    )


def predict_visibility(
    grid: CandidateGrid,
    buildings: BuildingSet,
    positions: np.ndarray,
    threads: int = 1,
) -> np.ndarray:
    """(candidates, satellites) matrix, True where no building part blocks the ray."""
    positions = np.asarray(positions, dtype=float).reshape(-1, 3)
    starts = np.column_stack([grid.candidates, grid.heights])
    parts = buildings.all_parts()

    def column(sat_pos: np.ndarray) -> np.ndarray:
        blocked = np.zeros(starts.shape[0], dtype=bool)
        for part in parts:
            open_rows = ~blocked
            if not np.any(open_rows):
                break
            blocked[open_rows] = segments_hit(part, starts[open_rows], sat_pos)
        return ~blocked

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            columns = list(pool.map(column, positions))
    else:
        columns = [column(p) for p in positions]
    if not columns:
        return np.ones((starts.shape[0], 0), dtype=bool)
    return np.column_stack(columns)


def score_and_select(
    grid: CandidateGrid,
    predicted: np.ndarray,
    measured: Sequence[Visibility],
    street_frame=(1.0, 0.0),
    true_position=None,
) -> SmReport:
    """
    Visibility scores, maximal-score candidates and weighted moments.

    Weights are the raw scores normalized to sum to one; all-zero scores fall
    back to uniform weights. Bounds are 6 sigma per street axis.

    Raises:
        ScenarioError: predicted columns do not match the measurements
    """
    predicted = np.asarray(predicted, dtype=bool)
    measured_los = np.array([Visibility(m) is Visibility.LOS for m in measured], dtype=bool)
    if predicted.shape != (len(grid), measured_los.shape[0]):
        raise ScenarioError(
            f"Prediction shape {predicted.shape} does not match "
            f"{len(grid)} candidates x {measured_los.shape[0]} satellites"
        )
    if measured_los.shape[0] == 0:
        raise ScenarioError("No satellites to score")
    scores = (predicted == measured_los[None, :]).sum(axis=1)
    points = grid.candidates

    total = scores.sum()
    uniform = total == 0
    if uniform:
        logger.warning("All visibility scores are zero; falling back to uniform weights")
        weights = np.full(len(grid), 1.0 / len(grid))
    else:
        weights = scores / total
    mean = weights @ points
    centered = points - mean
    cov = (weights[:, None] * centered).T @ centered
    axes = street_axes(street_frame)
    street_var = np.clip(np.diag(axes @ cov @ axes.T), 0.0, None)
    bounds = 6.0 * np.sqrt(street_var)

    top_score = scores.max()
    best = points[scores == top_score]
    truth = None if true_position is None else np.asarray(true_position, dtype=float)
    # stable sort keeps lattice order among ties
    ranked = np.argsort(-scores, kind="stable")[:TOP_CANDIDATES]
    top = [
        SmCandidate(
            position=tuple(points[i].tolist()),
            score=int(scores[i]),
            error=None if truth is None else tuple((axes @ (points[i] - truth)).tolist()),
        )
        for i in ranked
    ]
    return SmReport(
        spacing=grid.spacing,
        origin=tuple(grid.origin.tolist()),
        n_satellites=measured_los.shape[0],
        candidates=[tuple(p) for p in points.tolist()],
        scores=scores.tolist(),
        best=[tuple(p) for p in best.tolist()],
        top=top,
        weighted_mean=tuple(mean.tolist()),
        weighted_cov=cov.tolist(),
        bounds=tuple(bounds.tolist()),
        mean_error=None if truth is None else tuple((axes @ (mean - truth)).tolist()),
        uniform=bool(uniform),
        street_frame=tuple(float(v) for v in street_frame),
    )


def visibility_key(
    buildings: BuildingSet, grid: CandidateGrid, satellite_ids: Sequence[str], positions
) -> str:
    """sha256 over the buildings digest, grid, satellite positions and candidate heights."""
    sha = hashlib.sha256()
    sha.update(buildings.digest().encode("ascii"))
    sha.update(json.dumps([grid.spacing, grid.origin.tolist()]).encode("ascii"))
    sha.update(json.dumps(list(satellite_ids)).encode("utf-8"))
    for array in (np.asarray(positions, dtype=float), grid.heights, grid.candidates):
        sha.update(np.ascontiguousarray(array, dtype="<f8").tobytes())
    return sha.hexdigest()


def load_visibility(path: Path, key: str) -> Optional[np.ndarray]:
    """Cached matrix for this key, or None on a miss or an unreadable file."""
    path = Path(path)
    if not path.exists():
        return None
    try:
        document = VisibilityCacheDocument.model_validate_json(path.read_text())
    except ValidationError as e:
        logger.warning(f"Ignoring unreadable visibility cache {path}: {e.error_count()} errors")
        return None
    if document.key != key:
        logger.info(f"Visibility cache {path} was built for other inputs")
        return None
    return np.array(document.visible, dtype=bool).reshape(len(document.candidates), -1)


def save_visibility(
    path: Path, key: str, grid: CandidateGrid, satellite_ids: Sequence[str], visible: np.ndarray
) -> None:
    document = VisibilityCacheDocument(
        key=key,
        spacing=grid.spacing,
        origin=tuple(grid.origin.tolist()),
        satellite_ids=list(satellite_ids),
        candidates=[tuple(p) for p in grid.candidates.tolist()],
        visible=visible.tolist(),
    )
    Path(path).write_text(document.model_dump_json())


def run_sm(
    buildings: BuildingSet,
    scenario: Scenario,
    spacing: float,
    cache_path: Optional[Path] = None,
    threads: Optional[int] = None,
) -> Tuple[SmReport, CandidateGrid]:
    """
    Full grid shadow-matching run; the visibility prediction is the offline step.

    A cache hit skips the prediction and reports zero offline time.
    """
    threads = get_settings().THREADS if threads is None else threads
    satellites = usable_satellites(scenario)
    if not satellites:
        raise ScenarioError("No usable satellites after elevation filtering")
    labels = measured_labels(scenario, satellites)
    ids = [s.id for s in satellites]
    positions = np.array([s.position for s in satellites])
    grid = make_grid(scenario.ground, spacing)

    started = time.perf_counter()
    key = visibility_key(buildings, grid, ids, positions)
    predicted = None if cache_path is None else load_visibility(cache_path, key)
    cache_hit = predicted is not None
    if not cache_hit:
        predicted = predict_visibility(grid, buildings, positions, threads=threads)
        if cache_path is not None:
            save_visibility(cache_path, key, grid, ids, predicted)
    offline = 0.0 if cache_hit else time.perf_counter() - started

    started = time.perf_counter()
    report = score_and_select(
        grid,
        predicted,
        [labels[i] for i in ids],
        street_frame=scenario.street_frame,
        true_position=scenario.true_position,
    )
    online = time.perf_counter() - started
    report = report.model_copy(
        update={
            "scenario": scenario.name,
            "cache_hit": cache_hit,
            "timings": Timings(offline_s=offline, online_s=online),
        }
    )
    logger.info(
        f"SM on {scenario.name}: {len(grid)} candidates, best score "
        f"{max(report.scores)}/{report.n_satellites}, cache {'hit' if cache_hit else 'miss'}"
    )
    return report, grid
