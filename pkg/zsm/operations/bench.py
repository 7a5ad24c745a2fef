# zsm/operations/bench.py
"""
Minkowski sum with a segment: constrained zonotope vs vertex representation.
"""

import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd
from scipy.spatial import ConvexHull

from zsm.core.config import get_settings
from zsm.core.errors import ConfigurationError
from zsm.geometry.conzono import ConZono, VertexList, minkowski_sum
from zsm.geometry.linalg import extreme_points
from zsm.schemas.report import BenchRecord, BenchSummary, MethodSummary

logger = logging.getLogger(__name__)

WARMUP = 10


def random_polytope(
    n_dim: int = 3,
    max_vertices: int = 100,
    seed=None,
    n_points: Optional[int] = None,
) -> VertexList:
    """
    Hull of points drawn uniformly in the unit ball.

    Args:
        n_points: sample size; defaults to a uniform draw in [n_dim + 1, max_vertices]
        seed: int or numpy Generator
    """
    rng = np.random.default_rng(seed)
    if n_points is None:
        n_points = int(rng.integers(n_dim + 1, max_vertices + 1))
    direction = rng.standard_normal((n_points, n_dim))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = rng.uniform(0.0, 1.0, size=(n_points, 1)) ** (1.0 / n_dim)
    points = direction * radius
    return VertexList(extreme_points(points, get_settings().VERTEX_TOL), n_dim)


def vertex_rep_sum(points: np.ndarray, half_segment: np.ndarray) -> np.ndarray:
    """Translate by both segment endpoints and re-hull."""
    shifted = np.vstack([points + half_segment, points - half_segment])
    hull = ConvexHull(shifted)
    return shifted[hull.vertices]


@dataclass(frozen=True)
class BenchResult:
    records: List[BenchRecord]
    summary: BenchSummary

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.model_dump() for r in self.records])

    def write_csv(self, path: Path) -> None:
        self.frame().to_csv(path, index=False)


def _summarize(seconds: pd.Series) -> MethodSummary:
    q1, median, q3 = seconds.quantile([0.25, 0.5, 0.75]).tolist()
    return MethodSummary(median=median, q1=q1, q3=q3)


def bench_minkowski(
    trials: int = 1000,
    seed: int = 0,
    max_vertices: int = 100,
    warmup: int = WARMUP,
) -> BenchResult:
    """
    Time both Minkowski pipelines on random 3-D polytopes with a unit segment.

    The conversion from vertices to a constrained zonotope happens before
    the timer starts; the vertex pipeline is timed including its re-hull.
    """
    if trials < 1:
        raise ConfigurationError(f"Bench needs at least one trial, got {trials}")
    if max_vertices < 4:
        raise ConfigurationError(f"max_vertices must be at least 4, got {max_vertices}")
    rng = np.random.default_rng(seed)
    records: List[BenchRecord] = []
    timer = time.perf_counter
    for trial in range(-warmup, trials):
        polytope = random_polytope(3, max_vertices, rng)
        direction = rng.standard_normal(3)
        half_segment = 0.5 * direction / np.linalg.norm(direction)
        segment = ConZono.zonotope(np.zeros(3), half_segment[:, None])
        z = ConZono.from_points(polytope.points, detect_parallelotope=False)

        started = timer()
        summed = minkowski_sum(z, segment)
        conzono_s = timer() - started

        started = timer()
        result = vertex_rep_sum(polytope.points, half_segment)
        vertex_s = timer() - started

        if trial < 0:
            continue
        count = len(polytope)
        records.append(
            BenchRecord(
                trial=trial,
                method="conzono",
                vertices=count,
                seconds=max(conzono_s, 1e-9),
                output_size=summed.n_generators,
            )
        )
        records.append(
            BenchRecord(
                trial=trial,
                method="vertex-rep",
                vertices=count,
                seconds=max(vertex_s, 1e-9),
                output_size=result.shape[0],
            )
        )

    frame = pd.DataFrame([r.model_dump() for r in records])
    by_method = frame.groupby("method")["seconds"]
    conzono = _summarize(by_method.get_group("conzono"))
    vertex_rep = _summarize(by_method.get_group("vertex-rep"))
    summary = BenchSummary(
        trials=trials,
        seed=seed,
        warmup=warmup,
        max_vertices=max_vertices,
        conzono=conzono,
        vertex_rep=vertex_rep,
        ratio=vertex_rep.median / conzono.median,
    )
    logger.info(
        f"Minkowski bench over {trials} trials: conzono {conzono.median * 1e3:.3f} ms, "
        f"vertex-rep {vertex_rep.median * 1e3:.3f} ms, ratio {summary.ratio:.1f}"
    )
    return BenchResult(records=records, summary=summary)
