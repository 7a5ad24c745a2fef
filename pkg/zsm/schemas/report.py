# zsm/schemas/report.py
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from zsm.geometry.polygon import MultiPolygon2D
from zsm.schemas.base import Point2, VersionedDocument, region_from_any, region_to_json
from zsm.schemas.scenario import Visibility


class ComponentMetrics(BaseModel):
    """One connected piece of the estimate, measured in the street frame."""
    centroid: Point2 = Field(..., description="Component centroid in ENU meters")
    widths: Point2 = Field(
        ..., description="Bounding-box widths (cross-street, along-street) in meters"
    )
    area: float = Field(..., ge=0.0, description="Area in m²")
    contains_truth: Optional[bool] = Field(None, description="Truth inside (boundary counts)")
    centroid_error: Optional[Point2] = Field(
        None, description="Centroid minus truth as (cross-street, along-street) meters"
    )

    @field_validator("widths")
    @classmethod
    def non_negative(cls, v):
        if v[0] < 0 or v[1] < 0:
            raise ValueError("Widths must be non-negative")
        return v


class StepRecord(BaseModel):
    """Estimate after one more satellite has been folded in."""
    satellite_id: str
    label: Visibility
    shadow_area: float = Field(..., ge=0.0)
    estimate_area: float = Field(..., ge=0.0)
    component_count: int = Field(..., ge=0)


class Timings(BaseModel):
    offline_s: float = Field(0.0, ge=0.0, description="Preprocessing seconds")
    online_s: float = Field(0.0, ge=0.0, description="Estimation seconds")


class EstimateReport(VersionedDocument):
    """Result of one ZSM run."""
    scenario: str = Field("scenario", description="Scenario name")
    estimate: Dict[str, Any] = Field(
        ...,
        description="Estimate as a GeoJSON-style MultiPolygon",
        examples=[{"type": "MultiPolygon", "coordinates": []}],
    )
    area: float = Field(..., ge=0.0)
    components: List[ComponentMetrics] = Field(default_factory=list)
    inconsistent: bool = Field(False, description="Estimate became empty")
    truth_inside: Optional[bool] = None
    satellites_used: List[str] = Field(default_factory=list)
    labels: Dict[str, Visibility] = Field(default_factory=dict)
    epsilon: float = Field(..., gt=0.0)
    order: Literal["input", "elevation"] = "input"
    street_frame: Point2 = (1.0, 0.0)
    steps: List[StepRecord] = Field(default_factory=list)
    timings: Timings = Field(default_factory=Timings)

    @field_validator("estimate", mode="before")
    @classmethod
    def coerce_region(cls, v):
        if isinstance(v, MultiPolygon2D):
            return region_to_json(v)
        region_from_any(v)
        return v

    @model_validator(mode="after")
    def validate_components(self) -> "EstimateReport":
        count = len(region_from_any(self.estimate).components)
        if count != len(self.components):
            raise ValueError(
                f"Report lists {len(self.components)} components but the estimate has {count}"
            )
        if self.inconsistent != (count == 0):
            raise ValueError("inconsistent must be set exactly when the estimate is empty")
        return self

    @property
    def region(self) -> MultiPolygon2D:
        return region_from_any(self.estimate)


class SmCandidate(BaseModel):
    position: Point2
    score: int = Field(..., ge=0)
    error: Optional[Point2] = Field(
        None, description="Candidate minus truth as (cross-street, along-street) meters"
    )


class SmReport(VersionedDocument):
    """Result of one grid shadow-matching run."""
    scenario: str = "scenario"
    spacing: float = Field(..., gt=0.0, description="Grid spacing in meters")
    origin: Point2
    n_satellites: int = Field(..., ge=1)
    candidates: List[Point2]
    scores: List[int]
    best: List[Point2] = Field(..., description="All candidates with the maximal score")
    top: List[SmCandidate] = Field(
        default_factory=list, description="Up to three best candidates for display"
    )
    weighted_mean: Point2
    weighted_cov: List[List[float]] = Field(..., description="2x2 covariance in m²")
    bounds: Point2 = Field(..., description="6-sigma widths (cross-street, along-street) in m")
    mean_error: Optional[Point2] = None
    uniform: bool = Field(False, description="All scores were zero; uniform weights used")
    cache_hit: bool = False
    street_frame: Point2 = (1.0, 0.0)
    timings: Timings = Field(default_factory=Timings)

    @model_validator(mode="after")
    def validate_scores(self) -> "SmReport":
        if len(self.scores) != len(self.candidates):
            raise ValueError("One score per candidate is required")
        if any(s < 0 or s > self.n_satellites for s in self.scores):
            raise ValueError(f"Scores must lie in 0..{self.n_satellites}")
        if self.bounds[0] < 0 or self.bounds[1] < 0:
            raise ValueError("Bounds must be non-negative")
        if self.scores:
            top_score = max(self.scores)
            best = {tuple(c) for c, s in zip(self.candidates, self.scores) if s == top_score}
            if {tuple(b) for b in self.best} != best:
                raise ValueError("best must be exactly the maximal-score candidates")
        return self


class OracleReport(VersionedDocument):
    """Raster agreement between the estimate and per-cell occlusion tests."""
    scenario: str = "scenario"
    pitch: float = Field(..., gt=0.0)
    band: float = Field(..., ge=0.0, description="Excluded distance to the estimate boundary")
    cells_total: int = Field(..., ge=0)
    cells_compared: int = Field(..., ge=0)
    disagreements: int = Field(..., ge=0)
    agreement: float = Field(..., ge=0.0, le=1.0)
    estimate_area: float = Field(..., ge=0.0)
    degenerate: bool = Field(False, description="Estimate smaller than one raster cell")


class BenchRecord(BaseModel):
    trial: int = Field(..., ge=0)
    method: Literal["conzono", "vertex-rep"]
    vertices: int = Field(..., ge=1, description="Vertex count of the input polytope")
    seconds: float = Field(..., gt=0.0)
    output_size: int = Field(..., ge=0, description="Generator count or vertex count")


class MethodSummary(BaseModel):
    median: float
    q1: float
    q3: float

    @property
    def iqr(self) -> float:
        return self.q3 - self.q1


class BenchSummary(VersionedDocument):
    trials: int = Field(..., ge=1)
    seed: int
    warmup: int = Field(..., ge=0)
    max_vertices: int
    conzono: MethodSummary
    vertex_rep: MethodSummary
    ratio: float = Field(..., description="vertex-rep median over conzono median")
    note: str = Field(
        "vertex-rep times include re-hulling; conzono times exclude the vertex conversion",
    )
