# zsm/schemas/scenario.py
import math
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from zsm.schemas.base import Point2, Point3, VersionedDocument


class Visibility(str, Enum):
    """Signal condition of a satellite"""
    LOS = "LOS"
    NLOS = "NLOS"


class SatelliteRecord(BaseModel):
    """A satellite given by ENU position or by azimuth/elevation/range."""
    id: str = Field(..., min_length=1, description="Satellite identifier", examples=["G05"])
    position: Optional[Point3] = Field(
        None, description="ENU position in meters", examples=[[0.0, 0.0, 2.0e7]]
    )
    azimuth: Optional[float] = Field(
        None, description="Azimuth in degrees, clockwise from north", examples=[90.0]
    )
    elevation: Optional[float] = Field(
        None, description="Elevation in degrees, (0, 90]", examples=[40.0]
    )
    range: Optional[float] = Field(
        None, description="Distance in meters (default from ZSM_DEFAULT_RANGE)", examples=[2.0e7]
    )

    @model_validator(mode="after")
    def validate_placement(self) -> "SatelliteRecord":
        angles = self.azimuth is not None, self.elevation is not None
        if self.position is None and not all(angles):
            raise ValueError(f"Satellite {self.id} needs a position or azimuth and elevation")
        if self.position is not None and any(angles):
            raise ValueError(f"Satellite {self.id} mixes a position with azimuth/elevation")
        if self.elevation is not None and not 0.0 < self.elevation <= 90.0:
            raise ValueError(f"Satellite {self.id} elevation must be in (0, 90], got {self.elevation}")
        if self.range is not None and not self.range > 0:
            raise ValueError(f"Satellite {self.id} range must be positive")
        return self

    model_config = ConfigDict(
        json_schema_extra={
            "examples": [
                {"id": "G05", "azimuth": 0.0, "elevation": 30.0},
                {"id": "G12", "position": [1.0e7, 0.0, 1.0e7]},
            ]
        }
    )


class GroundPieceRecord(BaseModel):
    polygon: List[Point2] = Field(..., min_length=3, description="Outer ring in meters")
    height: float = Field(0.0, description="Constant ground height in meters")


class AoiRecord(BaseModel):
    """Area of interest and the ground model beneath it."""
    polygons: List[List[Point2]] = Field(
        ...,
        min_length=1,
        description="Outer rings whose union is the AOI",
        examples=[[[[-60, -60], [60, -60], [60, 60], [-60, 60]]]],
    )
    exclude_footprints: bool = Field(
        False, description="Subtract building footprints from the AOI"
    )
    ground: List[GroundPieceRecord] = Field(
        default_factory=list,
        description="Constant-height ground pieces; empty means flat ground at the lowest building base",
    )

    @field_validator("polygons")
    @classmethod
    def check_rings(cls, v):
        for ring in v:
            if len(ring) < 3:
                raise ValueError("Each AOI ring needs at least three points")
        return v


class ScenarioDocument(VersionedDocument):
    """Satellites, measurements, AOI and street frame for one epoch."""
    name: str = Field("scenario", description="Free-form label")
    satellites: List[SatelliteRecord] = Field(..., min_length=1)
    cno: Dict[str, float] = Field(
        default_factory=dict,
        description="C/N0 per satellite id in dB-Hz; empty for an emulation template",
    )
    los_threshold: float = Field(38.0, description="NLOS iff C/N0 is strictly below this (dB-Hz)")
    aoi: AoiRecord
    street_frame: Point2 = Field(
        (1.0, 0.0), description="Along-street unit vector; cross-street is its left normal"
    )
    true_position: Optional[Point2] = Field(None, description="Ground-truth receiver position")
    min_elevation_deg: float = Field(0.0, ge=0.0, lt=90.0)

    @field_validator("street_frame")
    @classmethod
    def normalize_frame(cls, v):
        norm = math.hypot(*v)
        if not math.isfinite(norm) or norm == 0.0:
            raise ValueError("street_frame must be a nonzero vector")
        return (v[0] / norm, v[1] / norm)

    @field_validator("los_threshold")
    @classmethod
    def finite_threshold(cls, v):
        if not math.isfinite(v):
            raise ValueError("los_threshold must be finite")
        return v

    @model_validator(mode="after")
    def validate_measurements(self) -> "ScenarioDocument":
        ids = [s.id for s in self.satellites]
        if len(set(ids)) != len(ids):
            raise ValueError("Satellite ids must be unique")
        if self.cno:
            missing = sorted(set(ids) - set(self.cno))
            extra = sorted(set(self.cno) - set(ids))
            if missing or extra:
                raise ValueError(
                    f"cno must have one value per satellite (missing {missing}, unknown {extra})"
                )
            if not all(math.isfinite(v) for v in self.cno.values()):
                raise ValueError("cno values must be finite")
        return self

    @property
    def has_measurements(self) -> bool:
        return bool(self.cno)


class EmulationSpec(BaseModel):
    """Ideal-classifier C/N0 emulation settings."""
    base_cno: float = Field(45.0, description="Open-sky C/N0 in dB-Hz")
    attenuated_cno: float = Field(28.0, description="C/N0 assigned to blocked satellites")
    threshold: float = Field(38.0, description="LOS threshold in dB-Hz")
    jitter: float = Field(0.0, ge=0.0, le=2.0, description="Uniform jitter half-width in dB-Hz")
    seed: int = Field(0, description="Random seed for the jitter")

    @model_validator(mode="after")
    def validate_levels(self) -> "EmulationSpec":
        if not self.attenuated_cno < self.threshold <= self.base_cno:
            raise ValueError(
                "Levels must satisfy attenuated_cno < threshold <= base_cno, got "
                f"{self.attenuated_cno} / {self.threshold} / {self.base_cno}"
            )
        return self
