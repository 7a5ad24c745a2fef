# zsm/schemas/cache.py
from typing import List

from pydantic import BaseModel, Field, model_validator

from zsm.models.building import BuildingSet, building_from_parts
from zsm.schemas.base import ConZonoRecord, Point2, Point3, VersionedDocument


class BuildingRecord(BaseModel):
    id: str = Field(..., min_length=1, examples=["B1"])
    anchor: Point3 = Field(..., description="Mean of the part vertices")
    height: float = Field(..., description="Highest vertex z in meters")
    parts: List[ConZonoRecord] = Field(..., min_length=1)


class BuildingCacheDocument(VersionedDocument):
    """Buildings converted to constrained zonotopes (the offline step)."""
    source: str = Field("", description="Mesh file the cache was built from")
    merge: bool = Field(True, description="One hull per building instead of one set per triangle")
    buildings: List[BuildingRecord] = Field(default_factory=list)

    @model_validator(mode="after")
    def unique_ids(self) -> "BuildingCacheDocument":
        ids = [b.id for b in self.buildings]
        if len(set(ids)) != len(ids):
            raise ValueError("Building ids must be unique")
        return self

    @classmethod
    def from_buildings(cls, buildings: BuildingSet, source: str = "", merge: bool = True):
        return cls(
            source=source,
            merge=merge,
            buildings=[
                BuildingRecord(
                    id=b.id,
                    anchor=tuple(b.anchor.tolist()),
                    height=b.height,
                    parts=[ConZonoRecord.from_conzono(p) for p in b.parts],
                )
                for b in buildings
            ],
        )

    def to_buildings(self) -> BuildingSet:
        return BuildingSet.create(
            [
                building_from_parts(
                    record.id, [p.to_conzono() for p in record.parts], record.anchor
                )
                for record in self.buildings
            ]
        )


class PreprocessTiming(VersionedDocument):
    """Side file next to a buildings cache; kept apart so the cache stays deterministic."""
    triangles: int = Field(..., ge=0)
    buildings: int = Field(..., ge=0)
    parts: int = Field(..., ge=0)
    conversion_s: float = Field(..., ge=0.0)
    cache_bytes: int = Field(..., ge=0)


class VisibilityCacheDocument(VersionedDocument):
    """Predicted LOS per grid candidate and satellite."""
    key: str = Field(..., min_length=64, max_length=64, description="sha256 of the inputs")
    spacing: float = Field(..., gt=0.0)
    origin: Point2
    satellite_ids: List[str]
    candidates: List[Point2]
    visible: List[List[bool]]

    @model_validator(mode="after")
    def validate_shape(self) -> "VisibilityCacheDocument":
        if len(self.visible) != len(self.candidates):
            raise ValueError("One visibility row per candidate is required")
        width = len(self.satellite_ids)
        if any(len(row) != width for row in self.visible):
            raise ValueError(f"Visibility rows must have {width} entries")
        return self
