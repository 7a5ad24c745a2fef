# zsm/schemas/base.py
from typing import Any, Dict, List, Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from zsm.geometry.conzono import ConZono, make_conzono
from zsm.geometry.polygon import MultiPolygon2D

SCHEMA_VERSION = 1

Point2 = Tuple[float, float]
Point3 = Tuple[float, float, float]


class VersionedDocument(BaseModel):
    """Base for every file written by zsm."""
    schema_version: Literal[1] = Field(
        SCHEMA_VERSION,
        description="File format version",
        examples=[1],
    )

    model_config = ConfigDict(extra="forbid")


class ConZonoRecord(BaseModel):
    """Serialized constrained zonotope."""
    center: List[float] = Field(..., description="Center c (length n)", examples=[[0.0, 0.0, 10.0]])
    generators: List[List[float]] = Field(
        default_factory=list, description="Generator matrix G, row-major n x m"
    )
    con_matrix: List[List[float]] = Field(
        default_factory=list, description="Constraint matrix A, row-major p x m"
    )
    con_vector: List[float] = Field(default_factory=list, description="Constraint vector b (length p)")

    @classmethod
    def from_conzono(cls, z: ConZono) -> "ConZonoRecord":
        return cls(
            center=z.center.tolist(),
            generators=z.generators.tolist() if z.n_generators else [],
            con_matrix=z.con_matrix.tolist() if z.n_constraints else [],
            con_vector=z.con_vector.tolist(),
        )

    def to_conzono(self) -> ConZono:
        n = len(self.center)
        generators = np.array(self.generators, dtype=float).reshape(n, -1) if self.generators else None
        m = 0 if generators is None else generators.shape[1]
        con_matrix = (
            np.array(self.con_matrix, dtype=float).reshape(-1, m) if self.con_matrix else None
        )
        return make_conzono(np.array(self.center), generators, con_matrix, np.array(self.con_vector))


def region_from_any(value: Any) -> MultiPolygon2D:
    """Accept a MultiPolygon2D or its GeoJSON-style mapping."""
    if isinstance(value, MultiPolygon2D):
        return value
    if isinstance(value, dict):
        return MultiPolygon2D.from_geojson(value)
    raise ValueError("Region must be a GeoJSON-style mapping")


def region_to_json(value: MultiPolygon2D) -> Dict[str, Any]:
    document = value.to_geojson()
    return {
        "type": document["type"],
        "coordinates": _listify(document["coordinates"]),
    }


def _listify(value):
    if isinstance(value, (list, tuple)):
        return [_listify(v) for v in value]
    return float(value)
