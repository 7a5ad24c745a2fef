# zsm/schemas/mesh.py
from typing import List, Tuple

from pydantic import Field, model_validator

from zsm.schemas.base import Point3, VersionedDocument


class MeshDocument(VersionedDocument):
    """JSON triangle mesh."""
    vertices: List[Point3] = Field(
        ...,
        description="Vertex coordinates in local ENU meters",
        examples=[[[0, 0, 0], [1, 0, 0], [0, 1, 0]]],
    )
    triangles: List[Tuple[int, int, int]] = Field(
        ...,
        description="Zero-based vertex indices, one triple per triangle",
        examples=[[[0, 1, 2]]],
    )

    @model_validator(mode="after")
    def validate_indices(self) -> "MeshDocument":
        count = len(self.vertices)
        for triangle in self.triangles:
            if any(i < 0 or i >= count for i in triangle):
                raise ValueError(f"Triangle {list(triangle)} references a missing vertex")
        return self
