# zsm/operations/scenes.py
"""
Fixture scenes: box-building maps with a scenario template (no C/N0 yet).
"""

import logging
from typing import List, Sequence, Tuple

import numpy as np

from zsm.core.errors import ScenarioError
from zsm.models.mesh import TriangleMesh
from zsm.schemas.scenario import AoiRecord, SatelliteRecord, ScenarioDocument

logger = logging.getLogger(__name__)

Scene = Tuple[TriangleMesh, ScenarioDocument]

# Outward-facing triangles over the corners of a box, corner k = (x bit 0, y bit 1, z bit 2)
BOX_TRIANGLES = np.array(
    [
        [0, 2, 1], [1, 2, 3],  # bottom
        [4, 5, 6], [5, 7, 6],  # top
        [0, 1, 4], [1, 5, 4],  # south
        [2, 6, 3], [3, 6, 7],  # north
        [0, 4, 2], [2, 4, 6],  # west
        [1, 3, 5], [3, 7, 5],  # east
    ]
)

SENSITIVITY_SIZES = (8, 14, 20)


def box_mesh(lower, upper) -> TriangleMesh:
    """Closed 12-triangle mesh of an axis-aligned box."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if np.any(upper <= lower):
        raise ScenarioError(f"Box bounds {lower} / {upper} are not increasing")
    corners = np.array(
        [[(upper if k >> axis & 1 else lower)[axis] for axis in range(3)] for k in range(8)]
    )
    return TriangleMesh.create(corners, BOX_TRIANGLES)


def merge_meshes(meshes: Sequence[TriangleMesh]) -> TriangleMesh:
    vertices, triangles, offset = [], [], 0
    for mesh in meshes:
        vertices.append(mesh.vertices)
        triangles.append(mesh.triangles + offset)
        offset += mesh.vertices.shape[0]
    if not vertices:
        return TriangleMesh.create(np.zeros((0, 3)), np.zeros((0, 3), dtype=int))
    return TriangleMesh.create(np.vstack(vertices), np.vstack(triangles))


def _ring(xmin, ymin, xmax, ymax) -> List[Tuple[float, float]]:
    return [(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)]


def _satellites(angles) -> List[SatelliteRecord]:
    return [
        SatelliteRecord(id=sat_id, azimuth=az, elevation=el) for sat_id, az, el in angles
    ]


def two_building_scene() -> Scene:
    """
    A north-south street between a 40 m block (west) and a 30 m block (east),
    nine satellites: four blocked at the receiver, five visible.
    """
    mesh = merge_meshes(
        [
            box_mesh((-40.0, -30.0, 0.0), (-10.0, 30.0, 40.0)),
            box_mesh((10.0, -30.0, 0.0), (40.0, 30.0, 30.0)),
        ]
    )
    template = ScenarioDocument(
        name="two-building",
        satellites=_satellites(
            [
                ("G01", 90.0, 40.0),
                ("G02", 270.0, 35.0),
                ("G03", 80.0, 55.0),
                ("G04", 250.0, 50.0),
                ("G05", 0.0, 30.0),
                ("G06", 180.0, 45.0),
                ("G07", 10.0, 80.0),
                ("G08", 90.0, 80.0),
                ("G09", 300.0, 78.0),
            ]
        ),
        aoi=AoiRecord(polygons=[_ring(-60.0, -60.0, 60.0, 60.0)], exclude_footprints=True),
        street_frame=(0.0, 1.0),
        true_position=(2.0, 5.0),
    )
    return mesh, template


def grid_parity_ground() -> Scene:
    """120 m square AOI cut by three footprints; lattice counts 16 at 30 m, 97 at 10 m."""
    mesh = merge_meshes(
        [
            box_mesh((20.0, -10.0, 0.0), (40.0, 130.0, 25.0)),
            box_mesh((80.0, 10.0, 0.0), (100.0, 130.0, 20.0)),
            box_mesh((60.0, 0.0, 0.0), (70.0, 10.0, 10.0)),
        ]
    )
    template = ScenarioDocument(
        name="grid-parity",
        satellites=_satellites(
            [
                ("G01", 0.0, 35.0),
                ("G02", 90.0, 50.0),
                ("G03", 180.0, 40.0),
                ("G04", 270.0, 60.0),
                ("G05", 45.0, 75.0),
                ("G06", 225.0, 30.0),
            ]
        ),
        aoi=AoiRecord(polygons=[_ring(0.0, 0.0, 120.0, 120.0)], exclude_footprints=True),
        street_frame=(0.0, 1.0),
        true_position=(50.0, 60.0),
    )
    return mesh, template


def sensitivity_scene(n_buildings: int) -> Scene:
    """
    Identical 10 x 10 x 20 m blocks, one per 100 m cell of a 5 x 4 grid,
    filled row by row; the receiver stands 5 m south of the first block.
    """
    if not 1 <= n_buildings <= 20:
        raise ScenarioError(f"Sensitivity scene holds 1 to 20 buildings, got {n_buildings}")
    boxes = []
    for index in range(n_buildings):
        row, col = divmod(index, 5)
        cx, cy = 50.0 + 100.0 * col, 50.0 + 100.0 * row
        boxes.append(box_mesh((cx - 5.0, cy - 5.0, 0.0), (cx + 5.0, cy + 5.0, 20.0)))
    template = ScenarioDocument(
        name=f"sensitivity-{n_buildings}",
        satellites=_satellites(
            [
                ("S1", 0.0, 40.0),
                ("S2", 90.0, 50.0),
                ("S3", 180.0, 35.0),
                ("S4", 270.0, 60.0),
                ("S5", 120.0, 45.0),
                ("S6", 330.0, 75.0),
            ]
        ),
        aoi=AoiRecord(polygons=[_ring(0.0, 0.0, 500.0, 400.0)], exclude_footprints=True),
        true_position=(50.0, 40.0),
    )
    return merge_meshes(boxes), template


def random_scene(seed: int, max_buildings: int = 20) -> Scene:
    """
    Up to max_buildings separated boxes in a 200 m square, 6 to 14 satellites
    above 15 degrees and a receiver at least 1 m from every footprint.
    """
    rng = np.random.default_rng(seed)
    target = int(rng.integers(1, max_buildings + 1))
    placed: List[Tuple[float, float, float, float]] = []
    boxes = []
    for _ in range(50 * target):
        if len(placed) == target:
            break
        cx, cy = rng.uniform(-80.0, 80.0, size=2)
        hx, hy = rng.uniform(3.0, 15.0, size=2)
        rect = (cx - hx, cy - hy, cx + hx, cy + hy)
        # 2 m gap so boxes never share vertices or faces
        if any(
            rect[0] < o[2] + 2.0 and o[0] < rect[2] + 2.0 and rect[1] < o[3] + 2.0 and o[1] < rect[3] + 2.0
            for o in placed
        ):
            continue
        placed.append(rect)
        height = float(rng.uniform(5.0, 60.0))
        boxes.append(box_mesh((rect[0], rect[1], 0.0), (rect[2], rect[3], height)))

    for _ in range(1000):
        truth = rng.uniform(-95.0, 95.0, size=2)
        if all(
            not (o[0] - 1.0 <= truth[0] <= o[2] + 1.0 and o[1] - 1.0 <= truth[1] <= o[3] + 1.0)
            for o in placed
        ):
            break
    else:
        raise ScenarioError(f"No free receiver position in random scene {seed}")

    count = int(rng.integers(6, 15))
    azimuths = rng.uniform(0.0, 360.0, size=count)
    elevations = rng.uniform(15.0, 85.0, size=count)
    template = ScenarioDocument(
        name=f"random-{seed}",
        satellites=_satellites(
            [(f"G{k + 1:02d}", float(az), float(el)) for k, (az, el) in enumerate(zip(azimuths, elevations))]
        ),
        aoi=AoiRecord(polygons=[_ring(-100.0, -100.0, 100.0, 100.0)], exclude_footprints=True),
        true_position=(float(truth[0]), float(truth[1])),
    )
    logger.debug(f"Random scene {seed}: {len(boxes)} buildings, {count} satellites")
    return merge_meshes(boxes), template


SCENES = {
    "two-building": two_building_scene,
    "grid-parity": grid_parity_ground,
    **{f"sensitivity-{n}": (lambda n=n: sensitivity_scene(n)) for n in SENSITIVITY_SIZES},
}
