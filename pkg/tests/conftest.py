import logging
from typing import Optional, Tuple

import numpy as np
import pytest
from faker import Faker

from zsm.geometry.polygon import MultiPolygon2D
from zsm.models.building import Building, BuildingSet, build_building, build_buildings
from zsm.models.mesh import TriangleMesh, segment_buildings
from zsm.models.scenario import Scenario, load_scenario
from zsm.operations.emulation import emulate_document
from zsm.operations.scenes import box_mesh, two_building_scene
from zsm.schemas.scenario import AoiRecord, EmulationSpec, SatelliteRecord, ScenarioDocument

# ======================================================================================
# Logging Configuration
# ======================================================================================
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

fake = Faker()
Faker.seed(12345)

# ======================================================================================
# Helper Functions
# ======================================================================================
def same_points(a, b, tol: float = 1e-7) -> bool:
    """Whether two point lists describe the same set, in any order."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        return False
    distance = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return bool(np.all(distance.min(axis=1) <= tol) and np.all(distance.min(axis=0) <= tol))


def box_building(lower, upper, building_id: Optional[str] = None) -> Building:
    return build_building(box_mesh(lower, upper), building_id=building_id or fake.lexify("B???"))


def prism_mesh(sides: int, radius: float, height: float) -> TriangleMesh:
    """Closed regular prism around the z axis; caps are fans so every vertex is a hull vertex."""
    angles = 2.0 * np.pi * np.arange(sides) / sides
    ring = np.column_stack([radius * np.cos(angles), radius * np.sin(angles)])
    vertices = np.vstack(
        [np.column_stack([ring, np.zeros(sides)]), np.column_stack([ring, np.full(sides, height)])]
    )
    triangles = []
    for k in range(1, sides - 1):
        triangles.append([0, k + 1, k])
        triangles.append([sides, sides + k, sides + k + 1])
    for k in range(sides):
        nxt = (k + 1) % sides
        triangles.append([k, nxt, sides + nxt])
        triangles.append([k, sides + nxt, sides + k])
    return TriangleMesh.create(vertices, triangles)


def square_ring(half: float):
    return [(-half, -half), (half, -half), (half, half), (-half, half)]


def make_template(
    satellites,
    half: float = 50.0,
    exclude_footprints: bool = False,
    true_position=None,
    street_frame=(1.0, 0.0),
    name: str = "test",
) -> ScenarioDocument:
    """Scenario template over a square AOI; satellites are (id, azimuth, elevation)."""
    return ScenarioDocument(
        name=name,
        satellites=[
            SatelliteRecord(id=sat_id, azimuth=az, elevation=el) for sat_id, az, el in satellites
        ],
        aoi=AoiRecord(polygons=[square_ring(half)], exclude_footprints=exclude_footprints),
        street_frame=street_frame,
        true_position=true_position,
    )


def with_cno(document: ScenarioDocument, labels) -> ScenarioDocument:
    """Attach C/N0 values that classify to the given 'LOS'/'NLOS' labels."""
    cno = {sat.id: (45.0 if label == "LOS" else 28.0) for sat, label in zip(document.satellites, labels)}
    return document.model_copy(update={"cno": cno})


def prepare_scene(
    mesh: TriangleMesh, template: ScenarioDocument, spec: Optional[EmulationSpec] = None
) -> Tuple[BuildingSet, Scenario]:
    """Buildings plus a scenario whose C/N0 values come from the occlusion oracle."""
    buildings = build_buildings(segment_buildings(mesh))
    draft = load_scenario(template, buildings)
    height = draft.ground.height_at(template.true_position)
    document = emulate_document(template, buildings, draft.satellites, spec, height)
    return buildings, load_scenario(document, buildings)

# ======================================================================================
# Geometry Fixtures
# ======================================================================================
@pytest.fixture
def unit_square() -> MultiPolygon2D:
    return MultiPolygon2D.box(0.0, 0.0, 1.0, 1.0)


@pytest.fixture
def tower() -> BuildingSet:
    """One 10 x 10 x 20 m block at the origin corner."""
    return BuildingSet.create([box_building((0.0, 0.0, 0.0), (10.0, 10.0, 20.0), "T1")])

# ======================================================================================
# Scene Fixtures
# ======================================================================================
@pytest.fixture(scope="session")
def two_building() -> Tuple[BuildingSet, Scenario]:
    """The north-south street scene with emulated C/N0 values."""
    mesh, template = two_building_scene()
    return prepare_scene(mesh, template)

# ======================================================================================
# Pytest Command-Line Options
# ======================================================================================
def pytest_addoption(parser):
    """
    Add custom command line options:
      --run-slow    : Run tests marked as 'slow'
    """
    parser.addoption("--run-slow", action="store_true", help="Run tests marked as slow")

def pytest_collection_modifyitems(config, items):
    """
    Skip tests marked as 'slow' unless --run-slow is specified.
    """
    if not config.getoption("--run-slow"):
        skip_slow = pytest.mark.skip(reason="use --run-slow to run")
        for item in items:
            if "slow" in item.keywords:
                item.add_marker(skip_slow)
