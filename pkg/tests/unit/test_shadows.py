# tests/unit/test_shadows.py

import logging

import numpy as np
import pytest

from zsm.core.errors import ConfigurationError, ScenarioError
from zsm.geometry.conzono import ConZono, segments_hit, vertices
from zsm.geometry.polygon import boundary_distance, point_in, points_in, sym_diff_area
from zsm.models.building import Building, BuildingSet
from zsm.models.scenario import load_scenario, sat_position
from zsm.operations.shadows import (
    ShadowDirection,
    building_anchor,
    check_epsilon,
    gnss_shadow_piece,
    make_direction_zono,
    satellite_shadow,
    shadow_direction,
    shadow_volume,
)
from tests.conftest import box_building, make_template

pytestmark = [pytest.mark.unit, pytest.mark.geometry]

EAST_45 = sat_position(90.0, 45.0, 2e7)


def tower_ground(tower, exclude_footprints=False):
    template = make_template([("S1", 90.0, 45.0)], exclude_footprints=exclude_footprints)
    return load_scenario(template, tower).ground


# ---------------------------------------------
# Directions and volumes
# ---------------------------------------------

def test_shadow_direction_points_at_satellite(tower):
    direction = shadow_direction(tower[0], EAST_45, "S1")
    np.testing.assert_allclose(direction.unit, [np.sqrt(0.5), 0.0, np.sqrt(0.5)], atol=1e-6)
    assert direction.building_id == "T1"
    assert np.linalg.norm(direction.unit) == pytest.approx(1.0)


def test_shadow_direction_rejects_coincident_satellite(tower):
    with pytest.raises(ScenarioError, match="coincides"):
        shadow_direction(tower[0], tower[0].anchor, "S1")


def test_direction_zono_is_a_segment():
    z = make_direction_zono(ShadowDirection(unit=np.array([0.0, 0.0, 1.0])), epsilon=5.0)
    assert z.n_generators == 1
    np.testing.assert_allclose(z.interval_hull[0], [0.0, 0.0, -5.0])
    np.testing.assert_allclose(z.interval_hull[1], [0.0, 0.0, 5.0])


def test_direction_zono_needs_positive_epsilon():
    with pytest.raises(ConfigurationError):
        make_direction_zono(ShadowDirection(unit=np.array([0.0, 0.0, 1.0])), epsilon=0.0)


def test_shadow_volume_sweeps_the_part():
    box = ConZono.box([0, 0, 0], [1, 1, 1])
    dir_zono = make_direction_zono(ShadowDirection(unit=np.array([0.0, 0.0, 1.0])), epsilon=2.0)
    volume = shadow_volume(box, dir_zono)
    assert volume.n_generators == box.n_generators + 1
    z = vertices(volume).points[:, 2]
    assert z.min() == pytest.approx(-2.0)
    assert z.max() == pytest.approx(3.0)


@pytest.mark.parametrize(
    "epsilon, ok",
    [(20.0, False), (20.5, True), (1e5, True)],
    ids=["equal_to_tallest", "just_above", "default"],
)
def test_check_epsilon(tower, epsilon, ok):
    if ok:
        check_epsilon(epsilon, tower)
    else:
        with pytest.raises(ConfigurationError, match="must exceed the tallest building"):
            check_epsilon(epsilon, tower)


# ---------------------------------------------
# Ground shadows
# ---------------------------------------------

def test_tower_shadow_by_hand(tower):
    shadow = satellite_shadow(tower, EAST_45, tower_ground(tower), satellite_id="S1")
    assert shadow.area == pytest.approx(300.0, rel=1e-4)
    xmin, ymin, xmax, ymax = shadow.region.bounds
    assert (xmin, ymin, xmax, ymax) == pytest.approx((-20.0, 0.0, 10.0, 10.0), abs=1e-3)
    assert point_in(shadow.region, [-15.0, 5.0])
    assert not point_in(shadow.region, [-25.0, 5.0])


def test_tower_shadow_without_footprint(tower):
    ground = tower_ground(tower, exclude_footprints=True)
    shadow = satellite_shadow(tower, EAST_45, ground, satellite_id="S1")
    assert shadow.area == pytest.approx(200.0, rel=1e-4)


def test_shadow_of_no_buildings_is_empty(tower):
    shadow = satellite_shadow(BuildingSet.create([]), EAST_45, tower_ground(tower))
    assert shadow.region.is_empty


def test_shadow_is_clipped_to_the_aoi(tower):
    low_west = sat_position(90.0, 10.0, 2e7)
    template = make_template([("S1", 90.0, 10.0)], half=30.0)
    shadow = satellite_shadow(tower, low_west, load_scenario(template, tower).ground)
    assert shadow.region.bounds[0] == pytest.approx(-30.0, abs=1e-6)


def test_threads_do_not_change_the_shadow(two_building):
    buildings, scenario = two_building
    satellite = scenario.satellites[0]
    single = satellite_shadow(buildings, satellite.position, scenario.ground)
    pooled = satellite_shadow(buildings, satellite.position, scenario.ground, threads=2)
    assert pooled.area == pytest.approx(single.area, rel=1e-9)


def test_short_epsilon_warns_about_truncation(tower, caplog):
    with caplog.at_level(logging.WARNING, logger="zsm.operations.shadows"):
        shadow = satellite_shadow(tower, EAST_45, tower_ground(tower), epsilon=25.0)
    assert "is truncated" in caplog.text
    assert shadow.area < 300.0


# ---------------------------------------------
# Anchors, pieces and direction handling
# ---------------------------------------------

def test_anchor_of_unit_cube():
    cube = box_building((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), "C1")
    np.testing.assert_allclose(building_anchor(cube), [0.5, 0.5, 0.5])


def test_anchor_of_two_boxes_is_the_corner_mean():
    parts = [ConZono.box([0, 0, 0], [1, 1, 1]), ConZono.box([2, 0, 0], [4, 2, 6])]
    b = Building.create("B2", parts)
    corners = np.vstack([vertices(p).points for p in parts])
    assert corners.shape == (16, 3)
    np.testing.assert_allclose(building_anchor(b), corners.mean(axis=0))
    np.testing.assert_allclose(building_anchor(b), [1.75, 0.75, 1.75])


def test_shadow_piece_of_a_leaning_block():
    block = ConZono.box([0, 0, 0], [10, 10, 20])
    lean = ShadowDirection(unit=np.array([np.sqrt(0.5), 0.0, np.sqrt(0.5)]))
    volume = shadow_volume(block, make_direction_zono(lean, 100.0))
    piece = gnss_shadow_piece(volume, ConZono.box([-50, -50], [50, 50]), 0.0)
    assert piece.area == pytest.approx(300.0)
    assert piece.bounds == pytest.approx((-20.0, 0.0, 10.0, 10.0))


def test_shadow_piece_touching_in_a_speck_is_empty():
    # the triangle pokes 3e-8 m into the block
    block = ConZono.box([0, 0, 0], [1, 1, 1])
    sliver = ConZono.from_points(np.array([[1.0 - 3e-8, 0.5], [5.0, 0.0], [5.0, 1.0]]))
    assert gnss_shadow_piece(block, sliver, 0.5).is_empty


def test_flipped_direction_gives_the_same_shadow(tower):
    part = tower[0].parts[0]
    unit = shadow_direction(tower[0], EAST_45).unit
    ground = ConZono.box([-50, -50], [50, 50])
    forward, backward = (
        gnss_shadow_piece(shadow_volume(part, make_direction_zono(ShadowDirection(u), 1e3)), ground, 0.0)
        for u in (unit, -unit)
    )
    assert forward.area == pytest.approx(300.0, rel=1e-6)
    assert sym_diff_area(forward, backward) <= 1e-6


def test_zenith_shadow_is_the_footprint(tower):
    shadow = satellite_shadow(tower, sat_position(0.0, 90.0, 2e7), tower_ground(tower))
    assert sym_diff_area(shadow.region, tower.footprints) <= 1e-3


def test_shadow_shrinks_as_the_satellite_rises(tower):
    template = make_template([("S1", 90.0, 15.0)], half=100.0)
    ground = load_scenario(template, tower).ground
    areas = [
        satellite_shadow(tower, sat_position(90.0, elevation, 2e7), ground).area
        for elevation in (15.0, 30.0, 45.0, 60.0, 75.0, 89.0)
    ]
    assert all(after <= before + 1e-6 for before, after in zip(areas, areas[1:]))
    assert areas[0] == pytest.approx(100.0 + 10.0 * 20.0 / np.tan(np.radians(15.0)), rel=1e-4)


def test_shadow_matches_segment_occlusion(tower):
    satellite = sat_position(90.0, 45.0, 1e6)
    shadow = satellite_shadow(tower, satellite, tower_ground(tower))
    axis = np.arange(-40.0, 40.1, 5.0)
    grid = np.array([(x, y) for x in axis for y in axis])
    grid = grid[boundary_distance(shadow.region, grid) > 1e-2]
    starts = np.column_stack([grid, np.zeros(len(grid))])
    blocked = np.zeros(len(grid), dtype=bool)
    for part in tower.all_parts():
        blocked |= segments_hit(part, starts, satellite)
    np.testing.assert_array_equal(points_in(shadow.region, grid), blocked)
    assert blocked.sum() > 0
