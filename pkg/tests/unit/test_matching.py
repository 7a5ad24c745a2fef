# tests/unit/test_matching.py

import logging

import numpy as np
import pytest
import shapely

from zsm.core.errors import ConfigurationError, ScenarioError
from zsm.geometry.polygon import MultiPolygon2D, point_in
from zsm.models.building import BuildingSet, build_building
from zsm.models.scenario import load_scenario
from zsm.operations.matching import (
    classify,
    measured_labels,
    order_satellites,
    run_zsm,
    select_satellites,
    street_axes,
    street_metrics,
)
from zsm.operations.scenes import random_scene
from zsm.schemas.scenario import Visibility
from tests.conftest import make_template, prepare_scene, prism_mesh, with_cno

pytestmark = pytest.mark.unit


# ---------------------------------------------
# Classification and street frame
# ---------------------------------------------

@pytest.mark.parametrize(
    "cno, expected",
    [(38.0, Visibility.LOS), (37.999, Visibility.NLOS), (45.0, Visibility.LOS), (-5.0, Visibility.NLOS)],
    ids=["at_threshold", "just_below", "open_sky", "negative"],
)
def test_classify(cno, expected):
    assert classify(cno, 38.0) is expected


@pytest.mark.parametrize(
    "frame, expected",
    [
        ((1.0, 0.0), [[0.0, 1.0], [1.0, 0.0]]),
        ((0.0, 1.0), [[-1.0, 0.0], [0.0, 1.0]]),
        ((0.0, 2.0), [[-1.0, 0.0], [0.0, 1.0]]),
    ],
    ids=["east", "north", "unnormalized"],
)
def test_street_axes(frame, expected):
    np.testing.assert_allclose(street_axes(frame), expected)


def test_street_metrics_box():
    estimate = MultiPolygon2D.box(0.0, 0.0, 4.0, 2.0)
    [metrics] = street_metrics(estimate, (1.0, 0.0), true_position=(1.0, 1.0))
    assert metrics.widths == pytest.approx((2.0, 4.0))
    assert metrics.area == pytest.approx(8.0)
    assert metrics.centroid == pytest.approx((2.0, 1.0))
    assert metrics.contains_truth is True
    assert metrics.centroid_error == pytest.approx((0.0, 1.0))


def test_street_metrics_two_components_without_truth():
    left = MultiPolygon2D.box(0.0, 0.0, 1.0, 5.0)
    right = MultiPolygon2D.box(3.0, 0.0, 4.0, 5.0)
    estimate = MultiPolygon2D.from_geometry(left.geometry.union(right.geometry))
    metrics = street_metrics(estimate, (0.0, 1.0))
    assert len(metrics) == 2
    for m in metrics:
        assert m.widths == pytest.approx((1.0, 5.0))
        assert m.contains_truth is None
        assert m.centroid_error is None


# ---------------------------------------------
# Satellite selection
# ---------------------------------------------

def test_select_by_ids_keeps_scenario_order(two_building):
    _, scenario = two_building
    subset = select_satellites(scenario, ids=["G05", "G01"])
    assert [s.id for s in subset.satellites] == ["G01", "G05"]
    assert set(subset.cno) == {"G01", "G05"}


def test_select_unknown_id(two_building):
    _, scenario = two_building
    with pytest.raises(ScenarioError, match="Unknown satellite ids: X99"):
        select_satellites(scenario, ids=["G01", "X99"])


def test_random_subset_is_seeded(two_building):
    _, scenario = two_building
    first = select_satellites(scenario, count=4, seed=7)
    again = select_satellites(scenario, count=4, seed=7)
    assert [s.id for s in first.satellites] == [s.id for s in again.satellites]
    ids = [s.id for s in first.satellites]
    assert len(ids) == 4
    assert ids == sorted(ids)


@pytest.mark.parametrize("count", [0, 10], ids=["zero", "too_many"])
def test_random_subset_size(two_building, count):
    _, scenario = two_building
    with pytest.raises(ScenarioError, match="Cannot pick"):
        select_satellites(scenario, count=count)


def test_order_by_elevation(two_building):
    _, scenario = two_building
    ordered = order_satellites(scenario, list(scenario.satellites), "elevation")
    elevations = [scenario.elevation_of(s) for s in ordered]
    assert elevations == sorted(elevations, reverse=True)
    with pytest.raises(ScenarioError):
        order_satellites(scenario, list(scenario.satellites), "azimuth")


def test_measured_labels_need_cno(tower):
    scenario = load_scenario(make_template([("S1", 90.0, 45.0)]), tower)
    with pytest.raises(ScenarioError, match="No C/N0 measurement"):
        measured_labels(scenario, scenario.satellites)


# ---------------------------------------------
# ZSM runs
# ---------------------------------------------

def test_two_building_estimate(two_building):
    buildings, scenario = two_building
    report = run_zsm(buildings, scenario)
    assert not report.inconsistent
    assert report.truth_inside is True
    assert [report.labels[f"G0{k}"] for k in range(1, 5)] == [Visibility.NLOS] * 4
    assert [report.labels[f"G0{k}"] for k in range(5, 10)] == [Visibility.LOS] * 5
    assert len(report.steps) == 9
    areas = [step.estimate_area for step in report.steps]
    assert all(b <= a + 1e-6 for a, b in zip(areas, areas[1:]))
    assert report.area == pytest.approx(areas[-1])
    assert report.area < scenario.ground.aoi.area
    assert any(c.contains_truth for c in report.components)
    assert report.timings.online_s > 0.0


def test_elevation_order_gives_the_same_estimate(two_building):
    buildings, scenario = two_building
    by_input = run_zsm(buildings, scenario)
    by_elevation = run_zsm(buildings, scenario, order="elevation")
    assert by_elevation.area == pytest.approx(by_input.area, rel=1e-6)
    assert by_elevation.satellites_used[0] == "G07"
    assert by_elevation.order == "elevation"


def test_opposite_nlos_shadows_are_inconsistent(tower, caplog):
    template = make_template([("S1", 90.0, 45.0), ("S2", 270.0, 45.0)], exclude_footprints=True)
    scenario = load_scenario(with_cno(template, ["NLOS", "NLOS"]), tower)
    with caplog.at_level(logging.WARNING, logger="zsm.operations.matching"):
        report = run_zsm(tower, scenario)
    assert report.inconsistent
    assert report.area == 0.0
    assert report.components == []
    assert "Estimate is empty" in caplog.text


def test_los_satellite_removes_its_shadow(tower):
    template = make_template([("S1", 90.0, 45.0)])
    scenario = load_scenario(with_cno(template, ["LOS"]), tower)
    report = run_zsm(tower, scenario)
    assert report.area == pytest.approx(100.0 * 100.0 - 300.0, rel=1e-4)
    assert report.steps[0].shadow_area == pytest.approx(300.0, rel=1e-4)


def test_run_zsm_rejects_short_epsilon(two_building):
    buildings, scenario = two_building
    with pytest.raises(ConfigurationError):
        run_zsm(buildings, scenario, epsilon=35.0)


def test_run_zsm_needs_usable_satellites(two_building):
    buildings, scenario = two_building
    masked = select_satellites(scenario, min_elevation_deg=85.0)
    with pytest.raises(ScenarioError, match="No usable satellites"):
        run_zsm(buildings, masked)


def test_elevation_mask_drops_low_satellites(two_building):
    buildings, scenario = two_building
    report = run_zsm(buildings, select_satellites(scenario, min_elevation_deg=45.0))
    assert "G06" not in report.satellites_used
    assert set(report.satellites_used) == {"G03", "G04", "G07", "G08", "G09"}


@pytest.mark.parametrize("sides", [8, 9, 11])
def test_round_tower_shadow(sides):
    tower = BuildingSet.create([build_building(prism_mesh(sides, 10.0, 20.0), building_id="R1")])
    template = make_template([("S1", 90.0, 45.0)])
    report = run_zsm(tower, load_scenario(with_cno(template, ["NLOS"]), tower))
    ring = prism_mesh(sides, 10.0, 20.0).vertices[:sides, :2]
    # polygon swept 20 m west at 45 degrees elevation
    expected = shapely.MultiPoint(np.vstack([ring, ring - [20.0, 0.0]])).convex_hull.area
    assert not report.inconsistent
    assert report.area == pytest.approx(expected, rel=1e-4)
    assert point_in(report.region, (-20.0, 0.0))
    assert not point_in(report.region, (20.0, 0.0))


def test_first_random_scene_keeps_the_truth():
    buildings, scenario = prepare_scene(*random_scene(0))
    report = run_zsm(buildings, scenario)
    assert not report.inconsistent
    assert report.truth_inside
