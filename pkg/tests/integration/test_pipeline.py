# tests/integration/test_pipeline.py
"""
End-to-end runs of the library on the fixture scenes.
"""

import numpy as np
import pytest

from zsm.geometry.polygon import point_in
from zsm.operations.baseline import run_sm
from zsm.operations.matching import run_zsm, select_satellites
from zsm.operations.oracle import oracle_check
from zsm.operations.scenes import grid_parity_ground
from tests.conftest import prepare_scene

pytestmark = pytest.mark.integration


@pytest.fixture(scope="module")
def two_building_report(two_building):
    buildings, scenario = two_building
    return run_zsm(buildings, scenario)


@pytest.fixture(scope="module")
def grid_parity():
    mesh, template = grid_parity_ground()
    return prepare_scene(mesh, template)


def test_truth_inside_two_building_estimate(two_building_report):
    assert two_building_report.truth_inside
    [home] = [c for c in two_building_report.components if c.contains_truth]
    # the receiver stands in a 20 m wide street
    assert home.widths[0] <= 20.0 + 1e-6


def test_two_building_oracle_agreement(two_building, two_building_report):
    buildings, scenario = two_building
    oracle = oracle_check(buildings, scenario, two_building_report.region, pitch=1.0)
    assert oracle.cells_compared > 0
    assert oracle.agreement >= 0.99


@pytest.mark.slow
def test_two_building_oracle_agreement_fine_pitch(two_building, two_building_report):
    buildings, scenario = two_building
    oracle = oracle_check(buildings, scenario, two_building_report.region, pitch=0.5)
    assert oracle.agreement >= 0.99


def test_perfect_sm_candidates_lie_in_zsm_estimate(two_building, two_building_report):
    buildings, scenario = two_building
    sm, _ = run_sm(buildings, scenario, 2.0)
    perfect = [c for c, s in zip(sm.candidates, sm.scores) if s == sm.n_satellites]
    assert perfect
    region = two_building_report.region
    assert all(point_in(region, c, tol=1e-3) for c in perfect)


def test_zsm_is_tighter_than_sm_bounds(two_building, two_building_report):
    buildings, scenario = two_building
    sm, _ = run_sm(buildings, scenario, 5.0)
    [home] = [c for c in two_building_report.components if c.contains_truth]
    assert home.widths[0] < sm.bounds[0]
    assert home.widths[1] < sm.bounds[1]


def test_grid_parity_pipeline(grid_parity):
    buildings, scenario = grid_parity
    report = run_zsm(buildings, scenario)
    assert report.truth_inside
    sm, grid = run_sm(buildings, scenario, 10.0)
    assert len(grid) == 97
    perfect = np.array([c for c, s in zip(sm.candidates, sm.scores) if s == sm.n_satellites])
    for candidate in perfect:
        assert point_in(report.region, candidate, tol=1e-3)


def test_fewer_satellites_never_shrink_the_estimate(two_building, two_building_report):
    buildings, scenario = two_building
    subset = run_zsm(buildings, select_satellites(scenario, ids=["G01", "G02", "G05"]))
    assert subset.area >= two_building_report.area - 1e-6
    assert subset.truth_inside
