# tests/unit/test_oracle.py

import logging

import numpy as np
import pytest

from zsm.core.errors import ConfigurationError
from zsm.geometry.polygon import MultiPolygon2D
from zsm.models.building import BuildingSet
from zsm.models.scenario import load_scenario
from zsm.operations.matching import run_zsm
from zsm.operations.oracle import oracle_check, oracle_membership, raster
from tests.conftest import make_template, with_cno

pytestmark = pytest.mark.unit


@pytest.fixture
def tower_nlos(tower):
    template = make_template([("S1", 90.0, 45.0)], half=30.0, exclude_footprints=True)
    return load_scenario(with_cno(template, ["NLOS"]), tower)


def test_raster_cells(tower_nlos):
    cells = raster(tower_nlos, 10.0)
    # 6 x 6 cells over the 60 m square, one of them at the tower center
    assert len(cells) == 35
    assert not np.any(np.all(cells.candidates == [5.0, 5.0], axis=1))


def test_raster_needs_positive_pitch(tower_nlos):
    with pytest.raises(ConfigurationError):
        raster(tower_nlos, 0.0)


def test_oracle_membership_matches_the_shadow(tower, tower_nlos):
    cells = raster(tower_nlos, 10.0)
    inside = oracle_membership(tower, tower_nlos, cells)
    members = {tuple(c) for c in cells.candidates[inside].tolist()}
    assert members == {(-15.0, 5.0), (-5.0, 5.0)}


def test_oracle_agrees_with_zsm(tower, tower_nlos):
    report = run_zsm(tower, tower_nlos)
    oracle = oracle_check(tower, tower_nlos, report.region, pitch=1.0)
    assert oracle.band == 2.0
    assert oracle.cells_compared > 0
    assert oracle.disagreements == 0
    assert oracle.agreement == 1.0
    assert not oracle.degenerate


def test_wrong_estimate_disagrees(tower, tower_nlos):
    wrong = MultiPolygon2D.box(15.0, 15.0, 25.0, 25.0)
    oracle = oracle_check(tower, tower_nlos, wrong, pitch=2.0)
    assert oracle.disagreements > 0
    assert oracle.agreement < 1.0


def test_tiny_estimate_is_degenerate(tower, tower_nlos, caplog):
    tiny = MultiPolygon2D.box(-5.0, 5.0, -4.9, 5.1)
    with caplog.at_level(logging.WARNING, logger="zsm.operations.oracle"):
        oracle = oracle_check(tower, tower_nlos, tiny, pitch=1.0)
    assert oracle.degenerate
    assert "below one raster cell" in caplog.text


def test_open_field_estimate_is_the_aoi():
    empty = BuildingSet.create([])
    template = make_template([("S1", 90.0, 45.0), ("S2", 0.0, 60.0)], half=10.0)
    scenario = load_scenario(with_cno(template, ["LOS", "LOS"]), empty)
    report = run_zsm(empty, scenario)
    assert report.area == pytest.approx(400.0)
    oracle = oracle_check(empty, scenario, report.region, pitch=1.0)
    assert oracle.agreement == 1.0
    assert oracle.cells_compared == 16 * 16
