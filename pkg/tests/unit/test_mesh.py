# tests/unit/test_mesh.py

import io

import numpy as np
import pytest

from zsm.core.errors import MeshParseError
from zsm.models.mesh import MeshFormat, TriangleMesh, dump_mesh, load_mesh, segment_buildings
from zsm.operations.scenes import box_mesh, merge_meshes

pytestmark = pytest.mark.unit

SQUARE_OBJ = """\
# unit square as one quad
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
vn 0 0 1
f 1/1/1 2/2/1 3/3/1 4/4/1
"""


def test_load_obj_fans_polygonal_faces():
    mesh = load_mesh(SQUARE_OBJ)
    assert mesh.n_triangles == 2
    assert mesh.triangles.tolist() == [[0, 1, 2], [0, 2, 3]]


def test_load_obj_from_stream_and_bytes():
    from_stream = load_mesh(io.BytesIO(SQUARE_OBJ.encode("utf-8")))
    from_bytes = load_mesh(SQUARE_OBJ.encode("utf-8"), MeshFormat.OBJ)
    np.testing.assert_array_equal(from_stream.triangles, from_bytes.triangles)


def test_load_obj_negative_indices():
    mesh = load_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n")
    assert mesh.triangles.tolist() == [[0, 1, 2]]


def test_load_obj_rejects_quads_without_fan():
    with pytest.raises(MeshParseError, match="line 7: Non-triangular face"):
        load_mesh(SQUARE_OBJ, fan=False)


@pytest.mark.parametrize(
    "text, message",
    [
        ("v 0 0\n", "line 1: Vertex record needs three coordinates"),
        ("v 0 0 x\n", "line 1: Invalid vertex coordinates"),
        ("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n", "line 4: Face index 9 out of range"),
        ("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n", "line 4: Face index 0 is not valid"),
        ("v 0 0 0\nf 1 a 1\n", "line 2: Invalid face index 'a'"),
    ],
    ids=["short_vertex", "bad_coordinate", "index_out_of_range", "zero_index", "bad_index"],
)
def test_load_obj_errors_name_the_line(text, message):
    with pytest.raises(MeshParseError, match=message) as exc_info:
        load_mesh(text)
    assert exc_info.value.line is not None


def test_load_obj_drops_degenerate_triangles(caplog):
    text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 2 0 0\nf 1 2 3\nf 1 2 4\n"
    mesh = load_mesh(text)
    assert mesh.n_triangles == 1
    assert "degenerate" in caplog.text


def test_load_rejects_invalid_utf8():
    with pytest.raises(MeshParseError, match="not UTF-8"):
        load_mesh(b"v 0 0 0\nv 1 0 0\nv 0 1 0\n\xff\xfe f 1 2 3\n", "obj")


def test_json_round_trip():
    mesh = box_mesh((0, 0, 0), (1, 2, 3))
    back = load_mesh(dump_mesh(mesh), MeshFormat.JSON)
    np.testing.assert_allclose(back.vertices, mesh.vertices)
    np.testing.assert_array_equal(back.triangles, mesh.triangles)


def test_json_rejects_bad_indices():
    with pytest.raises(MeshParseError, match="Invalid mesh document"):
        load_mesh('{"vertices": [[0, 0, 0]], "triangles": [[0, 1, 2]]}', "json")


def test_create_rejects_out_of_range_triangles():
    with pytest.raises(MeshParseError, match="out of range"):
        TriangleMesh.create(np.zeros((3, 3)), [[0, 1, 3]])


def test_box_mesh_is_closed():
    mesh = box_mesh((0, 0, 0), (1, 1, 1))
    assert mesh.n_triangles == 12
    assert mesh.triangle_areas().sum() == pytest.approx(6.0)
    edges = np.sort(mesh.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
    _, counts = np.unique(edges, axis=0, return_counts=True)
    assert np.all(counts == 2)


def test_segment_buildings_splits_components_in_order():
    west = box_mesh((-10, 0, 0), (-5, 5, 10))
    east = box_mesh((5, 0, 0), (10, 5, 20))
    parts = segment_buildings(merge_meshes([west, east]))
    assert len(parts) == 2
    assert parts[0].vertices[:, 0].max() == pytest.approx(-5.0)
    assert parts[1].vertices[:, 2].max() == pytest.approx(20.0)


def test_segment_buildings_welds_near_duplicates():
    # two triangles joined only through a vertex duplicated 1e-9 m apart
    vertices = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 0, 1e-9], [2, 0, 0], [2, 1, 0]]
    mesh = TriangleMesh.create(vertices, [[0, 1, 2], [3, 4, 5]])
    assert len(segment_buildings(mesh)) == 1
    assert len(segment_buildings(mesh, weld_tol=1e-12)) == 2


def test_segment_buildings_of_empty_mesh():
    empty = TriangleMesh.create(np.zeros((0, 3)), np.zeros((0, 3), dtype=int))
    assert segment_buildings(empty) == []
