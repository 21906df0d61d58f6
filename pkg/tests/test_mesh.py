import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rockmodel.errors import OpenMeshError
from rockmodel.mesh import (
    TriMesh,
    classify_points_mesh,
    export_obj,
    is_watertight,
    mesh_volume,
    point_in_mesh,
    surface_area,
)
from rockmodel.solids import extrude
from rockmodel.wireframe import Location, Plane, UnitRegion

from .oracles import parse_obj

CUBE_V = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0), (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)]
CUBE_T = [
    (0, 2, 1), (0, 3, 2),  # bottom
    (4, 5, 6), (4, 6, 7),  # top
    (0, 1, 5), (0, 5, 4),  # south
    (1, 2, 6), (1, 6, 5),  # east
    (2, 3, 7), (2, 7, 6),  # north
    (3, 0, 4), (3, 4, 7),  # west
]


def cube(tag=None):
    return TriMesh(np.array(CUBE_V, dtype=float), np.array(CUBE_T), tag)


def test_cube_is_watertight():
    assert is_watertight(cube())


def test_missing_face_gives_four_boundary_edges():
    m = TriMesh(np.array(CUBE_V, dtype=float), np.array(CUBE_T[2:]))
    check = is_watertight(m)
    assert not check
    assert len(check.boundary_edges) == 4
    assert len(check.diagnostics()) == 4


def test_same_winding_pair_is_misoriented():
    m = TriMesh([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 0, 1)], [(0, 1, 2), (0, 1, 3)])
    check = is_watertight(m)
    assert not check
    assert check.misoriented_edges == [(0, 1)]
    assert any("orientation" in d for d in check.diagnostics())


def test_index_out_of_range():
    with pytest.raises(IndexError):
        TriMesh([(0, 0, 0)], [(0, 1, 2)])


def test_volume_examples():
    assert mesh_volume(cube()) == pytest.approx(1.0, abs=1e-12)
    assert mesh_volume(cube().scaled(2.0)) == pytest.approx(8.0, abs=1e-12)
    assert mesh_volume(cube().translated((1000, 1000, 1000))) == pytest.approx(1.0, abs=1e-9)
    assert mesh_volume(cube().flipped()) == pytest.approx(-1.0, abs=1e-12)
    assert surface_area(cube()) == pytest.approx(6.0)


def test_open_mesh_volume_raises():
    with pytest.raises(OpenMeshError):
        mesh_volume(TriMesh(np.array(CUBE_V, dtype=float), np.array(CUBE_T[2:])))
    with pytest.raises(OpenMeshError):
        point_in_mesh(TriMesh(np.array(CUBE_V, dtype=float), np.array(CUBE_T[2:])), (0.5, 0.5, 0.5))


@settings(max_examples=60)
@given(
    st.tuples(st.floats(-1e4, 1e4), st.floats(-1e4, 1e4), st.floats(-1e4, 1e4)),
    st.floats(0.1, 50.0),
)
def test_volume_translation_and_scale(offset, k):
    m = extrude(UnitRegion(1, "c", ((0, 0), (4, 0), (4, 1), (1, 1), (1, 3), (4, 3), (4, 4), (0, 4))), Plane.PLAN_XY, (0, 2))
    v = mesh_volume(m)
    assert mesh_volume(m.translated(offset)) == pytest.approx(v, rel=1e-9)
    assert mesh_volume(m.scaled(k)) == pytest.approx(v * k**3, rel=1e-9)


def test_point_in_mesh_examples():
    m = cube()
    assert point_in_mesh(m, (0.5, 0.5, 0.5)) is Location.INSIDE
    assert point_in_mesh(m, (3, 3, 3)) is Location.OUTSIDE
    assert point_in_mesh(m, (0.5, 0.5, 1.0)) is Location.ON_BOUNDARY
    assert point_in_mesh(m, (2 / 3, 1 / 3, 0.0)) is Location.ON_BOUNDARY
    assert point_in_mesh(m, (1.0, 1.0, 1.0)) is Location.ON_BOUNDARY


def test_point_in_mesh_ray_independent():
    m = extrude(UnitRegion(1, "c", ((0, 0), (4, 0), (4, 1), (1, 1), (1, 3), (4, 3), (4, 4), (0, 4))), Plane.PLAN_XY, (0, 2))
    rng = np.random.default_rng(5)
    pts = rng.uniform(-0.5, 4.5, size=(2000, 3))
    pts[:, 2] = rng.uniform(-0.5, 2.5, size=2000)
    results = [classify_points_mesh(m, pts, rng=np.random.default_rng(seed)) for seed in range(5)]
    for r in results[1:]:
        np.testing.assert_array_equal(r, results[0])
    # points along axis-aligned lines through vertices and edges still classify
    grid = np.array([(x, y, 1.0) for x in (0.5, 1.0 + 1e-3, 2.0) for y in (0.5, 1.0 - 1e-3, 2.0, 3.5)])
    expected = [
        Location.INSIDE if (x < 1 or y < 1 or y > 3) else Location.OUTSIDE for x, y, _ in grid
    ]
    np.testing.assert_array_equal(classify_points_mesh(m, grid), [int(e) for e in expected])


def test_obj_single_triangle():
    text = export_obj([TriMesh([(0, 0, 0), (1, 0, 0), (0, 1, 0)], [(0, 1, 2)])])
    lines = text.splitlines()
    assert sum(line.startswith("v ") for line in lines) == 3
    assert [line for line in lines if line.startswith("f ")] == ["f 1 2 3"]


def test_obj_cumulative_indices():
    text = export_obj([cube((1, 1)), cube((1, 2)).translated((2, 0, 0))])
    faces = [line for line in text.splitlines() if line.startswith("f ")]
    second = {int(t) for line in faces[12:] for t in line.split()[1:]}
    assert second == set(range(9, 17))
    assert "o mass1_layer1" in text and "o mass1_layer2" in text


def test_obj_empty_is_header_only():
    text = export_obj([])
    assert all(line.startswith("#") for line in text.splitlines())
    assert text.endswith("\n")


def test_obj_round_trip():
    rng = np.random.default_rng(2)
    m = cube((3, 4)).scaled(np.pi).translated(rng.uniform(-1e4, 1e4, 3))
    parsed = parse_obj(export_obj([m]))
    verts, faces = parsed["mass3_layer4"]
    assert np.max(np.abs(verts - m.vertices)) <= 1e-9
    np.testing.assert_array_equal(faces, m.triangles)
