import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rockmodel import sample
from rockmodel.errors import GeometryWarning, InvalidPolygonError, InvertedAltitudeError, WrongPlaneError
from rockmodel.wireframe import (
    EPS_GEOM,
    BoundingBox,
    Location,
    PlanarSubdivision,
    Plane,
    UnitRegion,
    bounding_box,
    classify_points,
    derive_height,
    point_in_polygon,
    polygon_area,
    segment_distance,
    validate_subdivision,
)

from .oracles import winding_number

SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]
TEST_RINGS = [
    SQUARE,
    [(0, 0), (4, 0), (4, 1), (1, 1), (1, 3), (4, 3), (4, 4), (0, 4)],  # C shape
    [(0, 0), (5, 0), (2.5, 1.0), (5, 5), (0, 5), (2.0, 2.5)],
    list(sample.PLAN_OUTLINE),
    list(sample.PROFILE_UNITS[2].polygon),
]


def _sq(uid, x0, y0, x1, y1):
    return UnitRegion(uid, f"u{uid}", ((x0, y0), (x1, y0), (x1, y1), (x0, y1)))


def test_area_examples():
    assert polygon_area(SQUARE) == 1.0
    assert polygon_area([(0, 0), (2, 0), (0, 2)]) == 2.0
    with pytest.raises(InvalidPolygonError):
        polygon_area([(0, 0), (1, 1), (2, 2)])
    with pytest.raises(InvalidPolygonError):
        polygon_area([(0, 0), (1, 1), (1, 0), (0, 1)])


@settings(max_examples=100)
@given(st.floats(-1e4, 1e4), st.floats(-1e4, 1e4), st.floats(0.01, 100.0), st.sampled_from(TEST_RINGS))
def test_area_translation_and_scale(dx, dy, k, ring):
    a = polygon_area(ring)
    moved = [(x + dx, y + dy) for x, y in ring]
    scaled = [(k * x, k * y) for x, y in ring]
    assert polygon_area(moved) == pytest.approx(a, rel=1e-9)
    assert polygon_area(scaled) == pytest.approx(k * k * a, rel=1e-9)


def test_point_in_polygon_examples():
    assert point_in_polygon((0.5, 0.5), SQUARE) is Location.INSIDE
    assert point_in_polygon((2, 2), SQUARE) is Location.OUTSIDE
    assert point_in_polygon((1, 0.5), SQUARE) is Location.ON_BOUNDARY
    assert point_in_polygon((0, 0), SQUARE) is Location.ON_BOUNDARY
    assert point_in_polygon((1 + 0.5 * EPS_GEOM, 0.5), SQUARE) is Location.ON_BOUNDARY


def _edge_distance(p, ring):
    n = len(ring)
    return min(segment_distance(p, p, ring[i], ring[(i + 1) % n]) for i in range(n))


@pytest.mark.parametrize("ring", TEST_RINGS, ids=["square", "c-shape", "notched", "plan-outline", "upper-layer"])
def test_point_in_polygon_agrees_with_winding_number(ring):
    rng = np.random.default_rng(3)
    arr = np.asarray(ring, dtype=float)
    lo, hi = arr.min(axis=0), arr.max(axis=0)
    span = hi - lo
    pts = rng.uniform(lo - 0.1 * span, hi + 0.1 * span, size=(10_000, 2))
    codes = classify_points(pts, ring)
    checked = 0
    for p, code in zip(pts, codes):
        if _edge_distance(tuple(p), ring) <= EPS_GEOM:
            continue
        expected = Location.INSIDE if winding_number(p, ring) != 0 else Location.OUTSIDE
        assert code == expected, p
        checked += 1
    assert checked > 9_900


def test_classify_points_on_vertices_and_edges():
    ring = TEST_RINGS[1]
    codes = classify_points(np.asarray(ring, dtype=float), ring)
    assert (codes == Location.ON_BOUNDARY).all()
    mids = [((ring[i][0] + ring[i - 1][0]) / 2, (ring[i][1] + ring[i - 1][1]) / 2) for i in range(len(ring))]
    assert (classify_points(mids, ring) == Location.ON_BOUNDARY).all()


def test_validate_disjoint_squares():
    s = PlanarSubdivision(Plane.PLAN_XY, [_sq(1, 0, 0, 1, 1), _sq(2, 2, 0, 3, 1)])
    assert validate_subdivision(s) == []


def test_validate_shared_edge_is_fine():
    s = PlanarSubdivision(Plane.PLAN_XY, [_sq(1, 0, 0, 1, 1), _sq(2, 1, 0, 2, 1)])
    assert validate_subdivision(s) == []


def test_validate_overlap():
    s = PlanarSubdivision(Plane.PLAN_XY, [_sq(1, 0, 0, 2, 2), _sq(2, 1, 1, 3, 3)])
    diags = validate_subdivision(s)
    assert len(diags) == 1
    assert diags[0].kind == "interior-overlap"
    assert set(diags[0].unit_ids) == {1, 2}


def test_validate_containment_is_overlap():
    s = PlanarSubdivision(Plane.PLAN_XY, [_sq(1, 0, 0, 4, 4), _sq(2, 1, 1, 2, 2)])
    assert [d.kind for d in validate_subdivision(s)] == ["interior-overlap"]


def test_validate_clockwise():
    cw = UnitRegion(1, "cw", ((0, 0), (0, 1), (1, 1), (1, 0)))
    diags = validate_subdivision(PlanarSubdivision(Plane.PLAN_XY, [cw]))
    assert len(diags) == 1
    assert diags[0].kind == "orientation"
    assert diags[0].auto_fixable
    assert diags[0].unit_ids == (1,) or list(diags[0].unit_ids) == [1]


def test_validate_other_violations():
    bow = UnitRegion(1, "bow", ((0, 0), (1, 1), (1, 0), (0, 1)))
    kinds = {d.kind for d in validate_subdivision(PlanarSubdivision(Plane.PLAN_XY, [bow]))}
    assert "self-intersection" in kinds
    dup = PlanarSubdivision(Plane.PLAN_XY, [_sq(1, 0, 0, 1, 1), _sq(1, 5, 0, 6, 1)])
    assert [d.kind for d in validate_subdivision(dup)] == ["duplicate-id"]
    assert [d.kind for d in validate_subdivision(PlanarSubdivision(Plane.PLAN_XY, []))] == ["empty-subdivision"]
    bad = UnitRegion(1, "b", tuple(SQUARE), sweep_interval=(3.0, 1.0))
    assert [d.kind for d in validate_subdivision(PlanarSubdivision(Plane.PLAN_XY, [bad]))] == ["bad-interval"]


def test_oriented_reverses_with_warning():
    cw = UnitRegion(1, "cw", ((0, 0), (0, 1), (1, 1), (1, 0)))
    with pytest.warns(GeometryWarning):
        fixed = cw.oriented()
    assert fixed.is_ccw
    assert validate_subdivision(PlanarSubdivision(Plane.PLAN_XY, [fixed])) == []


def test_closing_vertex_is_dropped():
    u = UnitRegion(1, "closed", ((0, 0), (1, 0), (1, 1), (0, 1), (0, 0)))
    assert len(u.polygon) == 4


def test_sample_subdivisions_are_valid(sample_plan, sample_profile):
    assert validate_subdivision(sample_plan) == []
    assert validate_subdivision(sample_profile) == []


def test_sample_units_tile_outlines(sample_plan, sample_profile):
    assert sum(u.area for u in sample_plan.units) == pytest.approx(polygon_area(sample.PLAN_OUTLINE), rel=1e-12)
    assert sum(u.area for u in sample_profile.units) == pytest.approx(polygon_area(sample.PROFILE_OUTLINE), rel=1e-12)


def test_derive_height_examples():
    assert derive_height(470, 425, 5) == 50
    assert derive_height(470, 425, 0) == 45
    with pytest.raises(InvertedAltitudeError):
        derive_height(100, 100, 5)
    with pytest.raises(InvertedAltitudeError):
        derive_height(400, 425, 5)
    with pytest.raises(ValueError):
        derive_height(470, 425, -1)


@given(st.integers(0, 1000), st.integers(-500, 500), st.integers(1, 500), st.integers(0, 100))
def test_derive_height_additive(terrain, base, gap, pad):
    # integer-valued meters keep the arithmetic exact
    top = float(base + gap)
    assert derive_height(top, float(base), float(pad)) == derive_height(top, float(base), 0.0) + pad
    del terrain


def test_bounding_box_sample(sample_plan, sample_profile):
    box = bounding_box(sample_plan, sample_profile)
    assert box.length == pytest.approx(255, abs=0.5)
    assert box.width == pytest.approx(70, abs=0.5)
    assert box.height == pytest.approx(50, abs=0.5)


def test_bounding_box_unit_squares():
    plan = PlanarSubdivision(Plane.PLAN_XY, [_sq(1, 0, 0, 1, 1)])
    prof = PlanarSubdivision(Plane.PROFILE_XZ, [_sq(1, 0, 0, 1, 1)])
    assert bounding_box(plan, prof).as_tuple() == (1, 1, 1)


def test_bounding_box_union_of_x():
    plan = PlanarSubdivision(Plane.PLAN_XY, [_sq(1, 0, 0, 10, 1)])
    prof = PlanarSubdivision(Plane.PROFILE_XZ, [_sq(1, 2, 0, 5, 1)])
    assert bounding_box(plan, prof).length == 10


def test_bounding_box_clip_and_errors():
    plan = PlanarSubdivision(Plane.PLAN_XY, [_sq(1, 0, 0, 1, 1)])
    prof = PlanarSubdivision(Plane.PROFILE_XZ, [_sq(1, 0, 0, 1, 10)])
    assert bounding_box(plan, prof, z_clip=(2.0, 5.0)).height == 3.0
    with pytest.raises(WrongPlaneError):
        bounding_box(prof, plan)
    with pytest.raises(ValueError):
        BoundingBox(1.0, 0.0, 1.0)


def test_nonfinite_vertex_is_diagnosed():
    u = UnitRegion(1, "nan", ((0, 0), (float("nan"), 0), (1, 1)))
    diags = validate_subdivision(PlanarSubdivision(Plane.PLAN_XY, [u]))
    assert [(d.kind, d.vertices) for d in diags] == [("non-finite", (1,))]
