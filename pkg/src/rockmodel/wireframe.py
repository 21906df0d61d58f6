"""Planar wireframe subdivisions in plan (XY) and profile (XZ) views.

A subdivision is a labeled set of interior-disjoint simple polygons.  The
plan view holds the rock-mass footprints, the profile view holds the layer
bands; both share the model x axis.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import GeometryWarning, InvalidPolygonError, InvertedAltitudeError, WrongPlaneError
from .triangulate import earclip

EPS_GEOM = 1e-9


class Plane(enum.Enum):
    PLAN_XY = "plan"
    PROFILE_XZ = "profile"

    @property
    def sweep_axis(self) -> str:
        return "z" if self is Plane.PLAN_XY else "y"


class Location(enum.IntEnum):
    OUTSIDE = 0
    INSIDE = 1
    ON_BOUNDARY = 2


@dataclass(frozen=True)
class UnitRegion:
    """One labeled polygon of a subdivision.

    ``polygon`` is an open vertex ring (no repeated closing vertex) in the
    subdivision's plane coordinates; ``sweep_interval`` optionally overrides
    the model-wide extrusion interval for this unit.
    """

    id: int
    name: str
    polygon: tuple
    sweep_interval: Optional[tuple] = None

    def __post_init__(self):
        ring = tuple((float(u), float(v)) for u, v in self.polygon)
        if len(ring) > 1 and ring[0] == ring[-1]:
            ring = ring[:-1]
        object.__setattr__(self, "polygon", ring)
        if self.sweep_interval is not None:
            lo, hi = self.sweep_interval
            object.__setattr__(self, "sweep_interval", (float(lo), float(hi)))

    @property
    def area(self) -> float:
        return polygon_area(self.polygon)

    def is_ccw(self) -> bool:
        return signed_area(self.polygon) > 0.0

    def oriented(self) -> "UnitRegion":
        """Copy with a counterclockwise ring, warning if a reversal was needed."""
        if signed_area(self.polygon) < 0.0:
            warnings.warn(
                f"unit {self.id} ({self.name}): clockwise ring reversed to counterclockwise",
                GeometryWarning,
                stacklevel=2,
            )
            return replace(self, polygon=tuple(reversed(self.polygon)))
        return self

    def shifted(self, du: float = 0.0, dv: float = 0.0) -> "UnitRegion":
        if du == 0.0 and dv == 0.0:
            return self
        return replace(self, polygon=tuple((u + du, v + dv) for u, v in self.polygon))

    def u_range(self) -> tuple[float, float]:
        us = [u for u, _ in self.polygon]
        return min(us), max(us)

    def v_range(self) -> tuple[float, float]:
        vs = [v for _, v in self.polygon]
        return min(vs), max(vs)


@dataclass(frozen=True)
class PlanarSubdivision:
    plane: Plane
    units: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "plane", Plane(self.plane))
        object.__setattr__(self, "units", tuple(self.units))

    def unit(self, unit_id: int) -> UnitRegion:
        for u in self.units:
            if u.id == unit_id:
                return u
        raise KeyError(unit_id)

    def oriented(self) -> "PlanarSubdivision":
        return replace(self, units=tuple(u.oriented() for u in self.units))

    def shifted(self, du: float = 0.0) -> "PlanarSubdivision":
        return replace(self, units=tuple(u.shifted(du) for u in self.units))

    def u_range(self) -> tuple[float, float]:
        lo, hi = zip(*(u.u_range() for u in self.units))
        return min(lo), max(hi)

    def v_range(self) -> tuple[float, float]:
        lo, hi = zip(*(u.v_range() for u in self.units))
        return min(lo), max(hi)


@dataclass(frozen=True)
class BoundingBox:
    """Extents in meters along x (length), y (width) and z (height)."""

    length: float
    width: float
    height: float

    def __post_init__(self):
        for name in ("length", "width", "height"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"bounding box {name} must be positive, got {getattr(self, name)}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.length, self.width, self.height)


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    unit_ids: tuple
    vertices: tuple = ()
    message: str = ""
    auto_fixable: bool = False

    def __str__(self):
        ids = ",".join(str(i) for i in self.unit_ids)
        text = f"[{self.kind}] unit {ids}"
        if self.vertices:
            text += f" vertices {list(self.vertices)}"
        if self.message:
            text += f": {self.message}"
        if self.auto_fixable:
            text += " (auto-fixable)"
        return text


# -- polygon predicates ------------------------------------------------------


def signed_area(ring) -> float:
    """Shoelace area, positive for counterclockwise rings."""
    pts = np.asarray(ring, dtype=float)
    if len(pts) < 3:
        return 0.0
    # shift to the first vertex so large offsets do not cost precision
    d = pts - pts[0]
    x, y = d[:, 0], d[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _seg_point_dist(p, a, b) -> float:
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return math.hypot(p[0] - ax, p[1] - ay)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / L2
    t = min(1.0, max(0.0, t))
    return math.hypot(p[0] - ax - t * dx, p[1] - ay - t * dy)


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _segments_cross(a, b, c, d) -> bool:
    """Proper crossing of the open segments ab and cd."""
    d1, d2 = _orient(c, d, a), _orient(c, d, b)
    d3, d4 = _orient(a, b, c), _orient(a, b, d)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and 0 not in (d1, d2, d3, d4)


def segment_distance(a, b, c, d) -> float:
    if _segments_cross(a, b, c, d):
        return 0.0
    return min(_seg_point_dist(a, c, d), _seg_point_dist(b, c, d), _seg_point_dist(c, a, b), _seg_point_dist(d, a, b))


def self_intersections(ring) -> list[tuple[int, int]]:
    """Pairs of edge indices that touch where a simple ring would not.

    Edge ``i`` runs from vertex ``i`` to ``i + 1``.  Adjacent edges only
    count when they fold back over each other.
    """
    n = len(ring)
    bad = []
    for i in range(n):
        a, b = ring[i], ring[(i + 1) % n]
        for j in range(i + 1, n):
            c, d = ring[j], ring[(j + 1) % n]
            if j == i + 1 or (i == 0 and j == n - 1):
                # shared vertex: reject only a fold-back onto the previous edge
                if j == i + 1:
                    p, q, r = a, b, d
                else:
                    p, q, r = c, a, b
                if abs(_orient(p, q, r)) <= EPS_GEOM * max(1.0, math.dist(p, q), math.dist(q, r)) and (
                    (r[0] - q[0]) * (p[0] - q[0]) + (r[1] - q[1]) * (p[1] - q[1]) > 0
                ):
                    bad.append((i, j))
                continue
            if segment_distance(a, b, c, d) <= EPS_GEOM:
                bad.append((i, j))
    return bad


def _check_ring(ring):
    if len(ring) < 3:
        raise InvalidPolygonError(f"ring needs at least 3 vertices, got {len(ring)}")
    if not np.all(np.isfinite(np.asarray(ring, dtype=float))):
        raise InvalidPolygonError("ring has non-finite coordinates")
    if abs(signed_area(ring)) <= EPS_GEOM * EPS_GEOM:
        raise InvalidPolygonError("ring has zero area")
    crossings = self_intersections(ring)
    if crossings:
        raise InvalidPolygonError(f"ring self-intersects at edges {crossings}")


def polygon_area(ring) -> float:
    ring = [tuple(map(float, p)) for p in ring]
    if len(ring) > 1 and ring[0] == ring[-1]:
        ring = ring[:-1]
    _check_ring(ring)
    return abs(signed_area(ring))


def classify_points(points, ring, eps: float = EPS_GEOM) -> np.ndarray:
    """Vectorized :func:`point_in_polygon`; returns an array of Location codes."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    poly = np.asarray(ring, dtype=float)
    px, py = pts[:, 0:1], pts[:, 1:2]
    ax, ay = poly[:, 0], poly[:, 1]
    bx, by = np.roll(ax, -1), np.roll(ay, -1)

    # even-odd crossings of a +u ray
    straddle = (ay > py) != (by > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = ax + (py - ay) * (bx - ax) / (by - ay)
    inside = np.count_nonzero(straddle & (px < xint), axis=1) % 2 == 1

    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.clip(((px - ax) * dx + (py - ay) * dy) / L2, 0.0, 1.0)
    t = np.where(L2 > 0, t, 0.0)
    dist = np.hypot(px - ax - t * dx, py - ay - t * dy).min(axis=1)

    out = np.where(inside, int(Location.INSIDE), int(Location.OUTSIDE))
    out[dist <= eps] = int(Location.ON_BOUNDARY)
    return out


def point_in_polygon(p, ring) -> Location:
    return Location(int(classify_points([p], ring)[0]))


# -- subdivision validation --------------------------------------------------


def _triangles_overlap(t1, t2, eps=EPS_GEOM) -> bool:
    """Interior overlap of two CCW triangles by separating axes."""
    for tri in (t1, t2):
        for k in range(3):
            a, b = tri[k], tri[(k + 1) % 3]
            nx, ny = b[1] - a[1], a[0] - b[0]  # outward normal for CCW
            L = math.hypot(nx, ny)
            if L == 0.0:
                continue
            other = t2 if tri is t1 else t1
            # every vertex of the other triangle on the outer side (or on the line)
            if min(((q[0] - a[0]) * nx + (q[1] - a[1]) * ny) / L for q in other) >= -eps:
                return False
    return True


def _polygons_overlap(r1, r2) -> bool:
    tris1 = [tuple(r1[i] for i in t) for t in earclip(r1)]
    tris2 = [tuple(r2[i] for i in t) for t in earclip(r2)]
    return any(_triangles_overlap(a, b) for a in tris1 for b in tris2)


def validate_unit(unit: UnitRegion) -> list[Diagnostic]:
    diags = []
    ids = (unit.id,)
    ring = unit.polygon
    if len(ring) < 3:
        return [Diagnostic("too-few-vertices", ids, tuple(range(len(ring))), f"{len(ring)} vertices")]
    arr = np.asarray(ring, dtype=float)
    bad = [i for i, row in enumerate(arr) if not np.all(np.isfinite(row))]
    if bad:
        return [Diagnostic("non-finite", ids, tuple(bad))]
    dups = [i for i in range(len(ring)) if math.dist(ring[i], ring[(i + 1) % len(ring)]) <= EPS_GEOM]
    if dups:
        diags.append(Diagnostic("duplicate-vertex", ids, tuple(dups)))
    crossings = self_intersections(ring)
    if crossings:
        verts = sorted({v for i, j in crossings for v in (i, (i + 1) % len(ring), j, (j + 1) % len(ring))})
        diags.append(Diagnostic("self-intersection", ids, tuple(verts), f"edge pairs {crossings}"))
    area = signed_area(ring)
    if abs(area) <= EPS_GEOM * EPS_GEOM:
        diags.append(Diagnostic("zero-area", ids))
    elif area < 0:
        diags.append(Diagnostic("orientation", ids, message="ring is clockwise", auto_fixable=True))
    if unit.sweep_interval is not None:
        lo, hi = unit.sweep_interval
        if not lo < hi:
            diags.append(Diagnostic("bad-interval", ids, message=f"sweep interval [{lo}, {hi}]"))
    return diags


def validate_subdivision(s: PlanarSubdivision) -> list[Diagnostic]:
    """Every invariant violation of ``s`` as a diagnostic; empty when valid."""
    if not s.units:
        return [Diagnostic("empty-subdivision", ())]
    diags = []
    seen: dict[int, int] = {}
    for u in s.units:
        seen[u.id] = seen.get(u.id, 0) + 1
    for uid, count in seen.items():
        if count > 1:
            diags.append(Diagnostic("duplicate-id", (uid,), message=f"id used {count} times"))

    rings = {}
    for k, u in enumerate(s.units):
        unit_diags = validate_unit(u)
        diags.extend(unit_diags)
        if all(d.kind in ("orientation", "bad-interval") for d in unit_diags):
            ring = u.polygon if signed_area(u.polygon) > 0 else tuple(reversed(u.polygon))
            rings[k] = ring

    keys = sorted(rings)
    for a_pos, ka in enumerate(keys):
        ua, ra = s.units[ka], rings[ka]
        (ax0, ay0), (ax1, ay1) = np.min(ra, axis=0), np.max(ra, axis=0)
        for kb in keys[a_pos + 1 :]:
            ub, rb = s.units[kb], rings[kb]
            (bx0, by0), (bx1, by1) = np.min(rb, axis=0), np.max(rb, axis=0)
            if ax1 <= bx0 or bx1 <= ax0 or ay1 <= by0 or by1 <= ay0:
                continue
            if _polygons_overlap(ra, rb):
                diags.append(
                    Diagnostic("interior-overlap", (ua.id, ub.id), message="unit interiors intersect")
                )
    return diags


# -- scale -------------------------------------------------------------------


def derive_height(max_alt: float, terrain_alt: float, underground_pad: float = 0.0) -> float:
    """Model height: visible rock height plus padding for the buried part."""
    if not max_alt > terrain_alt:
        raise InvertedAltitudeError(
            f"maximum altitude {max_alt} m must exceed terrain altitude {terrain_alt} m"
        )
    if underground_pad < 0:
        raise ValueError(f"underground padding must be nonnegative, got {underground_pad}")
    return (max_alt - terrain_alt) + underground_pad


def bounding_box(
    plan: PlanarSubdivision,
    profile: PlanarSubdivision,
    z_clip: Optional[Sequence[float]] = None,
) -> BoundingBox:
    """Minimum box enclosing both subdivisions.

    Length spans the union of both x ranges (the views share the x axis),
    width is the plan's y extent and height the profile's z extent.  When
    ``z_clip`` is given the z extent is first intersected with it, which is
    how the footprint extrusion interval limits the model height; a clip
    that misses the profile entirely is ignored.
    """
    if plan.plane is not Plane.PLAN_XY:
        raise WrongPlaneError(f"plan subdivision lies in {plan.plane.value} plane")
    if profile.plane is not Plane.PROFILE_XZ:
        raise WrongPlaneError(f"profile subdivision lies in {profile.plane.value} plane")
    px0, px1 = plan.u_range()
    qx0, qx1 = profile.u_range()
    y0, y1 = plan.v_range()
    z0, z1 = profile.v_range()
    if z_clip is not None and min(z1, z_clip[1]) > max(z0, z_clip[0]):
        z0, z1 = max(z0, z_clip[0]), min(z1, z_clip[1])
    return BoundingBox(max(px1, qx1) - min(px0, qx0), y1 - y0, z1 - z0)
