"""Extrusion of subdivision units and intersection of orthogonal prisms.

A plan unit swept along z and a profile unit swept along y intersect in

    {(x, y, z) : (x, y) in plan polygon, z in plan interval,
                 (x, z) in profile polygon, y in profile interval}.

:func:`intersect_ortho` meshes that set exactly by sweeping slabs along x.
Inside a slab both clipped polygons have cross-sections made of intervals
whose endpoints move linearly with x, so every piece of the solid is a
hexahedron with two x-faces and four planar side faces.  On each slab
boundary plane the faces contributed from the left and the right are
compared on a common y/z grid; patches covered from both sides are
interior and dropped.
"""

from __future__ import annotations

import bisect
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    EmptyIntervalError,
    GeometryWarning,
    OrthogonalityError,
    ResourceLimitError,
    SubdivisionError,
)
from .geo_frame import LocalFrame
from .mesh import TriMesh, mesh_volume
from .triangulate import earclip
from .wireframe import (
    EPS_GEOM,
    BoundingBox,
    Location,
    PlanarSubdivision,
    Plane,
    UnitRegion,
    bounding_box,
    classify_points,
    polygon_area,
    signed_area,
    validate_subdivision,
)

MAX_VOXELS = 10**8


@dataclass(frozen=True)
class ExtrudedSolid:
    """A unit polygon swept over ``interval`` along z (plan) or y (profile)."""

    base: UnitRegion
    plane: Plane
    interval: tuple

    def __post_init__(self):
        object.__setattr__(self, "plane", Plane(self.plane))
        lo, hi = (float(v) for v in self.interval)
        if not lo < hi:
            raise EmptyIntervalError(f"sweep interval [{lo}, {hi}] is empty")
        object.__setattr__(self, "interval", (lo, hi))

    def mesh(self) -> TriMesh:
        return extrude(self.base, self.plane, self.interval)


@dataclass(frozen=True)
class Cell:
    mass_id: int
    layer_id: int
    mesh: TriMesh

    @property
    def volume(self) -> float:
        return mesh_volume(self.mesh)


@dataclass(frozen=True)
class GeoModel:
    frame: LocalFrame
    cells: tuple
    box: BoundingBox

    def meshes(self) -> list[TriMesh]:
        return [c.mesh for c in self.cells]

    @property
    def layer_ids(self) -> list[int]:
        return sorted({c.layer_id for c in self.cells})


def _quad(c0, c1, c2, c3, key=None):
    """Split the quad c0-c1-c2-c3 along the diagonal through its smallest corner.

    Corners compare lexicographically, through ``key`` when given.
    """
    corners = (c0, c1, c2, c3)
    key = key or (lambda c: c)
    k = min(range(4), key=lambda i: key(corners[i]))
    a, b, c, d = corners[k:] + corners[:k]
    return [(a, b, c), (a, c, d)]


def extrude(unit: UnitRegion, plane, interval) -> TriMesh:
    """Closed prism mesh of ``unit`` swept over ``interval``.

    Vertices are the ring at both ends of the interval (``2 n`` in all);
    the caps are ear-clipped, so the side walls and caps share edges.
    """
    plane = Plane(plane)
    lo, hi = (float(v) for v in interval)
    if not lo < hi:
        raise EmptyIntervalError(f"sweep interval [{lo}, {hi}] is empty")
    ring = list(unit.polygon)
    polygon_area(ring)
    if signed_area(ring) < 0:
        ring.reverse()
    n = len(ring)
    uvs = [(u, v, lo) for u, v in ring] + [(u, v, hi) for u, v in ring]
    tris = []
    for a, b, c in earclip(ring):
        tris.append((n + a, n + b, n + c))
        tris.append((c, b, a))
    for i in range(n):
        j = (i + 1) % n
        for t in _quad(i, j, n + j, n + i, key=uvs.__getitem__):
            # _quad keeps the cyclic order, so winding is preserved
            tris.append(t)
    verts = np.array(uvs, dtype=float)
    tris = np.array(tris, dtype=np.int64)
    if plane is Plane.PROFILE_XZ:
        # (u, v, s) -> (x, y, z) = (u, s, v) is a reflection
        verts = verts[:, [0, 2, 1]]
        tris = tris[:, ::-1]
    return TriMesh(verts, tris)


# -- classification oracles ---------------------------------------------------


def _interval_codes(values, interval, eps=EPS_GEOM):
    lo, hi = interval
    values = np.asarray(values, dtype=float)
    out = np.full(values.shape, int(Location.OUTSIDE))
    out[(values > lo + eps) & (values < hi - eps)] = int(Location.INSIDE)
    out[(np.abs(values - lo) <= eps) | (np.abs(values - hi) <= eps)] = int(Location.ON_BOUNDARY)
    return out


def _combine(*codes):
    codes = np.broadcast_arrays(*codes)
    stacked = np.stack(codes)
    out = np.full(stacked.shape[1:], int(Location.INSIDE))
    out[(stacked == int(Location.ON_BOUNDARY)).any(axis=0)] = int(Location.ON_BOUNDARY)
    out[(stacked == int(Location.OUTSIDE)).any(axis=0)] = int(Location.OUTSIDE)
    return out


def classify_membership(
    plan_unit, plan_interval, profile_unit, profile_interval, points, eps: float = EPS_GEOM
) -> np.ndarray:
    """Vectorized :func:`membership` over an ``(N, 3)`` array of points.

    ``eps`` widens the boundary band, e.g. to exclude near-boundary samples.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return _combine(
        classify_points(pts[:, [0, 1]], plan_unit.polygon, eps),
        _interval_codes(pts[:, 2], plan_interval, eps),
        classify_points(pts[:, [0, 2]], profile_unit.polygon, eps),
        _interval_codes(pts[:, 1], profile_interval, eps),
    )


def membership(plan_unit, plan_interval, profile_unit, profile_interval, p) -> Location:
    """Exact classification of ``p`` against the intersection of two prisms."""
    return Location(int(classify_membership(plan_unit, plan_interval, profile_unit, profile_interval, [p])[0]))


def voxel_volume(
    plan_unit,
    plan_interval,
    profile_unit,
    profile_interval,
    resolution: float,
    max_voxels: int = MAX_VOXELS,
) -> float:
    """Brute-force volume: voxel centers classified inside, times ``resolution**3``.

    The error is bounded by roughly ``surface_area * resolution``.  Voxels
    tile the box where both prisms can overlap, anchored at its low corner.
    """
    if not resolution > 0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    px0, px1 = plan_unit.u_range()
    qx0, qx1 = profile_unit.u_range()
    py0, py1 = plan_unit.v_range()
    qz0, qz1 = profile_unit.v_range()
    lo = np.array([max(px0, qx0), max(py0, profile_interval[0]), max(qz0, plan_interval[0])])
    hi = np.array([min(px1, qx1), min(py1, profile_interval[1]), min(qz1, plan_interval[1])])
    if np.any(hi - lo <= 0):
        return 0.0
    counts = np.ceil((hi - lo) / resolution).astype(np.int64)
    total = int(np.prod(counts))
    if total > max_voxels:
        raise ResourceLimitError(f"{total} voxels at resolution {resolution} m exceed the cap of {max_voxels}")
    xs, ys, zs = (lo[k] + (np.arange(counts[k]) + 0.5) * resolution for k in range(3))

    inside = 0
    zin = _interval_codes(zs, plan_interval)
    yin = _interval_codes(ys, profile_interval)
    for x in xs:
        plan_codes = classify_points(np.column_stack([np.full_like(ys, x), ys]), plan_unit.polygon)
        prof_codes = classify_points(np.column_stack([np.full_like(zs, x), zs]), profile_unit.polygon)
        # (y, z) grid of the four component tests for this x slice
        grid = _combine(plan_codes[:, None], zin[None, :], prof_codes[None, :], yin[:, None])
        inside += int(np.count_nonzero(grid == int(Location.INSIDE)))
    return inside * resolution**3


# -- slab sweep ---------------------------------------------------------------


def _edges(ring):
    """Non-vertical edges as (x0, v0, x1, v1) with x0 < x1."""
    out = []
    n = len(ring)
    for i in range(n):
        (xa, va), (xb, vb) = ring[i], ring[(i + 1) % n]
        if abs(xb - xa) <= EPS_GEOM:
            continue
        out.append((xa, va, xb, vb) if xa < xb else (xb, vb, xa, va))
    return out


def _edge_at(edge, x):
    x0, v0, x1, v1 = edge
    t = (x - x0) / (x1 - x0)
    return v0 * (1.0 - t) + v1 * t


def _eval(fn, x):
    kind, payload = fn
    return payload if kind == "const" else _edge_at(payload, x)


def _crossings(edges, level):
    xs = []
    for e in edges:
        x0, v0, x1, v1 = e
        if (v0 - level) * (v1 - level) < 0:
            xs.append(x0 + (level - v0) * (x1 - x0) / (v1 - v0))
    return xs


def _section(edges, xm, lo, hi):
    """Clipped cross-section intervals at ``xm`` as (low fn, high fn) pairs."""
    live = [(_edge_at(e, xm), e) for e in edges if e[0] < xm < e[2]]
    live.sort(key=lambda item: item[0])
    out = []
    for k in range(0, len(live) - 1, 2):
        (va, ea), (vb, eb) = live[k], live[k + 1]
        low = ("edge", ea) if va >= lo else ("const", lo)
        high = ("edge", eb) if vb <= hi else ("const", hi)
        if min(vb, hi) - max(va, lo) > EPS_GEOM:
            out.append((low, high))
    return out


def _merge_close(values):
    out = []
    for v in sorted(values):
        if not out or v - out[-1] > EPS_GEOM:
            out.append(v)
    return out


class _Snapper:
    """Maps raw coordinates on one boundary plane to cluster representatives."""

    def __init__(self, values):
        self.map = {}
        rep = prev = None
        for v in sorted(set(values)):
            if rep is None or v - prev > EPS_GEOM:
                rep = v
            self.map[v] = rep
            prev = v
        self.grid = sorted(set(self.map.values()))

    def __call__(self, v):
        return self.map[v]

    def between(self, a, b):
        i = bisect.bisect_right(self.grid, a)
        j = bisect.bisect_left(self.grid, b)
        return self.grid[i:j]


def _zipper(chain0, chain1):
    """Triangles between two parallel point chains, each ordered by parameter."""

    def params(chain, axis):
        if len(chain) == 1:
            return [0.0]
        span = chain[-1][axis] - chain[0][axis]
        return [(p[axis] - chain[0][axis]) / span for p in chain]

    axis = 1 if (len(chain0) > 1 and chain0[0][1] != chain0[-1][1]) or (
        len(chain1) > 1 and chain1[0][1] != chain1[-1][1]
    ) else 2
    t0, t1 = params(chain0, axis), params(chain1, axis)
    i = j = 0
    tris = []
    while i < len(chain0) - 1 or j < len(chain1) - 1:
        # ties advance the far chain first: the diagonal leaves the smallest corner
        if i == len(chain0) - 1 or (j < len(chain1) - 1 and t1[j + 1] <= t0[i + 1]):
            tris.append((chain0[i], chain1[j], chain1[j + 1]))
            j += 1
        else:
            tris.append((chain0[i], chain1[j], chain0[i + 1]))
            i += 1
    return tris


class _MeshBuilder:
    def __init__(self):
        self.index = {}
        self.verts = []
        self.tris = []

    def vid(self, p):
        k = self.index.get(p)
        if k is None:
            k = self.index[p] = len(self.verts)
            self.verts.append(p)
        return k

    def add(self, a, b, c, outward):
        if a == b or b == c or a == c:
            return
        pa, pb, pc = (np.asarray(p) for p in (a, b, c))
        n = np.cross(pb - pa, pc - pa)
        if float(np.linalg.norm(n)) <= EPS_GEOM * EPS_GEOM:
            return
        if float(np.dot(n, outward)) < 0:
            b, c = c, b
        self.tris.append((self.vid(a), self.vid(b), self.vid(c)))

    def mesh(self):
        if not self.tris:
            return None
        return TriMesh(np.array(self.verts, dtype=float), np.array(self.tris, dtype=np.int64))


def _cover(grid, intervals):
    """Mask over grid cells lying inside any of the (lo, hi) intervals."""
    mask = np.zeros(max(len(grid) - 1, 0), dtype=bool)
    for lo, hi in intervals:
        if hi <= lo:
            continue
        i, j = grid.index(lo), grid.index(hi)
        mask[i:j] = True
    return mask


def intersect_ortho(A: ExtrudedSolid, B: ExtrudedSolid) -> Optional[TriMesh]:
    """Watertight mesh of the intersection of a plan prism and a profile prism.

    Returns ``None`` when the intersection has zero volume, including pure
    tangential contact.
    """
    if A.plane is B.plane:
        raise OrthogonalityError(f"both solids are swept from the {A.plane.value} plane")
    if A.plane is Plane.PROFILE_XZ:
        A, B = B, A

    plan = list(A.base.polygon)
    prof = list(B.base.polygon)
    za, ya = A.interval, B.interval
    pe, qe = _edges(plan), _edges(prof)

    x_lo = max(min(p[0] for p in plan), min(q[0] for q in prof))
    x_hi = min(max(p[0] for p in plan), max(q[0] for q in prof))
    if x_hi - x_lo <= EPS_GEOM:
        return None
    raw = [p[0] for p in plan] + [q[0] for q in prof]
    raw += _crossings(pe, ya[0]) + _crossings(pe, ya[1])
    raw += _crossings(qe, za[0]) + _crossings(qe, za[1])
    breaks = _merge_close([x_lo, x_hi] + [x for x in raw if x_lo < x < x_hi])

    slabs = []
    for xl, xr in zip(breaks, breaks[1:]):
        xm = 0.5 * (xl + xr)
        slabs.append((xl, xr, _section(pe, xm, *ya), _section(qe, xm, *za)))

    # one snapper per boundary plane, fed by the slabs on both sides
    snaps_y, snaps_z = [], []
    for k, xb in enumerate(breaks):
        yv, zv = [], []
        for s in (k - 1, k):
            if 0 <= s < len(slabs):
                _, _, sa, sb = slabs[s]
                yv += [_eval(f, xb) for iv in sa for f in iv]
                zv += [_eval(f, xb) for iv in sb for f in iv]
        snaps_y.append(_Snapper(yv))
        snaps_z.append(_Snapper(zv))

    out = _MeshBuilder()

    for k, (xl, xr, sa, sb) in enumerate(slabs):
        if not sa or not sb:
            continue
        w = xr - xl
        for low_a, high_a in sa:
            ends_a = [
                (snaps_y[k + e](_eval(low_a, x)), snaps_y[k + e](_eval(high_a, x))) for e, x in ((0, xl), (1, xr))
            ]
            for low_b, high_b in sb:
                ends_b = [
                    (snaps_z[k + e](_eval(low_b, x)), snaps_z[k + e](_eval(high_b, x))) for e, x in ((0, xl), (1, xr))
                ]
                _cell_sides(out, (xl, xr), w, k, ends_a, ends_b, snaps_y, snaps_z)

    for k, xb in enumerate(breaks):
        sy, sz = snaps_y[k], snaps_z[k]
        cover = []
        for s, e in ((k - 1, 1), (k, 0)):
            if not 0 <= s < len(slabs) or not slabs[s][2] or not slabs[s][3]:
                cover.append(np.zeros((max(len(sy.grid) - 1, 0), max(len(sz.grid) - 1, 0)), dtype=bool))
                continue
            _, _, sa, sb = slabs[s]
            my = _cover(sy.grid, [(sy(_eval(lo, xb)), sy(_eval(hi, xb))) for lo, hi in sa])
            mz = _cover(sz.grid, [(sz(_eval(lo, xb)), sz(_eval(hi, xb))) for lo, hi in sb])
            cover.append(my[:, None] & mz[None, :])
        left, right = cover
        for i, j in zip(*np.nonzero(left ^ right)):
            outward = (1.0, 0.0, 0.0) if left[i, j] else (-1.0, 0.0, 0.0)
            y0, y1 = sy.grid[i], sy.grid[i + 1]
            z0, z1 = sz.grid[j], sz.grid[j + 1]
            for t in _quad((xb, y0, z0), (xb, y1, z0), (xb, y1, z1), (xb, y0, z1)):
                out.add(*t, outward=outward)

    return out.mesh()


def _cell_sides(out, xs, w, k, ends_a, ends_b, snaps_y, snaps_z):
    """Emit the four side faces of one slab cell, subdivided at plane grids."""
    (yl0, yh0), (yl1, yh1) = ends_a
    (zl0, zh0), (zl1, zh1) = ends_b
    xl, xr = xs

    def chain_y(e, x, ylo, yhi, z):
        pts = [ylo] + snaps_y[k + e].between(ylo, yhi) + ([yhi] if yhi != ylo else [])
        return [(x, y, z) for y in pts]

    def chain_z(e, x, y, zlo, zhi):
        pts = [zlo] + snaps_z[k + e].between(zlo, zhi) + ([zhi] if zhi != zlo else [])
        return [(x, y, z) for z in pts]

    faces = [
        # z = low_b(x), outward (-z)
        (chain_y(0, xl, yl0, yh0, zl0), chain_y(1, xr, yl1, yh1, zl1), ((zl1 - zl0) / w, 0.0, -1.0)),
        (chain_y(0, xl, yl0, yh0, zh0), chain_y(1, xr, yl1, yh1, zh1), (-(zh1 - zh0) / w, 0.0, 1.0)),
        (chain_z(0, xl, yl0, zl0, zh0), chain_z(1, xr, yl1, zl1, zh1), ((yl1 - yl0) / w, -1.0, 0.0)),
        (chain_z(0, xl, yh0, zl0, zh0), chain_z(1, xr, yh1, zl1, zh1), (-(yh1 - yh0) / w, 1.0, 0.0)),
    ]
    for c0, c1, outward in faces:
        if len(c0) == 1 and len(c1) == 1:
            continue
        for t in _zipper(c0, c1):
            out.add(*t, outward=outward)


# -- model assembly -----------------------------------------------------------


@dataclass(frozen=True)
class Intervals:
    """Default sweep intervals: z range for plan units, y range for profile units."""

    plan_z: tuple
    profile_y: Optional[tuple] = None


def _checked(s: PlanarSubdivision, label: str) -> PlanarSubdivision:
    s = s.oriented()
    diags = validate_subdivision(s)
    if diags:
        raise SubdivisionError(f"{label} subdivision is invalid: " + "; ".join(str(d) for d in diags), diags)
    return s


def effective_intervals(plan: PlanarSubdivision, defaults: Intervals) -> tuple[tuple, tuple]:
    plan_z = tuple(defaults.plan_z)
    profile_y = tuple(defaults.profile_y) if defaults.profile_y is not None else plan.v_range()
    return plan_z, profile_y


def build_model(
    plan: PlanarSubdivision,
    profile: PlanarSubdivision,
    defaults: Intervals,
    frame: LocalFrame,
    n_jobs: int = 1,
) -> GeoModel:
    """Intersect every plan unit with every profile unit.

    One cell per non-empty (mass, layer) pair, sorted by ids.  ``n_jobs``
    above one evaluates pairs on a thread pool; the result does not depend
    on it.
    """
    if plan.plane is not Plane.PLAN_XY or profile.plane is not Plane.PROFILE_XZ:
        raise OrthogonalityError("build_model expects a plan (XY) and a profile (XZ) subdivision")
    plan = _checked(plan, "plan")
    profile = _checked(profile, "profile")
    plan_z, profile_y = effective_intervals(plan, defaults)

    pairs = []
    for pu in plan.units:
        for qu in profile.units:
            A = ExtrudedSolid(pu, Plane.PLAN_XY, pu.sweep_interval or plan_z)
            B = ExtrudedSolid(qu, Plane.PROFILE_XZ, qu.sweep_interval or profile_y)
            pairs.append((pu.id, qu.id, A, B))

    def run(item):
        mass_id, layer_id, A, B = item
        return mass_id, layer_id, intersect_ortho(A, B)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(run, pairs))
    else:
        results = [run(item) for item in pairs]

    cells = []
    for mass_id, layer_id, m in sorted(results, key=lambda r: (r[0], r[1])):
        if m is None:
            continue
        m.tag = (mass_id, layer_id)
        if mesh_volume(m) < 0:
            warnings.warn(f"cell {m.name} had inward winding; flipped", GeometryWarning, stacklevel=2)
            m = m.flipped()
        cells.append(Cell(mass_id, layer_id, m))

    z_used = [plan_z] + [u.sweep_interval for u in plan.units if u.sweep_interval]
    z_clip = (min(z[0] for z in z_used), max(z[1] for z in z_used))
    box = bounding_box(plan, profile, z_clip=z_clip)
    return GeoModel(frame, tuple(cells), box)
