"""Triangle mesh kernel: integrity checks, measures, containment, OBJ export."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import OpenMeshError
from .wireframe import EPS_GEOM, Location


@dataclass(eq=False)
class TriMesh:
    """Indexed triangle mesh in local frame meters.

    ``triangles`` are wound so that normals (right-hand rule) point out of
    the enclosed volume.  ``tag`` is the ``(mass_id, layer_id)`` a model
    cell belongs to, if any.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    tag: Optional[tuple] = None

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if self.triangles.size and (self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices)):
            raise IndexError("triangle index out of range")

    @property
    def name(self) -> str:
        if self.tag is None:
            return "mesh"
        return f"mass{self.tag[0]}_layer{self.tag[1]}"

    def flipped(self) -> "TriMesh":
        return TriMesh(self.vertices.copy(), self.triangles[:, ::-1].copy(), self.tag)

    def translated(self, offset) -> "TriMesh":
        return TriMesh(self.vertices + np.asarray(offset, dtype=float), self.triangles.copy(), self.tag)

    def scaled(self, k: float) -> "TriMesh":
        return TriMesh(self.vertices * k, self.triangles.copy(), self.tag)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def triangle_areas(self) -> np.ndarray:
        a, b, c = (self.vertices[self.triangles[:, k]] for k in range(3))
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)


@dataclass
class WatertightCheck:
    boundary_edges: list = field(default_factory=list)
    misoriented_edges: list = field(default_factory=list)
    nonmanifold_edges: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.boundary_edges or self.misoriented_edges or self.nonmanifold_edges)

    def __bool__(self):
        return self.ok

    def diagnostics(self) -> list[str]:
        out = [f"boundary edge {e}" for e in self.boundary_edges]
        out += [f"inconsistent orientation at edge {e}" for e in self.misoriented_edges]
        out += [f"edge {e} shared by more than two triangles" for e in self.nonmanifold_edges]
        return out


def is_watertight(m: TriMesh) -> WatertightCheck:
    """Check that every edge joins exactly two oppositely directed triangles.

    The result is truthy when the mesh is closed and consistently oriented;
    its lists name the offending undirected edges otherwise.
    """
    directed = Counter()
    for a, b, c in m.triangles.tolist():
        directed[(a, b)] += 1
        directed[(b, c)] += 1
        directed[(c, a)] += 1
    check = WatertightCheck()
    for edge in sorted({tuple(sorted(e)) for e in directed}):
        a, b = edge
        fwd, bwd = directed.get((a, b), 0), directed.get((b, a), 0)
        if fwd == 1 and bwd == 1:
            continue
        if fwd + bwd == 1:
            check.boundary_edges.append(edge)
        elif fwd + bwd == 2:
            check.misoriented_edges.append(edge)
        else:
            check.nonmanifold_edges.append(edge)
    return check


def _require_closed(m: TriMesh):
    check = is_watertight(m)
    if not check.ok:
        shown = "; ".join(check.diagnostics()[:5])
        raise OpenMeshError(f"mesh {m.name} is not watertight: {shown}")


def mesh_volume(m: TriMesh, check: bool = True) -> float:
    """Enclosed volume as the sum of signed tetrahedra against the centroid."""
    if check:
        _require_closed(m)
    if not len(m.triangles):
        return 0.0
    v = m.vertices - m.vertices.mean(axis=0)
    a, b, c = (v[m.triangles[:, k]] for k in range(3))
    return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)


def surface_area(m: TriMesh) -> float:
    return float(m.triangle_areas().sum())


def _on_surface(points, a, b, c, eps):
    """Boolean (P,) mask of points within ``eps`` of any triangle."""
    ab, ac = b - a, c - a
    n = np.cross(ab, ac)
    nn = np.linalg.norm(n, axis=1)
    nn = np.where(nn > 0, nn, 1.0)
    nhat = n / nn[:, None]
    out = np.zeros(len(points), dtype=bool)
    for start in range(0, len(points), 2048):
        p = points[start : start + 2048, None, :]
        d_plane = np.einsum("ptk,tk->pt", p - a[None], nhat)
        q = p - d_plane[..., None] * nhat[None]
        inside = np.ones(d_plane.shape, dtype=bool)
        for u, w in ((a, b), (b, c), (c, a)):
            inside &= np.einsum("ptk,tk->pt", np.cross(w - u, q - u[None]), nhat) >= 0
        near = inside & (np.abs(d_plane) <= eps)
        for u, w in ((a, b), (b, c), (c, a)):
            e = w - u
            L2 = np.einsum("tk,tk->t", e, e)
            L2 = np.where(L2 > 0, L2, 1.0)
            t = np.clip(np.einsum("ptk,tk->pt", p - u[None], e) / L2, 0.0, 1.0)
            diff = p - u[None] - t[..., None] * e[None]
            near |= np.einsum("ptk,ptk->pt", diff, diff) <= eps * eps
        out[start : start + 2048] = near.any(axis=1)
    return out


def _cast(points, direction, a, b, c, tol):
    """Crossing parity along ``direction`` and a mask of ambiguous rays."""
    e1, e2 = b - a, c - a
    pvec = np.cross(direction, e2)
    det = np.einsum("tk,tk->t", e1, pvec)
    scale = np.linalg.norm(e1, axis=1) * np.linalg.norm(e2, axis=1)
    usable = np.abs(det) > 1e-12 * np.where(scale > 0, scale, 1.0)
    inv = np.where(usable, 1.0 / np.where(usable, det, 1.0), 0.0)
    qvec_e1 = e1
    parity = np.zeros(len(points), dtype=bool)
    ambiguous = np.zeros(len(points), dtype=bool)
    for start in range(0, len(points), 2048):
        p = points[start : start + 2048, None, :]
        s = p - a[None]
        u = np.einsum("ptk,tk->pt", s, pvec) * inv
        q = np.cross(s, qvec_e1[None])
        v = np.einsum("k,ptk->pt", direction, q) * inv
        t = np.einsum("tk,ptk->pt", e2, q) * inv
        w = 1.0 - u - v
        hit = usable[None] & (u >= -tol) & (v >= -tol) & (w >= -tol) & (t > 0)
        clean = (u > tol) & (v > tol) & (w > tol)
        ambiguous[start : start + 2048] = (hit & ~clean).any(axis=1)
        parity[start : start + 2048] = (hit & clean).sum(axis=1) % 2 == 1
    return parity, ambiguous


def classify_points_mesh(
    m: TriMesh,
    points,
    rng: Optional[np.random.Generator] = None,
    eps: float = EPS_GEOM,
    max_tries: int = 16,
) -> np.ndarray:
    """Vectorized :func:`point_in_mesh`; returns an array of Location codes.

    Each point first gets a distance test against the surface; the rest are
    classified by crossing parity along a random ray, redrawing the ray for
    points whose ray grazes an edge or vertex.
    """
    _require_closed(m)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    rng = np.random.default_rng(0) if rng is None else rng
    out = np.full(len(pts), int(Location.OUTSIDE))
    if not len(m.triangles) or not len(pts):
        return out

    # work relative to the mesh center to keep the ray arithmetic well conditioned
    center = m.vertices.mean(axis=0)
    v = m.vertices - center
    pts = pts - center
    a, b, c = (v[m.triangles[:, k]] for k in range(3))
    lo, hi = v.min(axis=0) - eps, v.max(axis=0) + eps
    in_box = np.all((pts >= lo) & (pts <= hi), axis=1)
    todo = np.flatnonzero(in_box)
    if not len(todo):
        return out

    on = _on_surface(pts[todo], a, b, c, eps)
    out[todo[on]] = int(Location.ON_BOUNDARY)
    todo = todo[~on]
    for _ in range(max_tries):
        if not len(todo):
            break
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        parity, ambiguous = _cast(pts[todo], d, a, b, c, tol=1e-10)
        settled = todo[~ambiguous]
        out[settled] = np.where(parity[~ambiguous], int(Location.INSIDE), int(Location.OUTSIDE))
        todo = todo[ambiguous]
    if len(todo):
        # every ray grazed an edge; such points sit on the surface to within rounding
        out[todo] = int(Location.ON_BOUNDARY)
    return out


def point_in_mesh(m: TriMesh, p, rng: Optional[np.random.Generator] = None) -> Location:
    return Location(int(classify_points_mesh(m, [p], rng=rng)[0]))


def export_obj(meshes: Iterable[TriMesh]) -> str:
    """Wavefront OBJ text, one ``o`` object per mesh, indices cumulative."""
    lines = ["# rockmodel OBJ export", "# units: meters, local east-north-up frame"]
    offset = 1
    for k, m in enumerate(meshes):
        name = m.name if m.tag is not None else f"mesh{k}"
        lines.append(f"o {name}")
        for x, y, z in m.vertices.tolist():
            lines.append(f"v {x:.17g} {y:.17g} {z:.17g}")
        for a, b, c in (m.triangles + offset).tolist():
            lines.append(f"f {a} {b} {c}")
        offset += len(m.vertices)
    return "\n".join(lines) + "\n"
