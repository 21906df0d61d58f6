"""Ear-clipping triangulation of simple polygons."""

from __future__ import annotations

EPS = 1e-12


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _in_triangle(p, a, b, c):
    # inclusive of the boundary: a vertex touching a candidate diagonal blocks the ear
    return _cross(a, b, p) >= -EPS and _cross(b, c, p) >= -EPS and _cross(c, a, p) >= -EPS


def earclip(ring) -> list[tuple[int, int, int]]:
    """Triangulate a counterclockwise simple polygon.

    Returns ``n - 2`` index triples into ``ring``, each wound
    counterclockwise.  Collinear vertices are kept, so every ring edge is an
    edge of exactly one output triangle.
    """
    pts = [(float(u), float(v)) for u, v in ring]
    idx = list(range(len(pts)))
    out: list[tuple[int, int, int]] = []
    if len(idx) < 3:
        return out
    while len(idx) > 3:
        n = len(idx)
        best = None
        for k in range(n):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % n]
            a, b, c = pts[i0], pts[i1], pts[i2]
            if _cross(a, b, c) <= EPS:
                continue
            blocked = False
            for j in idx:
                if j in (i0, i1, i2):
                    continue
                q = pts[j]
                if q in (a, b, c):
                    continue
                if _in_triangle(q, a, b, c):
                    blocked = True
                    break
            if not blocked:
                best = k
                break
        if best is None:
            # numerically stuck: clip the fattest convex corner
            best = max(range(n), key=lambda k: _cross(pts[idx[k - 1]], pts[idx[k]], pts[idx[(k + 1) % n]]))
        out.append((idx[best - 1], idx[best], idx[(best + 1) % n]))
        del idx[best]
    out.append((idx[0], idx[1], idx[2]))
    return out
