"""Bundled Haut-Barr sample: footprints, layer profile and project template.

Polygons are approximate digitizations in local meters.  Their shapes are
not survey data; only their overall extents are fixed, to a 255 m x 70 m
footprint and a 50 m profile between 420 m and 470 m altitude.  The frame
origin is illustrative, not a surveyed position.
"""

from __future__ import annotations

from .geo_frame import GeoPoint, LocalFrame, enu_to_geodetic
from .wireframe import PlanarSubdivision, Plane, UnitRegion

# illustrative, not a surveyed position
ORIGIN = GeoPoint(48.7296, 7.3517, 0.0)

MAX_ALT = 470.0
TERRAIN_ALT = 425.0
UNDERGROUND_PAD = 5.0

PLAN_UNITS = (
    UnitRegion(1, "Markenfels", ((0, 20), (60, 20), (60, 40), (50, 60), (20, 66), (2, 48))),
    UnitRegion(2, "Median Rock", ((95, 20), (165, 20), (165, 45), (150, 70), (110, 66), (95, 40))),
    UnitRegion(3, "Septentrional Rock", ((195, 20), (255, 20), (252, 50), (230, 62), (205, 55), (195, 45))),
    UnitRegion(
        4,
        "base rock bar",
        (
            (2, 8), (80, 0), (180, 3), (254, 9), (255, 20), (195, 20), (195, 45),
            (165, 45), (165, 20), (95, 20), (95, 40), (60, 40), (60, 20), (0, 20),
        ),
    ),
)

# outline of the union of the plan units
PLAN_OUTLINE = (
    (2, 8), (80, 0), (180, 3), (254, 9), (255, 20), (252, 50), (230, 62), (205, 55),
    (195, 45), (165, 45), (150, 70), (110, 66), (95, 40), (60, 40), (50, 60), (20, 66),
    (2, 48), (0, 20),
)

# east, altitude
PROFILE_UNITS = (
    UnitRegion(1, "lower layer", ((0, 420), (255, 420), (255, 432), (0, 436))),
    UnitRegion(2, "middle layer", ((0, 436), (255, 432), (255, 446), (0, 450))),
    UnitRegion(
        3,
        "upper layer",
        (
            (0, 450), (255, 446), (255, 460), (200, 460), (193, 455), (167, 455), (160, 470),
            (100, 470), (93, 455), (62, 455), (55, 465), (10, 465), (0, 458),
        ),
    ),
)

PROFILE_OUTLINE = (
    (0, 420), (255, 420), (255, 460), (200, 460), (193, 455), (167, 455), (160, 470),
    (100, 470), (93, 455), (62, 455), (55, 465), (10, 465), (0, 458),
)

PALETTE = {1: (150, 75, 40, 255), 2: (196, 120, 80, 255), 3: (226, 170, 130, 255)}


def frame() -> LocalFrame:
    return LocalFrame(ORIGIN)


def plan() -> PlanarSubdivision:
    return PlanarSubdivision(Plane.PLAN_XY, PLAN_UNITS)


def profile() -> PlanarSubdivision:
    return PlanarSubdivision(Plane.PROFILE_XZ, PROFILE_UNITS)


def _kml(placemarks: list[str], name: str) -> str:
    body = "\n".join(placemarks)
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<kml xmlns="http://www.opengis.net/kml/2.2">\n'
        f"<Document>\n  <name>{name}</name>\n{body}\n</Document>\n</kml>\n"
    )


def plan_kml() -> str:
    """Footprints as closed ground-clamped polygons, as traced in a top view."""
    f = frame()
    marks = []
    for u in PLAN_UNITS:
        pts = [enu_to_geodetic((x, y, 0.0), f) for x, y in u.polygon]
        pts.append(pts[0])
        coords = " ".join(f"{g.lon:.10f},{g.lat:.10f},0" for g in pts)
        marks.append(
            f"  <Placemark>\n    <name>{u.id} {u.name}</name>\n    <Polygon>\n"
            f"      <altitudeMode>clampToGround</altitudeMode>\n"
            f"      <outerBoundaryIs><LinearRing><coordinates>{coords}</coordinates></LinearRing></outerBoundaryIs>\n"
            f"    </Polygon>\n  </Placemark>"
        )
    return _kml(marks, "Haut-Barr footprints")


def profile_kml() -> str:
    """Layer bands as closed vertical paths along the frame's east axis."""
    f = frame()
    marks = []
    for u in PROFILE_UNITS:
        pts = [enu_to_geodetic((x, 0.0, z), f) for x, z in u.polygon]
        pts.append(pts[0])
        coords = " ".join(f"{g.lon:.10f},{g.lat:.10f},{g.alt:.6f}" for g in pts)
        marks.append(
            f"  <Placemark>\n    <name>{u.id} {u.name}</name>\n    <LineString>\n"
            f"      <altitudeMode>absolute</altitudeMode>\n"
            f"      <coordinates>{coords}</coordinates>\n"
            f"    </LineString>\n  </Placemark>"
        )
    return _kml(marks, "Haut-Barr layer profile")


def _ring_toml(ring) -> str:
    return "[" + ", ".join(f"[{u:.1f}, {v:.1f}]" for u, v in ring) + "]"


def project_toml() -> str:
    units = []
    for u in PROFILE_UNITS:
        units.append(
            "[[profile.units]]\n"
            f"id = {u.id}\n"
            f'name = "{u.name}"\n'
            f"ring = {_ring_toml(u.polygon)}\n"
        )
    palette = "\n".join(f'"{k}" = [{", ".join(str(c) for c in v)}]' for k, v in PALETTE.items())
    return f"""\
# rockmodel project: Haut-Barr rock masses.
# Lengths are meters. Altitudes are heights above the WGS84 ellipsoid.
# Relative paths resolve against this file's directory.

[site]
name = "Haut-Barr"
# Frame origin: illustrative, not from a survey.
origin = {{ lat = {ORIGIN.lat}, lon = {ORIGIN.lon}, alt = {ORIGIN.alt} }}

[altitudes]
max_alt = {MAX_ALT}          # highest rock top read off the globe
terrain_alt = {TERRAIN_ALT}      # mean terrain altitude around the rocks
underground_pad = {UNDERGROUND_PAD}   # extra depth for the buried part

[plan]
# Footprints traced in the top view, one closed path or polygon per rock
# mass, named "<id> <name>".
source = "plan.kml"

[profile]
# Layer bands seen from the south, as (east, altitude) rings in meters.
# Set source = "profile.kml" to read vertical traced paths instead.
source = "inline"
x_offset = 0.0   # shift of the profile along the shared east axis

{chr(10).join(units)}
[intervals]
# plan_z = [420.0, 470.0]   # default: [terrain_alt - underground_pad, max_alt]
# profile_y = [0.0, 70.0]   # default: north extent of the footprints

[palette]
# layer id = [r, g, b, a], 0-255
{palette}

[output]
dir = "build"
"""
