"""KML 2.2 ingest and KML/COLLADA 1.4.1 output for Google Earth.

Only geometry is read from KML: placemark names, Point/LineString/Polygon
coordinates and altitude modes.  Styles, time spans and network links are
ignored.
"""

from __future__ import annotations

import math
import re
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Mapping, Optional

from .errors import CoordinateError, DegenerateRingError, GeometryWarning, InvalidCoordinateError, KmlError
from .errors import KmlParseError, OpenRingError, InvertedAltitudeError
from .geo_frame import GeoPoint, LocalFrame, enu_to_geodetic, geodetic_to_enu
from .wireframe import EPS_GEOM, PlanarSubdivision, Plane, UnitRegion

KML_NS = "http://www.opengis.net/kml/2.2"
COLLADA_NS = "http://www.collada.org/2005/11/COLLADASchema"

ALTITUDE_MODES = ("clampToGround", "relativeToGround", "absolute")
GEOMETRY_KINDS = ("Point", "LineString", "Polygon")

# LineString traces closing within this distance count as rings
RING_CLOSURE_TOLERANCE = 1.0

FALLBACK_COLOR = (0.5, 0.5, 0.5, 1.0)

# COLLADA requires created/modified stamps; a constant keeps exports reproducible
COLLADA_TIMESTAMP = "2000-01-01T00:00:00Z"


@dataclass(frozen=True)
class KmlPlacemark:
    name: str
    kind: str
    coords: tuple
    altitude_mode: str = "clampToGround"

    def __post_init__(self):
        if self.kind not in GEOMETRY_KINDS:
            raise KmlError(f"unsupported geometry kind {self.kind!r}")
        if not self.coords:
            raise KmlError(f"placemark {self.name!r} has no coordinates")
        if self.kind == "Polygon" and self.coords[0] != self.coords[-1]:
            raise KmlError(f"polygon placemark {self.name!r} ring is not closed")


# -- reading ------------------------------------------------------------------


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _child(el, name):
    for c in el:
        if _local(c.tag) == name:
            return c
    return None


def _find(el, path):
    for name in path.split("/"):
        if el is None:
            return None
        el = _child(el, name)
    return el


def _text(el, default=""):
    return el.text.strip() if el is not None and el.text else default


def parse_coordinates(text: str, placemark: str = "") -> list[GeoPoint]:
    """Whitespace-separated ``lon,lat[,alt]`` tuples; missing altitude is 0."""
    out = []
    for token in text.split():
        parts = token.split(",")
        if len(parts) not in (2, 3):
            raise CoordinateError(f"placemark {placemark!r}: bad coordinate tuple {token!r}")
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise CoordinateError(f"placemark {placemark!r}: non-numeric coordinate {token!r}") from None
        lon, lat = values[0], values[1]
        alt = values[2] if len(values) == 3 else 0.0
        try:
            out.append(GeoPoint(lat, lon, alt))
        except InvalidCoordinateError as exc:
            raise CoordinateError(f"placemark {placemark!r}: {exc}") from None
    return out


def _geometries(el):
    """Yield (kind, coordinates text, altitude mode) for a geometry element."""
    kind = _local(el.tag)
    mode = _text(_child(el, "altitudeMode"), "clampToGround")
    if kind in ("Point", "LineString"):
        yield kind, _text(_child(el, "coordinates")), mode
    elif kind == "LinearRing":
        yield "Polygon", _text(_child(el, "coordinates")), mode
    elif kind == "Polygon":
        ring = _find(el, "outerBoundaryIs/LinearRing/coordinates")
        yield "Polygon", _text(ring), mode
    elif kind == "Model":
        loc = _child(el, "Location")
        if loc is not None:
            lon = _text(_child(loc, "longitude"), "0")
            lat = _text(_child(loc, "latitude"), "0")
            alt = _text(_child(loc, "altitude"), "0")
            yield "Point", f"{lon},{lat},{alt}", mode
    elif kind == "MultiGeometry":
        for c in el:
            yield from _geometries(c)


def _walk(el, out):
    for c in el:
        name = _local(c.tag)
        if name == "Placemark":
            pname = _text(_child(c, "name"))
            for g in c:
                for kind, text, mode in _geometries(g):
                    coords = parse_coordinates(text, pname)
                    if not coords:
                        continue
                    if kind == "Polygon" and coords[0] != coords[-1]:
                        coords.append(coords[0])
                    if mode not in ALTITUDE_MODES:
                        mode = "clampToGround"
                    out.append(KmlPlacemark(pname, kind, tuple(coords), mode))
        elif name in ("kml", "Document", "Folder"):
            _walk(c, out)


def parse_kml(doc: str) -> list[KmlPlacemark]:
    """Every placemark geometry in ``doc``, folders flattened depth-first."""
    if not doc.strip():
        return []
    try:
        root = ET.fromstring(doc)
    except ET.ParseError as exc:
        line = exc.position[0] if getattr(exc, "position", None) else None
        raise KmlParseError(f"malformed KML: {exc}", line=line) from None
    out: list[KmlPlacemark] = []
    wrapper = ET.Element("wrapper")
    wrapper.append(root)
    _walk(wrapper, out)
    return out


_LEADING_ID = re.compile(r"^\s*(\d+)\b[\s:.\-]*(.*)$")


def split_unit_name(name: str) -> tuple[Optional[int], str]:
    """Split ``"3 Septentrional"`` into ``(3, "Septentrional")``."""
    m = _LEADING_ID.match(name or "")
    if not m:
        return None, (name or "").strip()
    return int(m.group(1)), m.group(2).strip() or name.strip()


def placemark_to_unit(
    p: KmlPlacemark,
    frame: LocalFrame,
    plane,
    unit_id: Optional[int] = None,
    sweep_interval=None,
) -> UnitRegion:
    """Project a traced ring into plan (east, north) or profile (east, up) meters.

    The unit id comes from ``unit_id`` or else a leading integer in the
    placemark name.  Clockwise rings are reversed with a warning.
    """
    plane = Plane(plane)
    if p.kind == "Point":
        raise DegenerateRingError(f"placemark {p.name!r} is a Point, not a ring")
    enu = [geodetic_to_enu(g, frame) for g in p.coords]
    distinct = []
    for q in enu:
        if all(math.dist(q, d) > EPS_GEOM for d in distinct):
            distinct.append(q)
    if len(distinct) < 3:
        raise DegenerateRingError(f"placemark {p.name!r} has {len(distinct)} distinct vertices, need 3")
    if p.kind == "LineString":
        gap = math.dist(enu[0], enu[-1])
        if gap > RING_CLOSURE_TOLERANCE:
            raise OpenRingError(f"path {p.name!r} does not close: ends are {gap:.2f} m apart")
    if len(enu) > 1 and math.dist(enu[0], enu[-1]) <= RING_CLOSURE_TOLERANCE:
        enu = enu[:-1]
    axes = (0, 1) if plane is Plane.PLAN_XY else (0, 2)
    ring = []
    for q in enu:
        pt = (q[axes[0]], q[axes[1]])
        if not ring or math.dist(pt, ring[-1]) > EPS_GEOM:
            ring.append(pt)
    while len(ring) > 1 and math.dist(ring[0], ring[-1]) <= EPS_GEOM:
        ring.pop()
    if len(ring) < 3:
        raise DegenerateRingError(f"placemark {p.name!r} has {len(ring)} distinct vertices, need 3")
    parsed_id, name = split_unit_name(p.name)
    uid = unit_id if unit_id is not None else parsed_id
    if uid is None:
        raise KmlError(f"placemark {p.name!r} has no unit id; name it like '1 Markenfels'")
    return UnitRegion(uid, name, tuple(ring), sweep_interval).oriented()


def subdivision_from_kml(doc: str, frame: LocalFrame, plane) -> PlanarSubdivision:
    """Units for every ring placemark; unnamed ones are numbered in document order."""
    units = []
    next_id = 1
    for p in parse_kml(doc):
        if p.kind == "Point":
            continue
        parsed, _ = split_unit_name(p.name)
        uid = parsed if parsed is not None else next_id
        next_id = max(next_id, uid) + 1
        units.append(placemark_to_unit(p, frame, plane, unit_id=uid))
    return PlanarSubdivision(Plane(plane), tuple(units))


# -- writing ------------------------------------------------------------------


def _deg(v: float) -> str:
    return f"{v:.10f}"


def _m(v: float) -> str:
    return f"{v:.6f}"


def _sub(parent, tag, text=None, **attrib):
    el = ET.SubElement(parent, tag, {k.rstrip("_"): str(v) for k, v in attrib.items()})
    if text is not None:
        el.text = str(text)
    return el


def _serialize(root) -> str:
    ET.indent(root, space="  ")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def _kml_root(name: str):
    ET.register_namespace("", KML_NS)
    root = ET.Element(f"{{{KML_NS}}}kml")
    doc = _sub(root, f"{{{KML_NS}}}Document")
    _sub(doc, f"{{{KML_NS}}}name", name)
    return root, doc


def write_kml_model(model, collada_href: str) -> str:
    """KML placing the COLLADA file at the model frame origin."""
    k = lambda t: f"{{{KML_NS}}}{t}"  # noqa: E731
    if not model.cells:
        warnings.warn("model has no cells; writing an empty model reference", GeometryWarning, stacklevel=2)
        collada_href = ""
    root, doc = _kml_root("rockmodel")
    pm = _sub(doc, k("Placemark"))
    _sub(pm, k("name"), "geological model")
    mdl = _sub(pm, k("Model"), id="model")
    _sub(mdl, k("altitudeMode"), "absolute")
    loc = _sub(mdl, k("Location"))
    o = model.frame.origin
    _sub(loc, k("longitude"), _deg(o.lon))
    _sub(loc, k("latitude"), _deg(o.lat))
    _sub(loc, k("altitude"), _m(o.alt))
    ori = _sub(mdl, k("Orientation"))
    for t in ("heading", "tilt", "roll"):
        _sub(ori, k(t), "0")
    sc = _sub(mdl, k("Scale"))
    for t in ("x", "y", "z"):
        _sub(sc, k(t), "1")
    link = _sub(mdl, k("Link"))
    _sub(link, k("href"), collada_href)
    return _serialize(root)


def write_kml_extruded(plan: PlanarSubdivision, frame: LocalFrame, base_alt: float, top_alt: float) -> str:
    """Footprints as extruded KML polygons at ``top_alt``; Google Earth drops the walls."""
    if not base_alt < top_alt:
        raise InvertedAltitudeError(f"base altitude {base_alt} m must be below top altitude {top_alt} m")
    if plan.plane is not Plane.PLAN_XY:
        raise KmlError("extruded KML needs a plan subdivision")
    k = lambda t: f"{{{KML_NS}}}{t}"  # noqa: E731
    root, doc = _kml_root("rockmodel footprint extrusion")
    for unit in plan.units:
        pm = _sub(doc, k("Placemark"))
        _sub(pm, k("name"), f"{unit.id} {unit.name}".strip())
        _sub(pm, k("description"), f"extruded {base_alt:g} m to {top_alt:g} m")
        poly = _sub(pm, k("Polygon"))
        _sub(poly, k("extrude"), "1")
        _sub(poly, k("altitudeMode"), "absolute")
        ring = _sub(_sub(poly, k("outerBoundaryIs")), k("LinearRing"))
        pts = list(unit.polygon) + [unit.polygon[0]]
        tuples = []
        for u, v in pts:
            g = enu_to_geodetic((u, v, 0.0), frame)
            tuples.append(f"{_deg(g.lon)},{_deg(g.lat)},{_m(top_alt)}")
        _sub(ring, k("coordinates"), " ".join(tuples))
    return _serialize(root)


def _rgba(color) -> tuple:
    values = tuple(float(c) for c in color)
    if len(values) == 3:
        values += (1.0,)
    if len(values) != 4:
        raise ValueError(f"color needs 3 or 4 components, got {color!r}")
    if any(v > 1.0 for v in values):
        values = tuple(v / 255.0 for v in values)
    return values


def write_collada(model, palette: Optional[Mapping[int, tuple]] = None) -> str:
    """COLLADA 1.4.1 document with one geometry per model cell.

    Vertex positions are local ENU meters (Z up).  Each layer gets one
    material colored from ``palette``; layers missing from it fall back to
    gray with a warning.
    """
    palette = dict(palette or {})
    c = lambda t: f"{{{COLLADA_NS}}}{t}"  # noqa: E731
    ET.register_namespace("", COLLADA_NS)
    root = ET.Element(c("COLLADA"), {"version": "1.4.1"})
    asset = _sub(root, c("asset"))
    contrib = _sub(asset, c("contributor"))
    _sub(contrib, c("authoring_tool"), "rockmodel")
    _sub(asset, c("created"), COLLADA_TIMESTAMP)
    _sub(asset, c("modified"), COLLADA_TIMESTAMP)
    _sub(asset, c("unit"), name="meter", meter="1")
    _sub(asset, c("up_axis"), "Z_UP")

    layers = sorted({cell.layer_id for cell in model.cells})
    effects = _sub(root, c("library_effects"))
    materials = _sub(root, c("library_materials"))
    for layer in layers:
        if layer in palette:
            rgba = _rgba(palette[layer])
        else:
            warnings.warn(f"no palette color for layer {layer}; using gray", GeometryWarning, stacklevel=2)
            rgba = FALLBACK_COLOR
        eff = _sub(effects, c("effect"), id=f"layer{layer}-effect")
        tech = _sub(_sub(eff, c("profile_COMMON")), c("technique"), sid="common")
        lambert = _sub(tech, c("lambert"))
        _sub(_sub(lambert, c("diffuse")), c("color"), " ".join(f"{v:.6g}" for v in rgba))
        mat = _sub(materials, c("material"), id=f"layer{layer}-material", name=f"layer{layer}")
        _sub(mat, c("instance_effect"), url=f"#layer{layer}-effect")

    geoms = _sub(root, c("library_geometries"))
    scenes = _sub(root, c("library_visual_scenes"))
    scene = _sub(scenes, c("visual_scene"), id="scene", name="scene")
    for cell in model.cells:
        m = cell.mesh
        gid = f"mass{cell.mass_id}_layer{cell.layer_id}"
        geom = _sub(geoms, c("geometry"), id=gid, name=gid)
        mesh = _sub(geom, c("mesh"))
        src = _sub(mesh, c("source"), id=f"{gid}-positions")
        n = len(m.vertices)
        _sub(
            src,
            c("float_array"),
            " ".join(_m(v) for v in m.vertices.ravel().tolist()),
            id=f"{gid}-positions-array",
            count=3 * n,
        )
        acc = _sub(
            _sub(src, c("technique_common")),
            c("accessor"),
            source=f"#{gid}-positions-array",
            count=n,
            stride=3,
        )
        for axis in "XYZ":
            _sub(acc, c("param"), name=axis, type="float")
        verts = _sub(mesh, c("vertices"), id=f"{gid}-vertices")
        _sub(verts, c("input"), semantic="POSITION", source=f"#{gid}-positions")
        tris = _sub(mesh, c("triangles"), count=len(m.triangles), material=f"layer{cell.layer_id}-material")
        _sub(tris, c("input"), semantic="VERTEX", source=f"#{gid}-vertices", offset=0)
        _sub(tris, c("p"), " ".join(str(i) for i in m.triangles.ravel().tolist()))

        node = _sub(scene, c("node"), id=f"{gid}-node", name=gid)
        inst = _sub(node, c("instance_geometry"), url=f"#{gid}")
        tc = _sub(_sub(inst, c("bind_material")), c("technique_common"))
        _sub(
            tc,
            c("instance_material"),
            symbol=f"layer{cell.layer_id}-material",
            target=f"#layer{cell.layer_id}-material",
        )
    _sub(_sub(root, c("scene")), c("instance_visual_scene"), url="#scene")
    # the schema requires at least one entry per library
    for lib in (effects, materials, geoms):
        if not len(lib):
            root.remove(lib)
    return _serialize(root)
