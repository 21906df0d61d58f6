"""Geological rock-mass models from plan and profile wireframes.

Footprints (plan view, XY) and layer bands (profile view, XZ) are extruded
along z and y respectively and intersected into one watertight triangle
mesh per (rock mass, layer) pair, then placed on the globe via KML and
COLLADA.
"""

from .errors import RockModelError
from .geo_frame import GeoPoint, LocalFrame, enu_to_geodetic, geodesic_distance, geodetic_to_enu
from .kml_io import (
    KmlPlacemark,
    parse_kml,
    placemark_to_unit,
    write_collada,
    write_kml_extruded,
    write_kml_model,
)
from .mesh import TriMesh, export_obj, is_watertight, mesh_volume, point_in_mesh
from .solids import (
    ExtrudedSolid,
    GeoModel,
    Intervals,
    build_model,
    extrude,
    intersect_ortho,
    membership,
    voxel_volume,
)
from .wireframe import (
    BoundingBox,
    Location,
    PlanarSubdivision,
    Plane,
    UnitRegion,
    bounding_box,
    derive_height,
    point_in_polygon,
    polygon_area,
    validate_subdivision,
)

__version__ = "0.1.0"

__all__ = [
    "BoundingBox", "ExtrudedSolid", "GeoModel", "GeoPoint", "Intervals", "KmlPlacemark", "LocalFrame",
    "Location", "PlanarSubdivision", "Plane", "RockModelError", "TriMesh", "UnitRegion", "bounding_box",
    "build_model", "derive_height", "enu_to_geodetic", "export_obj", "extrude", "geodesic_distance",
    "geodetic_to_enu", "intersect_ortho", "is_watertight", "membership", "mesh_volume", "parse_kml",
    "placemark_to_unit", "point_in_mesh", "point_in_polygon", "polygon_area", "validate_subdivision",
    "voxel_volume", "write_collada", "write_kml_extruded", "write_kml_model",
]
