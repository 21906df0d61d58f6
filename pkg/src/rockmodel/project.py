"""Project files: the TOML description of one modeling run."""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ProjectError
from .geo_frame import GeoPoint, LocalFrame
from .kml_io import subdivision_from_kml
from .wireframe import PlanarSubdivision, Plane, UnitRegion, derive_height

OUTPUT_DIR_ENV = "ROCKMODEL_OUTPUT_DIR"

_SCHEMA = {
    "site": {"name", "origin"},
    "altitudes": {"max_alt", "terrain_alt", "underground_pad"},
    "plan": {"source", "units"},
    "profile": {"source", "units", "x_offset"},
    "intervals": {"plan_z", "profile_y"},
    "palette": None,
    "output": {"dir"},
}
_UNIT_KEYS = {"id", "name", "ring", "sweep_interval"}


@dataclass
class Project:
    path: Path
    name: str
    frame_origin: GeoPoint
    max_alt: float
    terrain_alt: float
    underground_pad: float
    plan_source: str
    profile_source: str
    plan_units: tuple = ()
    profile_units: tuple = ()
    profile_x_offset: float = 0.0
    plan_z: Optional[tuple] = None
    profile_y: Optional[tuple] = None
    palette: dict = field(default_factory=dict)
    output: str = "build"

    @property
    def root(self) -> Path:
        return self.path.parent

    @property
    def frame(self) -> LocalFrame:
        return LocalFrame(self.frame_origin)

    @property
    def output_dir(self) -> Path:
        override = os.environ.get(OUTPUT_DIR_ENV)
        return self.root / (override if override else self.output)

    @property
    def height(self) -> float:
        return derive_height(self.max_alt, self.terrain_alt, self.underground_pad)

    def default_plan_z(self) -> tuple[float, float]:
        """Plan sweep interval in local up meters: padded terrain to rock top."""
        if self.plan_z is not None:
            return self.plan_z
        self.height  # validates the altitude triple
        base = self.frame_origin.alt
        return (self.terrain_alt - self.underground_pad - base, self.max_alt - base)

    def _subdivision(self, source: str, units: tuple, plane: Plane) -> PlanarSubdivision:
        if source == "inline":
            if not units:
                raise ProjectError(f"{plane.value} source is inline but no units are given")
            return PlanarSubdivision(plane, units).oriented()
        path = self.root / source
        if not path.is_file():
            raise ProjectError(f"{plane.value} source {path} does not exist")
        return subdivision_from_kml(path.read_text(encoding="utf-8"), self.frame, plane)

    def load_plan(self) -> PlanarSubdivision:
        return self._subdivision(self.plan_source, self.plan_units, Plane.PLAN_XY)

    def load_profile(self) -> PlanarSubdivision:
        s = self._subdivision(self.profile_source, self.profile_units, Plane.PROFILE_XZ)
        return s.shifted(self.profile_x_offset)


def _number(table, key, where, default=None):
    if key not in table:
        if default is None:
            raise ProjectError(f"missing {where}.{key}")
        return default
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProjectError(f"{where}.{key} must be a number, got {value!r}")
    return float(value)


def _pair(value, where):
    if value is None:
        return None
    if not (isinstance(value, list) and len(value) == 2):
        raise ProjectError(f"{where} must be a [low, high] pair")
    lo, hi = (float(v) for v in value)
    if not lo < hi:
        raise ProjectError(f"{where} [{lo}, {hi}] is empty")
    return (lo, hi)


def _units(entries, where):
    out = []
    for k, entry in enumerate(entries or ()):
        extra = set(entry) - _UNIT_KEYS
        if extra:
            raise ProjectError(f"unknown key(s) {sorted(extra)} in {where}.units[{k}]")
        if "id" not in entry or "ring" not in entry:
            raise ProjectError(f"{where}.units[{k}] needs id and ring")
        interval = _pair(entry.get("sweep_interval"), f"{where}.units[{k}].sweep_interval")
        out.append(UnitRegion(int(entry["id"]), str(entry.get("name", "")), tuple(map(tuple, entry["ring"])), interval))
    return tuple(out)


def load_project(path) -> Project:
    """Parse and check a project file; unknown keys are errors."""
    path = Path(path)
    if not path.is_file():
        raise ProjectError(f"project file {path} not found (create one with `rockmodel init`)")
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ProjectError(f"{path}: {exc}") from None

    for section, value in data.items():
        if section not in _SCHEMA:
            raise ProjectError(f"unknown section [{section}] in {path}")
        allowed = _SCHEMA[section]
        if allowed is not None:
            extra = set(value) - allowed
            if extra:
                raise ProjectError(f"unknown key(s) {sorted(extra)} in [{section}]")

    site = data.get("site", {})
    if "origin" not in site:
        raise ProjectError("missing site.origin")
    origin = site["origin"]
    extra = set(origin) - {"lat", "lon", "alt"}
    if extra:
        raise ProjectError(f"unknown key(s) {sorted(extra)} in site.origin")
    try:
        frame_origin = GeoPoint(
            _number(origin, "lat", "site.origin"),
            _number(origin, "lon", "site.origin"),
            _number(origin, "alt", "site.origin", 0.0),
        )
    except ValueError as exc:
        raise ProjectError(f"site.origin: {exc}") from None

    alts = data.get("altitudes", {})
    plan = data.get("plan", {})
    profile = data.get("profile", {})
    intervals = data.get("intervals", {})

    palette = {}
    for key, color in data.get("palette", {}).items():
        try:
            layer = int(key)
        except ValueError:
            raise ProjectError(f"palette key {key!r} is not a layer id") from None
        if not (isinstance(color, list) and len(color) in (3, 4)):
            raise ProjectError(f"palette entry {key} must be [r, g, b] or [r, g, b, a]")
        palette[layer] = tuple(color)

    project = Project(
        path=path.resolve(),
        name=str(site.get("name", path.stem)),
        frame_origin=frame_origin,
        max_alt=_number(alts, "max_alt", "altitudes"),
        terrain_alt=_number(alts, "terrain_alt", "altitudes"),
        underground_pad=_number(alts, "underground_pad", "altitudes", 0.0),
        plan_source=str(plan.get("source", "inline")),
        profile_source=str(profile.get("source", "inline")),
        plan_units=_units(plan.get("units"), "plan"),
        profile_units=_units(profile.get("units"), "profile"),
        profile_x_offset=_number(profile, "x_offset", "profile", 0.0),
        plan_z=_pair(intervals.get("plan_z"), "intervals.plan_z"),
        profile_y=_pair(intervals.get("profile_y"), "intervals.profile_y"),
        palette=palette,
        output=str(data.get("output", {}).get("dir", "build")),
    )
    if project.underground_pad < 0:
        raise ProjectError("altitudes.underground_pad must be nonnegative")
    return project
