"""Pipeline commands behind the CLI: init, validate, build, export, report.

Each command takes a loaded :class:`~rockmodel.project.Project` (or a
directory for ``init``) and returns plain data; the CLI only formats and
maps exceptions to exit codes.  Builds persist ``model.json`` and
``report.json`` in the project's output directory; later commands read them
back rather than rebuilding.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import sample
from .errors import ProjectError, RockModelError
from .geo_frame import GeoPoint, LocalFrame
from .kml_io import write_collada, write_kml_extruded, write_kml_model
from .mesh import TriMesh, export_obj, is_watertight, mesh_volume
from .project import Project
from .solids import Cell, GeoModel, Intervals, build_model
from .wireframe import BoundingBox, validate_subdivision

PROJECT_FILE = "project.toml"
MODEL_FILE = "model.json"
REPORT_FILE = "report.json"
EXPORT_FORMATS = ("obj", "kml", "dae", "kml-extruded")


@dataclass
class BuildReport:
    name: str
    box: BoundingBox
    max_alt: float
    terrain_alt: float
    underground_pad: float
    height: float
    rows: list = field(default_factory=list)  # (mass_id, layer_id, volume, watertight)
    warnings: list = field(default_factory=list)

    @property
    def total_volume(self) -> float:
        return math.fsum(r[2] for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "box": {"length": self.box.length, "width": self.box.width, "height": self.box.height},
            "altitudes": {
                "max_alt": self.max_alt,
                "terrain_alt": self.terrain_alt,
                "visible_height": self.max_alt - self.terrain_alt,
                "underground_pad": self.underground_pad,
                "model_height": self.height,
            },
            "cells": [
                {"mass_id": m, "layer_id": l, "volume": v, "watertight": w} for m, l, v, w in self.rows
            ],
            "totals": {"cells": len(self.rows), "volume": self.total_volume},
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BuildReport":
        a = d["altitudes"]
        return cls(
            name=d["name"],
            box=BoundingBox(**d["box"]),
            max_alt=a["max_alt"],
            terrain_alt=a["terrain_alt"],
            underground_pad=a["underground_pad"],
            height=a["model_height"],
            rows=[(c["mass_id"], c["layer_id"], c["volume"], c["watertight"]) for c in d["cells"]],
            warnings=list(d.get("warnings", [])),
        )

    def format_table(self) -> str:
        b = self.box
        lines = [
            f"{self.name} build report",
            f"box: {b.length:.1f} x {b.width:.1f} x {b.height:.1f} m",
            f"max altitude:     {self.max_alt:8.1f} m",
            f"terrain altitude: {self.terrain_alt:8.1f} m",
            f"visible height:   {self.max_alt - self.terrain_alt:8.1f} m",
            f"underground pad:  {self.underground_pad:8.1f} m",
            f"model height:     {self.height:8.1f} m",
            "",
            f"{'mass':>6} {'layer':>6} {'volume m3':>14} {'watertight':>11}",
        ]
        for m, l, v, w in self.rows:
            lines.append(f"{m:>6} {l:>6} {v:>14.3f} {'yes' if w else 'NO':>11}")
        lines.append(f"{'total':>6} {len(self.rows):>6} {self.total_volume:>14.3f}")
        if not self.rows:
            lines.append("warning: model has no cells")
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines) + "\n"


# -- model persistence ----------------------------------------------------------


def model_to_dict(model: GeoModel) -> dict:
    o = model.frame.origin
    return {
        "format": "rockmodel-model/1",
        "frame": {"lat": o.lat, "lon": o.lon, "alt": o.alt},
        "box": {"length": model.box.length, "width": model.box.width, "height": model.box.height},
        "cells": [
            {
                "mass_id": c.mass_id,
                "layer_id": c.layer_id,
                "vertices": c.mesh.vertices.tolist(),
                "triangles": c.mesh.triangles.tolist(),
            }
            for c in model.cells
        ],
    }


def model_from_dict(d: dict) -> GeoModel:
    f = d["frame"]
    cells = []
    for c in d["cells"]:
        tag = (c["mass_id"], c["layer_id"])
        mesh = TriMesh(np.array(c["vertices"], dtype=float), np.array(c["triangles"], dtype=np.int64), tag)
        cells.append(Cell(c["mass_id"], c["layer_id"], mesh))
    return GeoModel(LocalFrame(GeoPoint(f["lat"], f["lon"], f["alt"])), tuple(cells), BoundingBox(**d["box"]))


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=False) + "\n"


def load_model(project: Project) -> GeoModel:
    path = project.output_dir / MODEL_FILE
    if not path.is_file():
        raise ProjectError(f"no built model at {path}; run `rockmodel build` first")
    return model_from_dict(json.loads(path.read_text(encoding="utf-8")))


def load_report(project: Project) -> BuildReport:
    path = project.output_dir / REPORT_FILE
    if not path.is_file():
        raise ProjectError(f"no build report at {path}; run `rockmodel build` first")
    return BuildReport.from_dict(json.loads(path.read_text(encoding="utf-8")))


# -- commands -----------------------------------------------------------------


def cmd_init(directory, force: bool = False, project_name: str = PROJECT_FILE) -> list[Path]:
    """Write the Haut-Barr sample project and its KML inputs into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files = {
        project_name: sample.project_toml(),
        "plan.kml": sample.plan_kml(),
        "profile.kml": sample.profile_kml(),
    }
    existing = [name for name in files if (directory / name).exists()]
    if existing and not force:
        raise ProjectError(f"{', '.join(existing)} already exist in {directory}; use --force to overwrite")
    written = []
    for name, text in files.items():
        path = directory / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written


def _load_inputs(project: Project):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        plan = project.load_plan()
        profile = project.load_profile()
    return plan, profile, [str(w.message) for w in caught]


def cmd_validate(project: Project) -> tuple[int, list[str], list[str]]:
    """Return (exit status, diagnostics, warnings) for both input subdivisions."""
    try:
        plan, profile, notes = _load_inputs(project)
    except RockModelError as exc:
        return 1, [str(exc)], []
    diags = [f"plan {d}" for d in validate_subdivision(plan)]
    diags += [f"profile {d}" for d in validate_subdivision(profile)]
    return (1 if diags else 0), diags, notes


def cmd_build(project: Project, n_jobs: int = 1) -> tuple[GeoModel, BuildReport]:
    """Build all cells, then write model.json and report.json."""
    height = project.height
    plan, profile, notes = _load_inputs(project)
    intervals = Intervals(project.default_plan_z(), project.profile_y)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        model = build_model(plan, profile, intervals, project.frame, n_jobs=n_jobs)
    notes += [str(w.message) for w in caught]
    if not model.cells:
        notes.append("model has no cells")

    rows = [(c.mass_id, c.layer_id, mesh_volume(c.mesh), bool(is_watertight(c.mesh))) for c in model.cells]
    report = BuildReport(
        name=project.name,
        box=model.box,
        max_alt=project.max_alt,
        terrain_alt=project.terrain_alt,
        underground_pad=project.underground_pad,
        height=height,
        rows=rows,
        warnings=notes,
    )
    model_text = _dump(model_to_dict(model))
    report_text = _dump(report.to_dict())
    out = project.output_dir
    out.mkdir(parents=True, exist_ok=True)
    (out / MODEL_FILE).write_text(model_text, encoding="utf-8")
    (out / REPORT_FILE).write_text(report_text, encoding="utf-8")
    return model, report


def cmd_export(project: Project, fmt: str) -> list[Path]:
    """Write the built model in ``fmt``; returns the files written."""
    if fmt not in EXPORT_FORMATS:
        raise ValueError(f"unknown export format {fmt!r}; choose from {', '.join(EXPORT_FORMATS)}")
    out = project.output_dir
    if fmt == "kml-extruded":
        plan, _, _ = _load_inputs(project)
        base = project.terrain_alt
        text = write_kml_extruded(plan, project.frame, base, project.max_alt)
        files = {"model_extruded.kml": text}
    else:
        model = load_model(project)
        if fmt == "obj":
            files = {"model.obj": export_obj(model.meshes())}
        elif fmt == "dae":
            files = {"model.dae": write_collada(model, project.palette)}
        else:
            files = {
                "model.kml": write_kml_model(model, "model.dae"),
                "model.dae": write_collada(model, project.palette),
            }
    written = []
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        path = out / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written


def cmd_report(project: Project, machine: bool = False) -> str:
    report = load_report(project)
    if machine:
        return _dump(report.to_dict())
    return report.format_table()


def find_project(path: Optional[str]) -> Path:
    return Path(path) if path else Path.cwd() / PROJECT_FILE
