"""Command-line entry point: ``rockmodel <command> [--project PATH]``.

Exit codes: 0 success, 1 validation or build failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
import time
import warnings
from pathlib import Path

from .errors import RockModelError
from .pipeline import EXPORT_FORMATS, PROJECT_FILE, cmd_build, cmd_export, cmd_init, cmd_report, cmd_validate
from .project import OUTPUT_DIR_ENV, load_project


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rockmodel",
        description="Build geological rock-mass models from plan and profile wireframes.",
        epilog=f"The output directory can be overridden with the {OUTPUT_DIR_ENV} environment variable.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--project", default=None, help=f"project file (default ./{PROJECT_FILE})")
        return p

    p = add("init", "write the Haut-Barr sample project")
    p.add_argument("directory", nargs="?", default=None, help="target directory (default: the project's)")
    p.add_argument("--force", action="store_true", help="overwrite existing files")

    add("validate", "check both input subdivisions")

    p = add("build", "extrude, intersect and write the model")
    p.add_argument("--jobs", type=int, default=1, help="threads for cell construction")

    p = add("export", "write the built model for viewers")
    p.add_argument("--format", required=True, choices=EXPORT_FORMATS)

    p = add("report", "print the build report")
    p.add_argument("--machine", action="store_true", help="JSON instead of a table")
    return parser


def _show_warnings(caught):
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    project_path = Path(args.project) if args.project else Path.cwd() / PROJECT_FILE
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            status = _run(args, project_path)
        except (RockModelError, OSError) as exc:
            _show_warnings(caught)
            print(f"error: {exc}", file=sys.stderr)
            return 1
    _show_warnings(caught)
    return status


def _run(args, project_path: Path) -> int:
    if args.command == "init":
        if args.directory is not None:
            directory, name = Path(args.directory), (project_path.name if args.project else PROJECT_FILE)
        else:
            directory, name = project_path.parent, project_path.name
        for path in cmd_init(directory, force=args.force, project_name=name):
            print(f"wrote {path}")
        return 0

    project = load_project(project_path)
    if args.command == "validate":
        status, diags, notes = cmd_validate(project)
        for note in notes:
            print(f"warning: {note}", file=sys.stderr)
        for d in diags:
            print(d)
        print("ok" if status == 0 else f"{len(diags)} problem(s)")
        return status

    if args.command == "build":
        start = time.perf_counter()
        model, report = cmd_build(project, n_jobs=args.jobs)
        elapsed = time.perf_counter() - start
        for note in report.warnings:
            print(f"warning: {note}", file=sys.stderr)
        b = report.box
        print(f"built {len(model.cells)} cells in {elapsed:.2f} s; box {b.length:.1f} x {b.width:.1f} x {b.height:.1f} m")
        print(f"wrote {project.output_dir}")
        return 0

    if args.command == "export":
        for path in cmd_export(project, args.format):
            print(f"wrote {path}")
        return 0

    if args.command == "report":
        sys.stdout.write(cmd_report(project, machine=args.machine))
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
