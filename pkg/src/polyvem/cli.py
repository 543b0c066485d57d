"""Command-line interface: mesh generation, solves, patch tests and studies."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Callable, TextIO

from pydantic import ValidationError

from .config import (
    CvtMeshSource,
    HexMeshSource,
    ProblemName,
    RunConfig,
    VoronoiMeshSource,
    load_config_data,
)
from .constants import MomentMode, SizeMeasure
from .exceptions import PolyVemError
from .logs import configure_logging
from .mesh_io import write_mesh
from .meshgen import Box
from .reports import GammaSweepReport
from .runner import run, run_convergence, run_patch


class _Console:
    """Status lines, headlines and aligned key/value tables on one stream."""

    _RESET = "\033[0m"
    _COLORS = {
        "title": "\033[95m",
        "info": "\033[36m",
        "success": "\033[32m",
        "warning": "\033[33m",
        "error": "\033[31m",
    }
    _PREFIXES = {
        "info": "[INFO]",
        "success": "[ OK ]",
        "warning": "[WARN]",
        "error": "[FAIL]",
    }

    def __init__(self, stream: TextIO) -> None:
        self.stream = stream
        self._use_color = bool(getattr(stream, "isatty", lambda: False)())

    def _write(self, message: str = "") -> None:
        print(message, file=self.stream)

    def _stylize(self, kind: str, message: str) -> str:
        prefix = self._PREFIXES.get(kind, "[INFO]")
        if not self._use_color:
            return f"{prefix} {message}"
        color = self._COLORS.get(kind, self._COLORS["info"])
        return f"{color}{prefix}{self._RESET} {message}"

    def headline(self, title: str) -> None:
        color = self._COLORS["title"] if self._use_color else ""
        reset = self._RESET if self._use_color else ""
        self._write(f"{color}{title}{reset}")
        self._write("-" * len(title))

    def status(self, kind: str, message: str) -> None:
        self._write(self._stylize(kind, message))

    def table(self, rows: list[tuple[str, object]]) -> None:
        width = max((len(label) for label, _ in rows), default=0)
        for label, value in rows:
            self._write(f"    {label.ljust(width)}  {value}")


def _split_box_values(argv: list[str]) -> list[str]:
    """Glue ``--box -1,1,...`` into ``--box=-1,1,...`` so argparse keeps the value."""

    result: list[str] = []
    index = 0
    while index < len(argv):
        token = argv[index]
        if token == "--box" and index + 1 < len(argv):
            result.append(f"--box={argv[index + 1]}")
            index += 2
            continue
        result.append(token)
        index += 1
    return result


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON run configuration")
    parser.add_argument("--problem", choices=[p.value for p in ProblemName])
    parser.add_argument("--label", help="Run label stamped on logs and reports")
    parser.add_argument("--gamma", type=float, help="Stabilisation factor")
    parser.add_argument("--mode", choices=[m.value for m in MomentMode])
    parser.add_argument("--mesh", type=Path, help="Mesh JSON file")
    parser.add_argument("--youngs", type=float, help="Young's modulus (isotropic)")
    parser.add_argument("--poisson", type=float, help="Poisson ratio (isotropic)")
    parser.add_argument("--output-dir", type=Path)
    parser.add_argument("--solver", choices=["direct", "cg"])
    parser.add_argument("--tolerance", type=float)
    parser.add_argument("--nterms", type=int, help="Series terms in the beam solution")
    parser.add_argument("--workers", type=int)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyvem", description="Virtual element solver for 3D linear elasticity"
    )
    parser.add_argument(
        "--log-level",
        type=str.upper,
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
    )
    subparsers = parser.add_subparsers(dest="command")

    meshgen_parser = subparsers.add_parser("meshgen", help="Generate a polyhedral mesh file")
    kinds = meshgen_parser.add_subparsers(dest="kind")
    for kind, help_text in (
        ("hex", "Structured, optionally distorted, brick mesh"),
        ("voronoi", "Voronoi mesh from random seeds"),
        ("cvt", "Centroidal Voronoi mesh from Lloyd iteration"),
    ):
        sub = kinds.add_parser(kind, help=help_text)
        sub.add_argument("--box", default="0,1,0,1,0,1", help="x0,x1,y0,y1,z0,z1")
        sub.add_argument(
            "--n",
            required=kind == "hex",
            default=None if kind == "hex" else "50",
            help="nx,ny,nz for hex; seed count otherwise",
        )
        sub.add_argument("--seed", type=int, default=None if kind == "hex" else 0)
        sub.add_argument("--output", type=Path, required=True, help="Mesh JSON to write")
        sub.add_argument("--workers", type=int, default=1)
        if kind == "hex":
            sub.add_argument("--distortion", type=float, default=0.0)
        if kind == "cvt":
            sub.add_argument("--max-iters", type=int, default=50)
            sub.add_argument("--tol", type=float, default=1e-4)

    run_parser = subparsers.add_parser("run", help="Solve a benchmark and write VTK and a report")
    _add_run_options(run_parser)

    patch_parser = subparsers.add_parser("patch", help="Linear displacement patch test")
    _add_run_options(patch_parser)

    conv_parser = subparsers.add_parser("convergence", help="Refinement study or gamma sweep")
    _add_run_options(conv_parser)
    conv_parser.add_argument("--levels", type=Path, nargs="+", help="Mesh files, coarse to fine")
    conv_parser.add_argument("--gammas", type=float, nargs="+", help="Sweep these gammas")
    conv_parser.add_argument(
        "--size-measure",
        choices=[m.value for m in SizeMeasure],
        help="Element diameter statistic the slopes are fitted against",
    )

    return parser


def _parse_counts(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise PolyVemError(f"--n expects integers, got {text!r}") from None


def _mesh_source(args: argparse.Namespace) -> HexMeshSource | VoronoiMeshSource | CvtMeshSource:
    box = Box.parse(args.box)
    bounds = (box.lo[0], box.hi[0], box.lo[1], box.hi[1], box.lo[2], box.hi[2])
    counts = _parse_counts(args.n)
    if args.kind == "hex":
        if len(counts) != 3:
            raise PolyVemError(f"hex meshes need --n nx,ny,nz, got {args.n!r}")
        return HexMeshSource(box=bounds, n=counts, distortion=args.distortion, seed=args.seed)
    if len(counts) != 1:
        raise PolyVemError(f"{args.kind} meshes need a single seed count, got {args.n!r}")
    if args.kind == "voronoi":
        return VoronoiMeshSource(box=bounds, n=counts[0], seed=args.seed)
    return CvtMeshSource(
        box=bounds, n=counts[0], seed=args.seed, max_iters=args.max_iters, tol=args.tol
    )


def _cmd_meshgen(args: argparse.Namespace) -> int:
    console = _Console(sys.stdout)
    mesh = _mesh_source(args).build(args.workers)
    path = write_mesh(mesh, args.output)
    h_min, h_max = mesh.diameter_range
    console.status("success", f"Wrote {args.kind} mesh to {path}")
    console.table(
        [
            ("elements", mesh.n_elements),
            ("faces", mesh.n_faces),
            ("vertices", mesh.n_vertices),
            ("min diameter", f"{h_min:.6g}"),
            ("max diameter", f"{h_max:.6g}"),
        ]
    )
    return 0


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    """File values first, then every flag given on the command line."""

    data: dict[str, Any] = load_config_data(args.config) if args.config else {}
    for flag, key in (
        ("problem", "problem"),
        ("label", "label"),
        ("gamma", "gamma"),
        ("mode", "mode"),
        ("output_dir", "output_dir"),
        ("solver", "solver"),
        ("tolerance", "tolerance"),
        ("workers", "workers"),
    ):
        value = getattr(args, flag)
        if value is not None:
            data[key] = value

    if args.youngs is not None or args.poisson is not None:
        current = data.get("material") or {}
        if current.get("kind", "isotropic") != "isotropic":
            current = {}
        base = RunConfig.model_validate({"problem": data.get("problem", "patch")}).material
        data["material"] = {
            "kind": "isotropic",
            "youngs_modulus": args.youngs
            if args.youngs is not None
            else current.get("youngs_modulus", base.youngs_modulus),
            "poisson_ratio": args.poisson
            if args.poisson is not None
            else current.get("poisson_ratio", base.poisson_ratio),
        }

    if args.nterms is not None:
        data["beam"] = {**(data.get("beam") or {}), "nterms": args.nterms}
    if args.mesh is not None:
        data["mesh"] = {"kind": "file", "path": str(args.mesh)}
        data.pop("levels", None)
    if getattr(args, "levels", None):
        data["levels"] = [{"kind": "file", "path": str(path)} for path in args.levels]
        data.pop("mesh", None)
    if getattr(args, "gammas", None):
        data["gammas"] = args.gammas
    if getattr(args, "size_measure", None):
        data["size_measure"] = args.size_measure
    return RunConfig.model_validate(data)


def _cmd_run(args: argparse.Namespace) -> int:
    console = _Console(sys.stdout)
    outcome = run(_config_from_args(args))
    report = outcome.report
    console.headline(f"{report.problem} run '{report.label}'")
    console.table(
        [
            ("elements", report.mesh.elements),
            ("dofs", report.errors.dofs),
            ("h", f"{report.errors.h:.6g}"),
            ("e_u", f"{report.errors.e_u:.6e}"),
            ("e_sigma", f"{report.errors.e_sigma:.6e}"),
        ]
    )
    for probe in report.probes:
        console.status("info", f"{probe.name} u={probe.computed} exact={probe.exact}")
    for path in outcome.files:
        console.status("success", f"Wrote {path}")
    return 0


def _cmd_patch(args: argparse.Namespace) -> int:
    console = _Console(sys.stdout)
    outcome = run_patch(_config_from_args(args))
    errors = outcome.report.errors
    summary = f"e_u={errors.e_u:.3e} e_sigma={errors.e_sigma:.3e}"
    if outcome.passed:
        console.status("success", f"PASS {summary}")
        return 0
    console.status("error", f"FAIL {summary}")
    return 1


def _cmd_convergence(args: argparse.Namespace) -> int:
    console = _Console(sys.stdout)
    outcome = run_convergence(_config_from_args(args))
    report = outcome.report
    if isinstance(report, GammaSweepReport):
        console.status("info", f"best gamma {report.best_gamma:g}")
    elif report.exact:
        console.status("success", "every level is exact; slopes are undefined")
    else:
        console.status(
            "info", f"slope_u={report.slope_u:.4f} slope_sigma={report.slope_sigma:.4f}"
        )
    for path in outcome.files:
        console.status("success", f"Wrote {path}")
    return 0


_COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "meshgen": _cmd_meshgen,
    "run": _cmd_run,
    "patch": _cmd_patch,
    "convergence": _cmd_convergence,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(_split_box_values(list(sys.argv[1:] if argv is None else argv)))

    if not args.command or (args.command == "meshgen" and not args.kind):
        parser.print_help()
        return 2

    configure_logging(args.log_level, getattr(args, "label", None))
    err_console = _Console(sys.stderr)
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        err_console.status("error", f"Invalid configuration:\n{exc}")
        return 1
    except PolyVemError as exc:
        err_console.status("error", f"{type(exc).__name__}: {exc}")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
