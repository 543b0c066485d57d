"""Orchestration behind the ``run``, ``patch`` and ``convergence`` commands."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import convergence_study, error_report, gamma_sweep
from .assembly import ProblemSpec, Solution, solve_problem
from .benchmarks import beam_problem, patch_problem
from .config import ProblemName, RunConfig
from .constants import PATCH_DISPLACEMENT_TOL, PATCH_STRESS_TOL
from .exceptions import ConfigError
from .geometry import PolyMesh
from .logs import set_run_label
from .reports import (
    ConvergenceReport,
    GammaSweepReport,
    MeshSummary,
    PatchReport,
    Probe,
    RunReport,
    write_csv,
    write_json,
)
from .vtk import write_vtk

logger = logging.getLogger(__name__)

SOLUTION_FILE = "solution.vtk"
REPORT_FILE = "report.json"
PATCH_FILE = "patch.json"
CONVERGENCE_CSV = "convergence.csv"
CONVERGENCE_JSON = "convergence.json"
GAMMA_CSV = "gamma_sweep.csv"
GAMMA_JSON = "gamma_sweep.json"

CONVERGENCE_HEADER = ("level", "h", "dofs", "e_u", "e_sigma")
GAMMA_HEADER = ("gamma", "h", "dofs", "e_u", "e_sigma")


@dataclass(frozen=True)
class RunOutcome:
    report: RunReport
    solution: Solution
    files: tuple[Path, ...]


@dataclass(frozen=True)
class PatchOutcome:
    report: PatchReport
    files: tuple[Path, ...]

    @property
    def passed(self) -> bool:
        return self.report.passed


@dataclass(frozen=True)
class StudyOutcome:
    report: ConvergenceReport | GammaSweepReport
    files: tuple[Path, ...]


def build_problem(config: RunConfig) -> ProblemSpec:
    material = config.material.build()
    if config.problem is ProblemName.BEAM:
        beam = config.beam
        return beam_problem(
            load=beam.load,
            length=beam.length,
            material=material,
            gamma=config.gamma,
            mode=config.mode,
            nterms=beam.nterms,
            traction=beam.traction.value,
            lateral=beam.lateral,
        )
    return patch_problem(
        material,
        gamma=config.gamma,
        mode=config.mode,
        traction_tags=tuple(str(tag) for tag in config.traction_tags),
    )


def mesh_summary(mesh: PolyMesh) -> MeshSummary:
    h_min, h_max = mesh.diameter_range
    return MeshSummary(
        vertices=mesh.n_vertices,
        faces=mesh.n_faces,
        elements=mesh.n_elements,
        boundary_faces=len(mesh.boundary_faces),
        h_min=h_min,
        h_max=h_max,
        volume=mesh.total_volume,
    )


def probe(solution: Solution, name: str, point: tuple[float, float, float]) -> Probe:
    """Displacement at the mesh vertex nearest to ``point``."""

    mesh = solution.mesh
    vertex = int(np.argmin(np.linalg.norm(mesh.vertices - np.asarray(point), axis=1)))
    exact = solution.problem.exact
    expected = None
    if exact is not None:
        expected = exact.displacement(mesh.vertices[vertex : vertex + 1])[0].tolist()
    return Probe(
        name=name,
        point=[float(c) for c in point],
        vertex=vertex,
        computed=solution.displacement[vertex].tolist(),
        exact=expected,
    )


def _beam_probes(solution: Solution, length: float) -> list[Probe]:
    return [
        probe(solution, "loaded_end_center", (0.0, 0.0, 0.0)),
        probe(solution, "clamped_end_center", (0.0, 0.0, length)),
    ]


def _solve(config: RunConfig) -> Solution:
    workers = config.resolved_workers()
    mesh = config.mesh_source().build(workers)
    logger.info(
        "mesh: %d vertices, %d faces, %d elements",
        mesh.n_vertices,
        mesh.n_faces,
        mesh.n_elements,
    )
    return solve_problem(
        mesh, build_problem(config), config.solver.value, config.tolerance, workers
    )


def run(config: RunConfig) -> RunOutcome:
    """Solve the configured problem and write ``solution.vtk`` and ``report.json``."""

    set_run_label(config.label)
    solution = _solve(config)
    errors = error_report(solution, config.quadrature_degree)
    probes = (
        _beam_probes(solution, config.beam.length)
        if config.problem is ProblemName.BEAM
        else []
    )
    report = RunReport(
        problem=config.problem.value,
        label=config.label,
        mesh=mesh_summary(solution.mesh),
        errors=errors,
        probes=probes,
    )
    out = Path(config.output_dir)
    files = (
        write_vtk(out / SOLUTION_FILE, solution.mesh, solution.displacement, solution.stress),
        write_json(out / REPORT_FILE, report),
    )
    logger.info("e_u=%.4e e_sigma=%.4e", errors.e_u, errors.e_sigma)
    return RunOutcome(report, solution, files)


def run_patch(config: RunConfig) -> PatchOutcome:
    """Linear patch test: passes when both errors sit at round-off level."""

    if config.problem is not ProblemName.PATCH:
        raise ConfigError(f"the patch command needs problem 'patch', got {config.problem.value!r}")
    set_run_label(config.label)
    solution = _solve(config)
    errors = error_report(solution, config.quadrature_degree)
    passed = errors.e_u <= PATCH_DISPLACEMENT_TOL and errors.e_sigma <= PATCH_STRESS_TOL
    report = PatchReport(
        label=config.label,
        passed=passed,
        displacement_tol=PATCH_DISPLACEMENT_TOL,
        stress_tol=PATCH_STRESS_TOL,
        errors=errors,
    )
    path = write_json(Path(config.output_dir) / PATCH_FILE, report)
    return PatchOutcome(report, (path,))


def run_convergence(config: RunConfig) -> StudyOutcome:
    """Refinement study over ``levels``, or a gamma sweep when ``gammas`` are set."""

    set_run_label(config.label)
    workers = config.resolved_workers()
    problem = build_problem(config)
    method = config.solver.value
    out = Path(config.output_dir)

    if config.gammas:
        source = config.levels[0] if config.levels else config.mesh_source()
        mesh = source.build(workers)
        sweep = gamma_sweep(
            problem,
            mesh,
            config.gammas,
            method,
            config.tolerance,
            workers,
            config.quadrature_degree,
        )
        report = GammaSweepReport(
            problem=config.problem.value,
            label=config.label,
            rows=list(sweep.reports),
            best_gamma=sweep.best_gamma,
        )
        rows = [(r.gamma, r.h, r.dofs, r.e_u, r.e_sigma) for r in sweep.reports]
        files = (
            write_csv(out / GAMMA_CSV, GAMMA_HEADER, rows),
            write_json(out / GAMMA_JSON, report),
        )
        return StudyOutcome(report, files)

    if len(config.levels) < 2:
        raise ConfigError(
            f"a convergence study needs at least 2 mesh levels, got {len(config.levels)}"
        )
    meshes = [source.build(workers) for source in config.levels]
    result = convergence_study(
        problem,
        meshes,
        method,
        config.tolerance,
        workers,
        h=config.size_measure,
        degree=config.quadrature_degree,
    )
    report = ConvergenceReport(
        problem=config.problem.value,
        label=config.label,
        levels=list(result.levels),
        slope_u=result.slope_u,
        slope_sigma=result.slope_sigma,
        exact=result.exact,
        size_measure=config.size_measure,
    )
    rows = [(i, r.h, r.dofs, r.e_u, r.e_sigma) for i, r in enumerate(result.levels)]
    files = (
        write_csv(out / CONVERGENCE_CSV, CONVERGENCE_HEADER, rows),
        write_json(out / CONVERGENCE_JSON, report),
    )
    return StudyOutcome(report, files)


__all__ = [
    "PatchOutcome",
    "RunOutcome",
    "StudyOutcome",
    "build_problem",
    "mesh_summary",
    "probe",
    "run",
    "run_convergence",
    "run_patch",
]
