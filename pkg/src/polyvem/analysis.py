"""Discrete error measures and the convergence and gamma studies built on them."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, replace

import numpy as np

from .assembly import ProblemSpec, Solution, SolverMethod, solve_problem
from .constants import PATCH_DISPLACEMENT_TOL, PATCH_STRESS_TOL, SizeMeasure
from .exceptions import AnalysisError
from .geometry import PolyMesh
from .material import frobenius_squared
from .quadrature import high_order_cell_rule, volume_nodal_rule
from .reports import ErrorReport

logger = logging.getLogger(__name__)

MeshLevel = PolyMesh | Sequence[PolyMesh]


def lumped_volume_weights(mesh: PolyMesh) -> np.ndarray:
    """Per-vertex sum of the volume nodal weights of all surrounding elements."""

    weights = np.zeros(mesh.n_vertices)
    for element in mesh.elements:
        rule = volume_nodal_rule(element, mesh)
        np.add.at(weights, np.asarray(rule.vertices), rule.weights)
    return weights


def displacement_error(
    mesh: PolyMesh,
    displacement: np.ndarray,
    exact: Callable[[np.ndarray], np.ndarray],
    weights: np.ndarray | None = None,
) -> float:
    """Relative L2 displacement error evaluated with the volume nodal rule."""

    if weights is None:
        weights = lumped_volume_weights(mesh)
    reference = np.asarray(exact(mesh.vertices), dtype=float).reshape(-1, 3)
    computed = np.asarray(displacement, dtype=float).reshape(-1, 3)
    if computed.shape != reference.shape:
        raise AnalysisError(
            f"expected {reference.shape[0]} nodal displacements, got {computed.shape[0]}"
        )
    denominator = float(weights @ np.sum(reference**2, axis=1))
    if denominator <= 0.0:
        raise AnalysisError("exact displacement vanishes; relative error is undefined")
    numerator = float(weights @ np.sum((reference - computed) ** 2, axis=1))
    return float(np.sqrt(numerator / denominator))


def stress_error(
    mesh: PolyMesh,
    element_stress: np.ndarray,
    exact: Callable[[np.ndarray], np.ndarray],
    degree: int = 4,
) -> float:
    """Relative L2 error of the element-constant stress, Frobenius norm, cell rule."""

    element_stress = np.asarray(element_stress, dtype=float).reshape(-1, 6)
    if len(element_stress) != mesh.n_elements:
        raise AnalysisError(
            f"expected stresses for {mesh.n_elements} elements, got {len(element_stress)}"
        )
    numerator = 0.0
    denominator = 0.0
    for element, sigma_h in zip(mesh.elements, element_stress):
        rule = high_order_cell_rule(element, mesh, degree)
        sigma = np.asarray(exact(rule.points), dtype=float)
        numerator += float(rule.weights @ frobenius_squared(sigma - sigma_h))
        denominator += float(rule.weights @ frobenius_squared(sigma))
    if denominator <= 0.0:
        raise AnalysisError("exact stress vanishes; relative error is undefined")
    return float(np.sqrt(numerator / denominator))


def error_report(solution: Solution, degree: int = 4) -> ErrorReport:
    exact = solution.problem.exact
    if exact is None:
        raise AnalysisError(f"problem {solution.problem.name!r} has no analytical solution")
    mesh = solution.mesh
    return ErrorReport(
        e_u=displacement_error(mesh, solution.displacement, exact.displacement),
        e_sigma=stress_error(mesh, solution.stress, exact.stress, degree),
        h=mesh.h_max,
        h_mean=mesh.h_mean,
        elements=mesh.n_elements,
        vertices=mesh.n_vertices,
        dofs=mesh.n_dofs,
        gamma=solution.problem.gamma,
        mode=solution.problem.mode,
        residual=solution.residual,
    )


def _is_exact(report: ErrorReport) -> bool:
    return report.e_u <= PATCH_DISPLACEMENT_TOL and report.e_sigma <= PATCH_STRESS_TOL


def _average(reports: Sequence[ErrorReport]) -> ErrorReport:
    if len(reports) == 1:
        return reports[0]
    return reports[0].model_copy(
        update={
            "e_u": float(np.mean([r.e_u for r in reports])),
            "e_sigma": float(np.mean([r.e_sigma for r in reports])),
            "h": float(np.mean([r.h for r in reports])),
            "h_mean": float(np.mean([r.h_mean for r in reports])),
            "elements": int(round(np.mean([r.elements for r in reports]))),
            "vertices": int(round(np.mean([r.vertices for r in reports]))),
            "dofs": int(round(np.mean([r.dofs for r in reports]))),
            "residual": float(max(r.residual for r in reports)),
        }
    )


def fit_slope(h: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(h)."""

    h = np.asarray(h, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(h) < 2:
        raise AnalysisError("a convergence slope needs at least 2 levels")
    if np.any(errors <= 0.0) or np.any(h <= 0.0):
        raise AnalysisError("convergence slopes need strictly positive errors and sizes")
    if np.ptp(np.log(h)) == 0.0:
        raise AnalysisError("all levels have the same mesh size")
    return float(np.polyfit(np.log(h), np.log(errors), 1)[0])


@dataclass(frozen=True)
class ConvergenceResult:
    levels: tuple[ErrorReport, ...]
    slope_u: float | None
    slope_sigma: float | None
    exact: bool


def convergence_study(
    problem: ProblemSpec,
    levels: Sequence[MeshLevel],
    method: SolverMethod = "direct",
    tol: float = 1e-10,
    workers: int = 1,
    h: SizeMeasure | str = SizeMeasure.MAX,
    degree: int = 4,
) -> ConvergenceResult:
    """Solve on every level and fit error rates against the mesh size.

    A level may hold several mesh realisations; their errors and sizes are
    averaged. When every level is exact to patch-test tolerances the slopes
    are undefined and reported as None.
    """

    if len(levels) < 2:
        raise AnalysisError(f"a convergence study needs at least 2 levels, got {len(levels)}")
    try:
        measure = SizeMeasure(h)
    except ValueError:
        raise AnalysisError(f"unknown mesh size measure {h!r}") from None

    averaged: list[ErrorReport] = []
    for index, level in enumerate(levels):
        meshes = [level] if isinstance(level, PolyMesh) else list(level)
        if not meshes:
            raise AnalysisError(f"level {index} holds no meshes")
        reports = [
            error_report(solve_problem(mesh, problem, method, tol, workers), degree)
            for mesh in meshes
        ]
        report = _average(reports)
        logger.info(
            "level %d: h=%.4g e_u=%.4e e_sigma=%.4e", index, report.h, report.e_u, report.e_sigma
        )
        averaged.append(report)

    if all(_is_exact(report) for report in averaged):
        return ConvergenceResult(tuple(averaged), None, None, exact=True)

    if measure is SizeMeasure.MAX:
        sizes = [report.h for report in averaged]
    else:
        sizes = [report.h_mean for report in averaged]
    return ConvergenceResult(
        levels=tuple(averaged),
        slope_u=fit_slope(sizes, [report.e_u for report in averaged]),
        slope_sigma=fit_slope(sizes, [report.e_sigma for report in averaged]),
        exact=False,
    )


@dataclass(frozen=True)
class GammaSweepResult:
    reports: tuple[ErrorReport, ...]
    best_gamma: float


def gamma_sweep(
    problem: ProblemSpec,
    mesh: PolyMesh,
    gammas: Sequence[float],
    method: SolverMethod = "direct",
    tol: float = 1e-10,
    workers: int = 1,
    degree: int = 4,
) -> GammaSweepResult:
    """One solve per stabilisation factor on a fixed mesh."""

    if not gammas:
        raise AnalysisError("gamma sweep needs at least one gamma value")
    reports = tuple(
        error_report(
            solve_problem(mesh, replace(problem, gamma=float(gamma)), method, tol, workers),
            degree,
        )
        for gamma in gammas
    )
    best = min(reports, key=lambda report: report.e_u)
    return GammaSweepResult(reports=reports, best_gamma=best.gamma)


__all__ = [
    "ConvergenceResult",
    "GammaSweepResult",
    "convergence_study",
    "displacement_error",
    "error_report",
    "fit_slope",
    "gamma_sweep",
    "lumped_volume_weights",
    "stress_error",
]
