"""Report models written by the runner, and the CSV table writer."""

from __future__ import annotations

import csv
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from .constants import MomentMode, SizeMeasure


class ErrorReport(BaseModel):
    """Relative errors of one solve together with the mesh it ran on."""

    model_config = ConfigDict(extra="forbid")

    e_u: float = Field(ge=0.0)
    e_sigma: float = Field(ge=0.0)
    h: float = Field(gt=0.0, description="maximum element diameter")
    h_mean: float = Field(gt=0.0)
    elements: int
    vertices: int
    dofs: int
    gamma: float
    mode: MomentMode
    residual: float = 0.0


class Probe(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    point: List[float]
    vertex: int
    computed: List[float]
    exact: Optional[List[float]] = None


class MeshSummary(BaseModel):
    model_config = ConfigDict(extra="forbid")

    vertices: int
    faces: int
    elements: int
    boundary_faces: int
    h_min: float
    h_max: float
    volume: float


class RunReport(BaseModel):
    model_config = ConfigDict(extra="forbid")

    problem: str
    label: str
    mesh: MeshSummary
    errors: ErrorReport
    probes: List[Probe] = Field(default_factory=list)


class PatchReport(BaseModel):
    model_config = ConfigDict(extra="forbid")

    label: str
    passed: bool
    displacement_tol: float
    stress_tol: float
    errors: ErrorReport


class ConvergenceReport(BaseModel):
    model_config = ConfigDict(extra="forbid")

    problem: str
    label: str
    levels: List[ErrorReport]
    slope_u: Optional[float] = None
    slope_sigma: Optional[float] = None
    exact: bool = False
    size_measure: SizeMeasure = SizeMeasure.MAX


class GammaSweepReport(BaseModel):
    model_config = ConfigDict(extra="forbid")

    problem: str
    label: str
    rows: List[ErrorReport]
    best_gamma: float


def _format_cell(value: object) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    """Write a '.'-decimal table with 17 significant digits per float."""

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(value) for value in row])
    return path


def write_json(path: str | Path, report: BaseModel) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


__all__ = [
    "ConvergenceReport",
    "ErrorReport",
    "GammaSweepReport",
    "MeshSummary",
    "PatchReport",
    "Probe",
    "RunReport",
    "write_csv",
    "write_json",
]
