"""Run configuration models for polyvem commands."""

from __future__ import annotations

import json
import os
from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .constants import WORKERS_ENV_VAR, BoxSide, MomentMode, SizeMeasure
from .exceptions import ConfigError
from .geometry import PolyMesh
from .material import MaterialModel
from .meshgen import Box, SeedSet, cvt_mesh, hex_mesh, voronoi_mesh
from .mesh_io import read_mesh

BoxBounds = Tuple[float, float, float, float, float, float]


class ProblemName(str, Enum):
    """Benchmark problems that can be solved and checked against exact fields."""

    PATCH = "patch"
    BEAM = "beam"


class SolverMethod(str, Enum):
    DIRECT = "direct"
    CG = "cg"


class TractionMode(str, Enum):
    """How the shear resultant is distributed over the loaded beam end."""

    EXACT = "exact"
    UNIFORM = "uniform"


class IsotropicMaterial(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["isotropic"] = "isotropic"
    youngs_modulus: float = Field(gt=0.0)
    poisson_ratio: float = Field(gt=-1.0, lt=0.5)

    def build(self) -> MaterialModel:
        return MaterialModel.isotropic(self.youngs_modulus, self.poisson_ratio)


class AnisotropicMaterial(BaseModel):
    """Full elasticity tensor as the 6x6 table of C_(ijkl) in (11,22,33,12,23,31) order."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["anisotropic"] = "anisotropic"
    components: List[List[float]]

    @field_validator("components")
    @classmethod
    def _six_by_six(cls, value: List[List[float]]) -> List[List[float]]:
        if len(value) != 6 or any(len(row) != 6 for row in value):
            raise ValueError("components must be a 6x6 table")
        return value

    def build(self) -> MaterialModel:
        return MaterialModel.anisotropic(self.components)


MaterialConfig = Annotated[
    Union[IsotropicMaterial, AnisotropicMaterial], Field(discriminator="kind")
]


class MeshSourceBase(BaseModel):
    """Shared fields and contract for mesh sources."""

    model_config = ConfigDict(extra="forbid")

    def build(self, workers: int = 1) -> PolyMesh:
        raise NotImplementedError("Subclasses must implement build")


class _BoxedSource(MeshSourceBase):
    box: BoxBounds = (0.0, 1.0, 0.0, 1.0, 0.0, 1.0)

    def bounds(self) -> Box:
        x0, x1, y0, y1, z0, z1 = self.box
        return Box((x0, y0, z0), (x1, y1, z1))


class HexMeshSource(_BoxedSource):
    kind: Literal["hex"] = "hex"
    n: Tuple[int, int, int] = (3, 3, 3)
    distortion: float = Field(0.0, ge=0.0, lt=0.5)
    seed: Optional[int] = None

    def build(self, workers: int = 1) -> PolyMesh:
        return hex_mesh(self.bounds(), *self.n, distortion=self.distortion, seed=self.seed)


class VoronoiMeshSource(_BoxedSource):
    kind: Literal["voronoi"] = "voronoi"
    n: int = Field(50, ge=1)
    seed: int = 0

    def build(self, workers: int = 1) -> PolyMesh:
        box = self.bounds()
        return voronoi_mesh(box, SeedSet.random(box, self.n, self.seed), workers)


class CvtMeshSource(_BoxedSource):
    kind: Literal["cvt"] = "cvt"
    n: int = Field(50, ge=1)
    seed: int = 0
    max_iters: int = Field(50, ge=0)
    tol: float = Field(1e-4, gt=0.0)

    def build(self, workers: int = 1) -> PolyMesh:
        return cvt_mesh(self.bounds(), self.n, self.max_iters, self.seed, self.tol, workers)


class FileMeshSource(MeshSourceBase):
    kind: Literal["file"] = "file"
    path: Path

    def build(self, workers: int = 1) -> PolyMesh:
        return read_mesh(self.path)


MeshSource = Annotated[
    Union[HexMeshSource, VoronoiMeshSource, CvtMeshSource, FileMeshSource],
    Field(discriminator="kind"),
]


class BeamParameters(BaseModel):
    model_config = ConfigDict(extra="forbid")

    load: float = 0.1
    length: float = Field(10.0, gt=0.0)
    nterms: int = Field(16, ge=1)
    traction: TractionMode = TractionMode.EXACT
    lateral: bool = False


_DEFAULT_MATERIALS: Dict[ProblemName, Dict[str, Any]] = {
    ProblemName.PATCH: {"kind": "isotropic", "youngs_modulus": 1.0, "poisson_ratio": 0.3},
    ProblemName.BEAM: {"kind": "isotropic", "youngs_modulus": 25.0, "poisson_ratio": 0.3},
}


class RunConfig(BaseModel):
    """Everything a ``run``, ``patch`` or ``convergence`` command needs."""

    model_config = ConfigDict(extra="forbid")

    problem: ProblemName = ProblemName.PATCH
    label: str = "run"
    material: Optional[MaterialConfig] = None
    gamma: float = Field(1.0, gt=0.0)
    mode: MomentMode = MomentMode.NODAL
    mesh: Optional[MeshSource] = None
    levels: List[MeshSource] = Field(default_factory=list)
    gammas: List[float] = Field(default_factory=list)
    size_measure: SizeMeasure = SizeMeasure.MAX
    traction_tags: List[BoxSide] = Field(default_factory=list)
    output_dir: Path = Path("out")
    solver: SolverMethod = SolverMethod.DIRECT
    tolerance: float = Field(1e-10, gt=0.0)
    quadrature_degree: int = Field(4, ge=4)
    beam: BeamParameters = Field(default_factory=BeamParameters)
    workers: Optional[int] = Field(None, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _default_material(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("material") is None:
            problem = ProblemName(data.get("problem", ProblemName.PATCH))
            data = {**data, "material": dict(_DEFAULT_MATERIALS[problem])}
        return data

    @model_validator(mode="after")
    def _check_sources(self) -> RunConfig:
        if self.mesh is not None and self.levels:
            raise ValueError("configure either mesh or levels, not both")
        if any(g <= 0.0 for g in self.gammas):
            raise ValueError("every gamma must be positive")
        if self.problem is ProblemName.BEAM and self.traction_tags:
            raise ValueError("traction_tags only apply to the patch problem")
        return self

    def default_mesh(self) -> MeshSource:
        if self.problem is ProblemName.BEAM:
            length = self.beam.length
            return HexMeshSource(box=(-1.0, 1.0, -1.0, 1.0, 0.0, length), n=(2, 2, 10))
        return HexMeshSource()

    def mesh_source(self) -> MeshSource:
        """The single mesh source of a run, falling back to the problem default."""

        if self.mesh is not None:
            return self.mesh
        if self.levels:
            raise ConfigError("this command takes a single mesh, not refinement levels")
        return self.default_mesh()

    def resolved_workers(self) -> int:
        if self.workers is not None:
            return self.workers
        raw = os.environ.get(WORKERS_ENV_VAR)
        if raw is None or raw.strip() == "":
            return 1
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV_VAR} must be an integer, got {raw!r}") from None
        if value < 1:
            raise ConfigError(f"{WORKERS_ENV_VAR} must be at least 1, got {value}")
        return value


def load_config_data(path: str | Path) -> Dict[str, Any]:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config {path} is not valid JSON (line {exc.lineno} column {exc.colno}): {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return data


def load_config(path: str | Path, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Read a JSON config; ``overrides`` replace top-level fields before validation."""

    data = load_config_data(path)
    data.update(overrides or {})
    return RunConfig.model_validate(data)


__all__ = [
    "AnisotropicMaterial",
    "BeamParameters",
    "CvtMeshSource",
    "FileMeshSource",
    "HexMeshSource",
    "IsotropicMaterial",
    "MaterialConfig",
    "MeshSource",
    "ProblemName",
    "RunConfig",
    "SolverMethod",
    "TractionMode",
    "VoronoiMeshSource",
    "load_config",
    "load_config_data",
]
