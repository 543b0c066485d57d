"""Analytical benchmark fields and the boundary value problems built on them.

Two benchmarks are provided: the linear displacement patch field and a
prismatic beam with square cross-section (-1, 1)^2 and length L, loaded by
a transverse shear resultant F on its ``z = 0`` end and clamped to the
exact displacement on ``z = L``.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Literal

import numpy as np

from .assembly import ProblemSpec, TractionField
from .constants import BoxSide, MomentMode
from .exceptions import AnalysisError
from .material import MaterialModel, strain_from_gradient, voigt_to_tensor

TractionMode = Literal["exact", "uniform"]

LINEAR_PATCH_OFFSET = np.array([1.0, 2.0, 3.0]) / 100.0
LINEAR_PATCH_GRADIENT = np.array([[2.0, 1.0, 3.0], [3.0, 4.0, 2.0], [4.0, 3.0, 1.0]]) / 100.0
LINEAR_PATCH_OFFSET.setflags(write=False)
LINEAR_PATCH_GRADIENT.setflags(write=False)

BEAM_LOAD = 0.1
BEAM_LENGTH = 10.0
BEAM_YOUNGS_MODULUS = 25.0
BEAM_POISSON_RATIO = 0.3
BEAM_NTERMS = 16
BEAM_SECTION_AREA = 4.0

_LATERAL_SIDES = (BoxSide.XMIN, BoxSide.XMAX, BoxSide.YMIN, BoxSide.YMAX)


@dataclass(frozen=True, eq=False)
class AnalyticalSolution:
    """Exact displacement and stress fields evaluated on point arrays (k, 3)."""

    name: str
    displacement: Callable[[np.ndarray], np.ndarray]
    stress: Callable[[np.ndarray], np.ndarray]
    parameters: Mapping[str, Any] = field(default_factory=dict)

    def traction(self, points: np.ndarray, normals: np.ndarray) -> np.ndarray:
        """sigma(x) n for matching arrays of points and unit normals."""

        sigma = voigt_to_tensor(self.stress(np.atleast_2d(points)))
        return np.einsum("kij,kj->ki", sigma, np.atleast_2d(normals))

    def body_force(self, points: np.ndarray) -> np.ndarray:
        return np.zeros_like(np.atleast_2d(np.asarray(points, dtype=float)))


def patch_solution(
    offset: np.ndarray,
    gradient: np.ndarray,
    material: MaterialModel,
) -> AnalyticalSolution:
    """u = a + B x with its constant stress C : sym(B)."""

    a = np.array(offset, dtype=float).reshape(3)
    B = np.array(gradient, dtype=float).reshape(3, 3)
    sigma = material.stress(strain_from_gradient(B))

    def displacement(points: np.ndarray) -> np.ndarray:
        return a + np.atleast_2d(points) @ B.T

    def stress(points: np.ndarray) -> np.ndarray:
        return np.broadcast_to(sigma, (len(np.atleast_2d(points)), 6)).copy()

    return AnalyticalSolution(
        name="patch",
        displacement=displacement,
        stress=stress,
        parameters=MappingProxyType({"offset": a.tolist(), "gradient": B.tolist()}),
    )


def _series_terms(nterms: int) -> tuple[np.ndarray, np.ndarray]:
    if nterms < 1:
        raise AnalysisError(f"nterms must be at least 1, got {nterms}")
    n = np.arange(1, nterms + 1, dtype=float)
    return n, np.where(n % 2 == 0, 1.0, -1.0)


def _hyperbolic_ratios(n: np.ndarray, x2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """sinh(n pi x2) / cosh(n pi) and cosh(n pi x2) / cosh(n pi) without overflow."""

    a = np.pi * n[None, :] * x2[:, None]
    b = np.pi * n[None, :]
    damping = 1.0 + np.exp(-2.0 * b)
    grow = np.exp(a - b)
    decay = np.exp(-a - b)
    return (grow - decay) / damping, (grow + decay) / damping


def beam_stress(
    points: np.ndarray,
    load: float = BEAM_LOAD,
    poisson_ratio: float = BEAM_POISSON_RATIO,
    nterms: int = BEAM_NTERMS,
) -> np.ndarray:
    """Stress 6-vectors of the end-loaded beam; only the 33, 23 and 31 entries are non-zero."""

    x = np.atleast_2d(np.asarray(points, dtype=float))
    x1, x2, x3 = x.T
    F, nu = load, poisson_ratio
    n, sign = _series_terms(nterms)
    sinh_ratio, cosh_ratio = _hyperbolic_ratios(n, x2)
    scale = 3.0 * F * nu / (2.0 * np.pi**2 * (1.0 + nu))
    coeff = sign / n**2

    angle = np.pi * n[None, :] * x1[:, None]
    s31 = scale * np.sum(coeff * np.sin(angle) * sinh_ratio, axis=1)
    s23 = (
        3.0 * F * (1.0 - x2**2) / 8.0
        + F * nu * (3.0 * x1**2 - 1.0) / (8.0 * (1.0 + nu))
        - scale * np.sum(coeff * np.cos(angle) * cosh_ratio, axis=1)
    )
    s33 = 3.0 * F * x2 * x3 / 4.0

    out = np.zeros((len(x), 6))
    out[:, 2] = s33
    out[:, 4] = s23
    out[:, 5] = s31
    return out


def beam_potential(
    points: np.ndarray,
    load: float = BEAM_LOAD,
    poisson_ratio: float = BEAM_POISSON_RATIO,
    nterms: int = BEAM_NTERMS,
) -> np.ndarray:
    """Warping function z(x1, x2) whose x2-derivative is the 23 shear stress."""

    x = np.atleast_2d(np.asarray(points, dtype=float))
    x1, x2 = x[:, 0], x[:, 1]
    F, nu = load, poisson_ratio
    n, sign = _series_terms(nterms)
    sinh_ratio, _ = _hyperbolic_ratios(n, x2)
    series = np.sum(
        (sign / n**3) * np.cos(np.pi * n[None, :] * x1[:, None]) * sinh_ratio, axis=1
    )
    return (
        3.0 * F * (x2 - x2**3 / 3.0) / 8.0
        + F * nu * (3.0 * x1**2 - 1.0) * x2 / (8.0 * (1.0 + nu))
        - 3.0 * F * nu / (2.0 * np.pi**3 * (1.0 + nu)) * series
    )


def beam_displacement(
    points: np.ndarray,
    load: float = BEAM_LOAD,
    youngs_modulus: float = BEAM_YOUNGS_MODULUS,
    poisson_ratio: float = BEAM_POISSON_RATIO,
    nterms: int = BEAM_NTERMS,
) -> np.ndarray:
    x = np.atleast_2d(np.asarray(points, dtype=float))
    x1, x2, x3 = x.T
    F, E, nu = load, youngs_modulus, poisson_ratio
    z = beam_potential(x, F, nu, nterms)

    u1 = -3.0 * F * nu * x1 * x2 * x3 / (4.0 * E)
    u2 = F / (8.0 * E) * (3.0 * nu * x3 * (x1**2 - x2**2) - x3**3)
    u3 = F / (8.0 * E) * (3.0 * x2 * x3**2 + nu * x2 * (x2**2 - 3.0 * x1**2)) + 2.0 * (
        1.0 + nu
    ) * z / E
    return np.column_stack((u1, u2, u3))


def beam_solution(
    load: float = BEAM_LOAD,
    length: float = BEAM_LENGTH,
    youngs_modulus: float = BEAM_YOUNGS_MODULUS,
    poisson_ratio: float = BEAM_POISSON_RATIO,
    nterms: int = BEAM_NTERMS,
) -> AnalyticalSolution:
    def displacement(points: np.ndarray) -> np.ndarray:
        return beam_displacement(points, load, youngs_modulus, poisson_ratio, nterms)

    def stress(points: np.ndarray) -> np.ndarray:
        return beam_stress(points, load, poisson_ratio, nterms)

    return AnalyticalSolution(
        name="beam",
        displacement=displacement,
        stress=stress,
        parameters=MappingProxyType(
            {
                "load": load,
                "length": length,
                "youngs_modulus": youngs_modulus,
                "poisson_ratio": poisson_ratio,
                "nterms": nterms,
            }
        ),
    )


def patch_problem(
    material: MaterialModel,
    gamma: float = 1.0,
    mode: MomentMode | str = MomentMode.NODAL,
    traction_tags: tuple[str, ...] = (),
) -> ProblemSpec:
    """Linear patch field: exact tractions on ``traction_tags``, exact
    displacements on every other box side."""

    exact = patch_solution(LINEAR_PATCH_OFFSET, LINEAR_PATCH_GRADIENT, material)
    traction_tags = tuple(str(tag) for tag in traction_tags)
    dirichlet_tags = tuple(str(side) for side in BoxSide if side not in traction_tags)
    return ProblemSpec(
        material=material,
        dirichlet=exact.displacement,
        dirichlet_tags=dirichlet_tags,
        gamma=gamma,
        mode=MomentMode(mode),
        tractions={tag: exact.traction for tag in traction_tags},
        exact=exact,
        name="patch",
    )


def beam_problem(
    load: float = BEAM_LOAD,
    length: float = BEAM_LENGTH,
    material: MaterialModel | None = None,
    gamma: float = 1.0,
    mode: MomentMode | str = MomentMode.NODAL,
    nterms: int = BEAM_NTERMS,
    traction: TractionMode = "exact",
    lateral: bool = False,
) -> ProblemSpec:
    """End-loaded beam on (-1, 1)^2 x (0, L); only isotropic materials apply."""

    if material is None:
        material = MaterialModel.isotropic(BEAM_YOUNGS_MODULUS, BEAM_POISSON_RATIO)
    if not material.is_isotropic:
        raise AnalysisError("the beam solution is only available for isotropic materials")
    _series_terms(nterms)
    exact = beam_solution(load, length, material.youngs_modulus, material.poisson_ratio, nterms)

    tractions: dict[str, TractionField] = {}
    if traction == "exact":
        tractions[BoxSide.ZMIN] = exact.traction
    elif traction == "uniform":
        uniform = np.array([0.0, -load / BEAM_SECTION_AREA, 0.0])

        def shear(points: np.ndarray, normals: np.ndarray) -> np.ndarray:
            return np.broadcast_to(uniform, np.shape(points)).copy()

        tractions[BoxSide.ZMIN] = shear
    else:
        raise AnalysisError(f"unknown beam traction mode {traction!r}")
    if lateral:
        for side in _LATERAL_SIDES:
            tractions[side] = exact.traction

    return ProblemSpec(
        material=material,
        dirichlet=exact.displacement,
        dirichlet_tags=(str(BoxSide.ZMAX),),
        gamma=gamma,
        mode=MomentMode(mode),
        tractions={str(tag): fn for tag, fn in tractions.items()},
        exact=exact,
        name="beam",
    )


__all__ = [
    "AnalyticalSolution",
    "BEAM_LENGTH",
    "BEAM_LOAD",
    "BEAM_NTERMS",
    "BEAM_POISSON_RATIO",
    "BEAM_YOUNGS_MODULUS",
    "LINEAR_PATCH_GRADIENT",
    "LINEAR_PATCH_OFFSET",
    "beam_displacement",
    "beam_potential",
    "beam_problem",
    "beam_solution",
    "beam_stress",
    "patch_problem",
    "patch_solution",
]
