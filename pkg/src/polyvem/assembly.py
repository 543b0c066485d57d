"""Global degrees of freedom, sparse assembly, Dirichlet elimination and solves."""

from __future__ import annotations

import logging
from collections.abc import Callable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Literal, NamedTuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .constants import MomentMode
from .element import ElementOperators, element_average_stress, element_operators
from .exceptions import AssemblyError, SingularSystemError, SolverError
from .geometry import PolyMesh
from .material import MaterialModel
from .quadrature import surface_nodal_rule, volume_nodal_rule

if TYPE_CHECKING:
    from .benchmarks import AnalyticalSolution

logger = logging.getLogger(__name__)

VectorField = Callable[[np.ndarray], np.ndarray]
TractionField = Callable[[np.ndarray, np.ndarray], np.ndarray]
SolverMethod = Literal["direct", "cg"]


@dataclass(frozen=True)
class DofMap:
    """Vertex ``i`` owns the consecutive global dofs ``3i, 3i+1, 3i+2``."""

    n_vertices: int

    @property
    def n_dofs(self) -> int:
        return 3 * self.n_vertices

    def dofs(self, vertices: Sequence[int] | np.ndarray) -> np.ndarray:
        ids = np.asarray(vertices, dtype=np.int64)
        if ids.size and (ids.min() < 0 or ids.max() >= self.n_vertices):
            raise AssemblyError(f"vertex index outside 0..{self.n_vertices - 1}")
        return (3 * ids[:, None] + np.arange(3)).ravel()

    def vertex_of(self, dof: int) -> tuple[int, int]:
        if not 0 <= dof < self.n_dofs:
            raise AssemblyError(f"dof {dof} outside 0..{self.n_dofs - 1}")
        return divmod(int(dof), 3)


@dataclass(frozen=True)
class ProblemSpec:
    """Material, loads and displacement constraints of one boundary value problem.

    ``tractions`` maps a boundary tag to a field ``t(x, n)`` evaluated at
    face vertices with the face's outward normal. ``dirichlet`` is imposed at
    every vertex touching a face tagged with one of ``dirichlet_tags``.
    """

    material: MaterialModel
    dirichlet: VectorField
    dirichlet_tags: tuple[str, ...]
    gamma: float = 1.0
    mode: MomentMode = MomentMode.NODAL
    body_force: VectorField | None = None
    tractions: Mapping[str, TractionField] = field(default_factory=dict)
    exact: AnalyticalSolution | None = None
    name: str = "custom"


@dataclass(frozen=True, eq=False)
class SparseSystem:
    stiffness: sp.csr_matrix
    load: np.ndarray

    @property
    def n_dofs(self) -> int:
        return self.stiffness.shape[0]


@dataclass(frozen=True, eq=False)
class ConstrainedSystem:
    """Reduced system on the free dofs after symmetric elimination."""

    matrix: sp.csr_matrix
    rhs: np.ndarray
    free_dofs: np.ndarray
    fixed_dofs: np.ndarray
    fixed_values: np.ndarray
    n_dofs: int

    def expand(self, free_values: np.ndarray) -> np.ndarray:
        full = np.zeros(self.n_dofs)
        full[self.free_dofs] = free_values
        full[self.fixed_dofs] = self.fixed_values
        return full


class SolveResult(NamedTuple):
    displacement: np.ndarray
    residual: float
    iterations: int


@dataclass(frozen=True, eq=False)
class Solution:
    mesh: PolyMesh
    problem: ProblemSpec
    displacement: np.ndarray
    stress: np.ndarray
    operators: tuple[ElementOperators, ...]
    residual: float
    n_free: int

    @property
    def n_dofs(self) -> int:
        return self.mesh.n_dofs


def compute_operators(
    mesh: PolyMesh,
    material: MaterialModel,
    gamma: float = 1.0,
    mode: MomentMode | str = MomentMode.NODAL,
    workers: int = 1,
) -> tuple[ElementOperators, ...]:
    """Element operators for every element, returned in element order."""

    def build(element_id: int) -> ElementOperators:
        return element_operators(mesh.elements[element_id], mesh, material, gamma, mode)

    ids = range(mesh.n_elements)
    if workers <= 1:
        return tuple(map(build, ids))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return tuple(pool.map(build, ids))


def assemble_stiffness(
    mesh: PolyMesh,
    material: MaterialModel,
    gamma: float = 1.0,
    mode: MomentMode | str = MomentMode.NODAL,
    workers: int = 1,
    operators: Sequence[ElementOperators] | None = None,
) -> sp.csr_matrix:
    if operators is None:
        operators = compute_operators(mesh, material, gamma, mode, workers)
    if len(operators) != mesh.n_elements:
        raise AssemblyError(
            f"got {len(operators)} element operators for {mesh.n_elements} elements"
        )

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    data: list[np.ndarray] = []
    for ops in operators:
        dofs = ops.dofs
        rows.append(np.repeat(dofs, dofs.size))
        cols.append(np.tile(dofs, dofs.size))
        data.append(ops.K.ravel())

    n = mesh.n_dofs
    K = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ).tocsr()
    K = ((K + K.T) * 0.5).tocsr()
    K.sort_indices()
    logger.debug("assembled stiffness: %d dofs, %d stored entries", n, K.nnz)
    return K


def assemble_load(mesh: PolyMesh, problem: ProblemSpec) -> np.ndarray:
    """Nodal-quadrature load vector from body forces and boundary tractions."""

    dof_map = DofMap(mesh.n_vertices)
    load = np.zeros(dof_map.n_dofs)

    if problem.body_force is not None:
        for element in mesh.elements:
            rule = volume_nodal_rule(element, mesh)
            points = mesh.vertices[list(rule.vertices)]
            values = np.asarray(problem.body_force(points), dtype=float).reshape(-1, 3)
            np.add.at(load, dof_map.dofs(rule.vertices), (rule.weights[:, None] * values).ravel())

    for tag, traction in problem.tractions.items():
        face_ids = mesh.faces_with_tag(tag)
        if not face_ids:
            logger.warning("no boundary faces carry traction tag %r", tag)
        for fid in face_ids:
            rule = surface_nodal_rule(mesh.faces[fid], mesh.vertices)
            points = mesh.vertices[list(rule.vertices)]
            normals = np.broadcast_to(mesh.outward_normal(fid), points.shape)
            values = np.asarray(traction(points, normals), dtype=float).reshape(-1, 3)
            np.add.at(load, dof_map.dofs(rule.vertices), (rule.weights[:, None] * values).ravel())
    return load


def assemble_system(
    mesh: PolyMesh,
    problem: ProblemSpec,
    operators: Sequence[ElementOperators] | None = None,
    workers: int = 1,
) -> SparseSystem:
    K = assemble_stiffness(
        mesh, problem.material, problem.gamma, problem.mode, workers, operators
    )
    return SparseSystem(stiffness=K, load=assemble_load(mesh, problem))


def apply_dirichlet(
    system: SparseSystem,
    mesh: PolyMesh,
    displacement: VectorField,
    tags: Sequence[str],
) -> ConstrainedSystem:
    """Fix every dof of vertices on ``tags`` faces and eliminate them symmetrically."""

    vertices = mesh.vertices_on_tags(tags)
    if vertices.size == 0:
        raise SingularSystemError(
            f"no vertices lie on the displacement boundary {sorted(tags)}; "
            "the system would be singular"
        )
    dof_map = DofMap(mesh.n_vertices)
    fixed = dof_map.dofs(vertices)
    values = np.asarray(displacement(mesh.vertices[vertices]), dtype=float).reshape(-1)
    if values.size != fixed.size:
        raise AssemblyError(
            f"displacement field returned {values.size} values for {fixed.size} fixed dofs"
        )

    mask = np.ones(system.n_dofs, dtype=bool)
    mask[fixed] = False
    free = np.flatnonzero(mask)

    K = system.stiffness.tocsr()
    K_free = K[free][:, free].tocsr()
    coupling = K[free][:, fixed]
    rhs = system.load[free] - coupling @ values
    logger.debug("constrained %d of %d dofs", fixed.size, system.n_dofs)
    return ConstrainedSystem(
        matrix=K_free,
        rhs=rhs,
        free_dofs=free,
        fixed_dofs=fixed,
        fixed_values=values,
        n_dofs=system.n_dofs,
    )


def _relative_residual(matrix: sp.spmatrix, x: np.ndarray, rhs: np.ndarray) -> float:
    scale = np.linalg.norm(rhs)
    residual = np.linalg.norm(matrix @ x - rhs)
    return float(residual / scale) if scale > 0.0 else float(residual)


def solve(
    constrained: ConstrainedSystem,
    method: SolverMethod = "direct",
    tol: float = 1e-10,
) -> SolveResult:
    """Solve the reduced system and expand to the full dof vector."""

    A = constrained.matrix
    b = constrained.rhs
    if b.size == 0:
        return SolveResult(constrained.expand(b), 0.0, 0)
    if not np.any(b):
        return SolveResult(constrained.expand(np.zeros_like(b)), 0.0, 0)

    iterations = 0
    if method == "direct":
        try:
            lu = spla.splu(A.tocsc())
        except RuntimeError as exc:
            raise SolverError(f"sparse factorisation failed: {exc}") from exc
        x = lu.solve(b)
        residual = _relative_residual(A, x, b)
        # iterative refinement against round-off in badly scaled systems
        while residual > tol and iterations < 3:
            x = x + lu.solve(b - A @ x)
            residual = _relative_residual(A, x, b)
            iterations += 1
    elif method == "cg":
        diagonal = A.diagonal()
        if np.any(diagonal <= 0.0):
            raise SolverError("conjugate gradients needs a positive diagonal")
        preconditioner = sp.diags(1.0 / diagonal)
        counter = {"n": 0}

        def count(_: np.ndarray) -> None:
            counter["n"] += 1

        x, info = spla.cg(
            A,
            b,
            rtol=0.1 * tol,
            atol=0.0,
            maxiter=20 * b.size,
            M=preconditioner,
            callback=count,
        )
        iterations = counter["n"]
        residual = _relative_residual(A, x, b)
        if info < 0:
            raise SolverError("conjugate gradients broke down", residual=residual)
    else:
        raise SolverError(f"unknown solver method {method!r}")

    if not np.isfinite(residual) or residual > tol:
        raise SolverError(
            f"{method} solve reached relative residual {residual:.3e} > {tol:.1e}",
            residual=residual,
        )
    logger.info("%s solve: relative residual %.3e (%d iterations)", method, residual, iterations)
    return SolveResult(constrained.expand(x), residual, iterations)


def solve_problem(
    mesh: PolyMesh,
    problem: ProblemSpec,
    method: SolverMethod = "direct",
    tol: float = 1e-10,
    workers: int = 1,
) -> Solution:
    operators = compute_operators(mesh, problem.material, problem.gamma, problem.mode, workers)
    system = assemble_system(mesh, problem, operators)
    constrained = apply_dirichlet(system, mesh, problem.dirichlet, problem.dirichlet_tags)
    result = solve(constrained, method, tol)

    displacement = result.displacement.reshape(-1, 3)
    stress = np.array(
        [element_average_stress(ops, displacement[list(ops.vertices)]) for ops in operators]
    ).reshape(-1, 6)
    logger.debug(
        "solved %s: %d elements, %d dofs (%d free)",
        problem.name,
        mesh.n_elements,
        mesh.n_dofs,
        constrained.free_dofs.size,
    )
    return Solution(
        mesh=mesh,
        problem=problem,
        displacement=displacement,
        stress=stress,
        operators=operators,
        residual=result.residual,
        n_free=int(constrained.free_dofs.size),
    )


__all__ = [
    "ConstrainedSystem",
    "DofMap",
    "ProblemSpec",
    "Solution",
    "SolveResult",
    "SolverMethod",
    "SparseSystem",
    "apply_dirichlet",
    "assemble_load",
    "assemble_stiffness",
    "assemble_system",
    "compute_operators",
    "solve",
    "solve_problem",
]
