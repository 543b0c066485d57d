from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from polyvem import (
    AssemblyError,
    Box,
    MaterialModel,
    PolyMesh,
    SingularSystemError,
    SolverError,
    apply_dirichlet,
    assemble_load,
    assemble_stiffness,
    assemble_system,
    hex_mesh,
    patch_problem,
    solve,
    solve_problem,
)
from polyvem.assembly import DofMap, ProblemSpec, compute_operators
from polyvem.element import rigid_body_modes, zero_mode_count

from tests.helpers.meshes import two_bricks


def _zero(points: np.ndarray) -> np.ndarray:
    return np.zeros_like(points)


def test_dof_map_blocks() -> None:
    dof_map = DofMap(4)

    assert dof_map.n_dofs == 12
    assert dof_map.dofs([0, 2]).tolist() == [0, 1, 2, 6, 7, 8]
    assert dof_map.vertex_of(7) == (2, 1)
    with pytest.raises(AssemblyError):
        dof_map.dofs([4])
    with pytest.raises(AssemblyError):
        dof_map.vertex_of(12)


def test_global_stiffness_is_symmetric_and_annihilates_rigid_motion(
    material: MaterialModel,
) -> None:
    mesh = hex_mesh(Box.unit(), 2, 2, 2, distortion=0.2, seed=4)
    K = assemble_stiffness(mesh, material)

    assert K.shape == (mesh.n_dofs, mesh.n_dofs)
    assert abs(K - K.T).max() == 0.0
    assert_allclose(K @ rigid_body_modes(mesh.vertices), 0.0, atol=1e-12)


def test_two_bricks_leave_only_rigid_modes(material: MaterialModel) -> None:
    K = assemble_stiffness(two_bricks(), material).toarray()

    assert K.shape == (36, 36)
    assert zero_mode_count(K) == 6


def test_parallel_operators_match_serial(nonconvex_mesh: PolyMesh, material: MaterialModel) -> None:
    serial = compute_operators(nonconvex_mesh, material, workers=1)
    threaded = compute_operators(nonconvex_mesh, material, workers=3)

    assert [ops.vertices for ops in serial] == [ops.vertices for ops in threaded]
    for a, b in zip(serial, threaded):
        assert_allclose(a.K, b.K)


def test_uniform_traction_load_sums_to_resultant(cube_mesh: PolyMesh, material: MaterialModel) -> None:
    traction = np.array([0.0, -0.25, 0.5])
    problem = ProblemSpec(
        material=material,
        dirichlet=_zero,
        dirichlet_tags=("zmax",),
        tractions={"zmin": lambda points, normals: np.broadcast_to(traction, points.shape)},
    )
    load = assemble_load(cube_mesh, problem).reshape(-1, 3)

    assert_allclose(load.sum(axis=0), traction)
    assert_allclose(load[[0, 1, 2, 3]], np.tile(traction / 4.0, (4, 1)))
    assert not load[4:].any()


def test_body_force_load_integrates_over_volume(
    nonconvex_mesh: PolyMesh, material: MaterialModel
) -> None:
    problem = ProblemSpec(
        material=material,
        dirichlet=_zero,
        dirichlet_tags=("zmin",),
        body_force=lambda points: np.column_stack(
            (np.ones(len(points)), points[:, 0], np.zeros(len(points)))
        ),
    )
    load = assemble_load(nonconvex_mesh, problem).reshape(-1, 3)

    assert_allclose(load.sum(axis=0), [1.0, 0.5, 0.0], atol=1e-13)


def test_dirichlet_elimination_keeps_symmetry(material: MaterialModel) -> None:
    mesh = hex_mesh(Box.unit(), 2, 2, 2)
    problem = patch_problem(material)
    constrained = apply_dirichlet(
        assemble_system(mesh, problem), mesh, problem.dirichlet, problem.dirichlet_tags
    )

    # only the centre vertex of a 2x2x2 brick mesh is free
    assert constrained.free_dofs.size == 3
    assert constrained.fixed_dofs.size == mesh.n_dofs - 3
    assert abs(constrained.matrix - constrained.matrix.T).max() == 0.0


def test_missing_displacement_boundary_is_singular(
    cube_mesh: PolyMesh, material: MaterialModel
) -> None:
    problem = ProblemSpec(material=material, dirichlet=_zero, dirichlet_tags=("nowhere",))
    system = assemble_system(cube_mesh, problem)

    with pytest.raises(SingularSystemError, match="no vertices"):
        apply_dirichlet(system, cube_mesh, _zero, ("nowhere",))


@pytest.mark.parametrize("method", ["direct", "cg"])
def test_patch_field_is_recovered_to_round_off(method: str, material: MaterialModel) -> None:
    mesh = hex_mesh(Box.unit(), 3, 3, 3, distortion=0.2, seed=1)
    problem = patch_problem(material)
    solution = solve_problem(mesh, problem, method=method, tol=1e-12)

    assert_allclose(
        solution.displacement, problem.exact.displacement(mesh.vertices), atol=1e-11
    )
    assert_allclose(solution.stress, problem.exact.stress(mesh.vertices[:1]).repeat(27, 0), atol=1e-10)
    assert solution.residual <= 1e-12
    assert solution.n_free == 3 * 8


def test_unknown_solver_method_is_rejected(material: MaterialModel) -> None:
    mesh = hex_mesh(Box.unit(), 2, 2, 2)
    problem = patch_problem(material)
    constrained = apply_dirichlet(
        assemble_system(mesh, problem), mesh, problem.dirichlet, problem.dirichlet_tags
    )

    with pytest.raises(SolverError, match="unknown solver method"):
        solve(constrained, method="qr")  # type: ignore[arg-type]


def test_operator_count_must_match_mesh(nonconvex_mesh: PolyMesh, material: MaterialModel) -> None:
    operators = compute_operators(nonconvex_mesh, material)[:2]
    with pytest.raises(AssemblyError, match="2 element operators for 4 elements"):
        assemble_stiffness(nonconvex_mesh, material, operators=operators)
