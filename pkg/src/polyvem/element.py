"""First-order virtual element kernel.

Every matrix here is assembled from vertex coordinates and boundary face
moments only. Vertex blocks occupy rows ``3i .. 3i+2`` in the element's
local vertex order (``Element.vertices``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import MomentMode
from .exceptions import ElementError
from .geometry import Element, PolyMesh
from .material import MaterialModel
from .quadrature import face_phi_moments


@dataclass(frozen=True, eq=False)
class ElementOperators:
    vertices: tuple[int, ...]
    volume: float
    N_R: np.ndarray
    N_C: np.ndarray
    q: np.ndarray
    W_R: np.ndarray
    W_C: np.ndarray
    P_R: np.ndarray
    P_C: np.ndarray
    P_P: np.ndarray
    D: np.ndarray
    alpha_star: float
    gamma: float
    K: np.ndarray
    material: MaterialModel

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def dofs(self) -> np.ndarray:
        ids = np.asarray(self.vertices, dtype=np.int64)
        return (3 * ids[:, None] + np.arange(3)).ravel()


def mode_matrices(coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nodal values of the rigid (N_R) and constant-strain (N_C) modes."""

    coords = np.asarray(coords, dtype=float)
    n = len(coords)
    x1, x2, x3 = (coords - coords.mean(axis=0)).T
    zero = np.zeros(n)
    one = np.ones(n)

    # columns: translations 1..3, rotations (12), (23), (31)
    N_R = np.stack(
        [
            np.stack([one, zero, zero, x2, zero, -x3], axis=1),
            np.stack([zero, one, zero, -x1, x3, zero], axis=1),
            np.stack([zero, zero, one, zero, -x2, x1], axis=1),
        ],
        axis=1,
    ).reshape(3 * n, 6)
    # columns: strains 11, 22, 33, 12, 23, 31
    N_C = np.stack(
        [
            np.stack([x1, zero, zero, x2, zero, x3], axis=1),
            np.stack([zero, x2, zero, x1, x3, zero], axis=1),
            np.stack([zero, zero, x3, zero, x2, x1], axis=1),
        ],
        axis=1,
    ).reshape(3 * n, 6)
    return N_R, N_C


def q_vectors(
    element: Element,
    mesh: PolyMesh,
    mode: MomentMode | str = MomentMode.NODAL,
) -> np.ndarray:
    """q_i = (1 / 2|E|) sum over faces of (integral of phi_i) times the outward normal."""

    local = element.local_indices()
    q = np.zeros((element.size, 3))
    for fid, sign in zip(element.faces, element.signs):
        face = mesh.faces[fid]
        moments = face_phi_moments(face, mesh.vertices, mode)
        ids = [local[v] for v in face.vertices]
        q[ids] += sign * moments[:, None] * face.normal[None, :]
    return q / (2.0 * element.volume)


def weight_matrices(q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q = np.asarray(q, dtype=float)
    n = len(q)
    q1, q2, q3 = q.T
    zero = np.zeros(n)
    inv = np.full(n, 1.0 / n)

    W_R = np.stack(
        [
            np.stack([inv, zero, zero, q2, zero, -q3], axis=1),
            np.stack([zero, inv, zero, -q1, q3, zero], axis=1),
            np.stack([zero, zero, inv, zero, -q2, q1], axis=1),
        ],
        axis=1,
    ).reshape(3 * n, 6)
    W_C = np.stack(
        [
            np.stack([2.0 * q1, zero, zero, q2, zero, q3], axis=1),
            np.stack([zero, 2.0 * q2, zero, q1, q3, zero], axis=1),
            np.stack([zero, zero, 2.0 * q3, zero, q2, q1], axis=1),
        ],
        axis=1,
    ).reshape(3 * n, 6)
    return W_R, W_C


def projection_matrices(
    N_R: np.ndarray,
    N_C: np.ndarray,
    W_R: np.ndarray,
    W_C: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    P_R = N_R @ W_R.T
    P_C = N_C @ W_C.T
    return P_R, P_C, P_R + P_C


def alpha_star(volume: float, D: np.ndarray, N_C: np.ndarray) -> float:
    """Stabilisation scale |E| tr(D) / tr(N_C^T N_C)."""

    return float(volume * np.trace(D) / np.sum(N_C * N_C))


def element_operators(
    element: Element,
    mesh: PolyMesh,
    material: MaterialModel,
    gamma: float = 1.0,
    mode: MomentMode | str = MomentMode.NODAL,
) -> ElementOperators:
    if not gamma > 0.0:
        raise ElementError(f"stabilisation factor gamma must be positive, got {gamma}")

    N_R, N_C = mode_matrices(mesh.vertices[list(element.vertices)])
    q = q_vectors(element, mesh, mode)
    W_R, W_C = weight_matrices(q)
    P_R, P_C, P_P = projection_matrices(N_R, N_C, W_R, W_C)
    D = material.D
    scale = alpha_star(element.volume, D, N_C)

    residual = np.eye(3 * element.size) - P_P
    K = element.volume * (W_C @ D @ W_C.T) + gamma * scale * (residual.T @ residual)
    K = 0.5 * (K + K.T)

    for array in (N_R, N_C, q, W_R, W_C, P_R, P_C, P_P, K):
        array.setflags(write=False)
    return ElementOperators(
        vertices=element.vertices,
        volume=element.volume,
        N_R=N_R,
        N_C=N_C,
        q=q,
        W_R=W_R,
        W_C=W_C,
        P_R=P_R,
        P_C=P_C,
        P_P=P_P,
        D=D,
        alpha_star=scale,
        gamma=float(gamma),
        K=K,
        material=material,
    )


def element_stiffness(
    element: Element,
    mesh: PolyMesh,
    material: MaterialModel,
    gamma: float = 1.0,
    mode: MomentMode | str = MomentMode.NODAL,
) -> np.ndarray:
    return element_operators(element, mesh, material, gamma, mode).K


def element_average_stress(operators: ElementOperators, chi: np.ndarray) -> np.ndarray:
    """Element-constant stress from nodal displacements (3n,) or (n, 3)."""

    chi = np.asarray(chi, dtype=float).reshape(-1)
    if chi.size != 3 * operators.n:
        raise ElementError(
            f"expected {3 * operators.n} nodal displacement values, got {chi.size}"
        )
    strain = operators.W_C.T @ chi
    return operators.material.stress(strain)


def zero_mode_count(K: np.ndarray, rel_tol: float = 1e-10) -> int:
    eigenvalues = np.linalg.eigvalsh(np.asarray(K, dtype=float))
    scale = np.abs(eigenvalues).max()
    return int(np.count_nonzero(np.abs(eigenvalues) < rel_tol * scale))


def rigid_body_modes(coords: np.ndarray) -> np.ndarray:
    return mode_matrices(coords)[0]


def linear_field_modes(coords: np.ndarray) -> np.ndarray:
    """[N_R | N_C] for an arbitrary vertex set: every linear field, 12 columns."""

    return np.hstack(mode_matrices(coords))


__all__ = [
    "ElementOperators",
    "alpha_star",
    "element_average_stress",
    "element_operators",
    "element_stiffness",
    "linear_field_modes",
    "mode_matrices",
    "projection_matrices",
    "q_vectors",
    "rigid_body_modes",
    "weight_matrices",
    "zero_mode_count",
]
