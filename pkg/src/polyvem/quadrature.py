"""Nodal surface/volume rules, face moments of the boundary basis, and cell rules.

The nodal rules place all weight at polytope vertices and integrate linear
fields exactly as long as face fans are built about area centroids and
element cones about volume centroids. The cell rule is a conical-product
Gauss rule applied to the same tetrahedral decomposition.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .constants import MomentMode
from .exceptions import QuadratureError
from .geometry import Element, Face, PolyMesh

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class NodalRule:
    """Weights attached to global vertex ids."""

    vertices: tuple[int, ...]
    weights: np.ndarray

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def integrate(self, values: np.ndarray) -> np.ndarray | float:
        """Apply the rule to per-vertex values of shape (m,) or (m, k)."""

        result = self.weights @ np.asarray(values, dtype=float)
        return float(result) if np.ndim(result) == 0 else result


@dataclass(frozen=True, eq=False)
class CellRule:
    """Volumetric points and weights over one element."""

    points: np.ndarray
    weights: np.ndarray

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def integrate(self, values: np.ndarray) -> np.ndarray | float:
        result = self.weights @ np.asarray(values, dtype=float)
        return float(result) if np.ndim(result) == 0 else result


def _face_fan_areas(face: Face, vertices: np.ndarray) -> np.ndarray:
    """Signed areas of the fan triangles (x^F, p_j, p_j+1) in face-local 2D coordinates."""

    normal = face.normal
    # any vector not parallel to the normal seeds the in-plane frame
    seed = np.eye(3)[int(np.argmin(np.abs(normal)))]
    e1 = np.cross(seed, normal)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(normal, e1)

    relative = vertices[list(face.vertices)] - face.centroid
    local = np.column_stack((relative @ e1, relative @ e2))
    following = np.roll(local, -1, axis=0)
    areas = 0.5 * (local[:, 0] * following[:, 1] - local[:, 1] * following[:, 0])
    if np.any(areas <= 0.0):
        raise QuadratureError(
            f"face {list(face.vertices)} is not star-shaped with respect to its area centroid"
        )
    return areas


def surface_nodal_rule(face: Face, vertices: np.ndarray) -> NodalRule:
    """Vertex weights of a face: each vertex owns the quadrilateral spanned by
    itself, its two adjacent edge midpoints and the area centroid."""

    areas = _face_fan_areas(face, np.asarray(vertices, dtype=float))
    weights = 0.5 * (areas + np.roll(areas, 1))
    weights.setflags(write=False)
    return NodalRule(vertices=face.vertices, weights=weights)


def face_phi_moments(
    face: Face,
    vertices: np.ndarray,
    mode: MomentMode | str = MomentMode.NODAL,
) -> np.ndarray:
    """Integrals of every vertex basis function over ``face``, in loop order."""

    mode = MomentMode(mode)
    vertices = np.asarray(vertices, dtype=float)
    if mode is MomentMode.NODAL:
        return surface_nodal_rule(face, vertices).weights.copy()

    points = vertices[list(face.vertices)]
    chords = np.roll(points, -1, axis=0) - np.roll(points, 1, axis=0)
    edge_normals = np.cross(chords, face.normal)
    shift = face.centroid - face.vertex_mean
    return face.area / face.size + 0.5 * (edge_normals @ shift)


def face_phi_moment(
    face: Face,
    vertices: np.ndarray,
    vertex: int,
    mode: MomentMode | str = MomentMode.NODAL,
) -> float:
    try:
        local = face.vertices.index(vertex)
    except ValueError:
        raise QuadratureError(f"vertex {vertex} is not on face {list(face.vertices)}") from None
    return float(face_phi_moments(face, vertices, mode)[local])


def _oriented_loop(element: Element, position: int, mesh: PolyMesh) -> list[int]:
    loop = list(mesh.faces[element.faces[position]].vertices)
    return loop if element.signs[position] > 0 else loop[::-1]


def volume_nodal_rule(element: Element, mesh: PolyMesh) -> NodalRule:
    """Corner-polyhedron volumes of an element, one per vertex.

    Every fan tetrahedron (x^E, x^F, p_j, p_j+1) gives half of its volume to
    each of its two polytope vertices.
    """

    vertices = mesh.vertices
    local = element.local_indices()
    weights = np.zeros(element.size)
    apex = element.centroid
    for position, fid in enumerate(element.faces):
        loop = _oriented_loop(element, position, mesh)
        points = vertices[loop] - apex
        following = np.roll(points, -1, axis=0)
        base = mesh.faces[fid].centroid - apex
        volumes = np.cross(points, following) @ base / 6.0
        if np.any(volumes <= 0.0):
            raise QuadratureError(
                f"negative corner volume on face {fid}: element is not star-shaped "
                "with respect to its centroid"
            )
        ids = np.array([local[v] for v in loop])
        np.add.at(weights, ids, 0.5 * volumes)
        np.add.at(weights, np.roll(ids, -1), 0.5 * volumes)
    weights.setflags(write=False)
    return NodalRule(vertices=element.vertices, weights=weights)


@lru_cache(maxsize=16)
def reference_tetrahedron_rule(points_per_axis: int) -> tuple[np.ndarray, np.ndarray]:
    """Collapsed Gauss-Jacobi rule on the unit tetrahedron.

    Exact for polynomials of total degree ``2 * points_per_axis - 1``; the
    weights sum to 1/6.
    """

    if points_per_axis < 1:
        raise QuadratureError("points_per_axis must be at least 1")
    xa, wa = roots_jacobi(points_per_axis, 2.0, 0.0)
    xb, wb = roots_jacobi(points_per_axis, 1.0, 0.0)
    xc, wc = roots_jacobi(points_per_axis, 0.0, 0.0)
    a, b, c = (0.5 * (x + 1.0) for x in (xa, xb, xc))
    wa, wb, wc = wa / 8.0, wb / 4.0, wc / 2.0

    A, B, C = np.meshgrid(a, b, c, indexing="ij")
    WA, WB, WC = np.meshgrid(wa, wb, wc, indexing="ij")
    points = np.column_stack(
        (
            A.ravel(),
            (B * (1.0 - A)).ravel(),
            (C * (1.0 - A) * (1.0 - B)).ravel(),
        )
    )
    weights = (WA * WB * WC).ravel()
    points.setflags(write=False)
    weights.setflags(write=False)
    return points, weights


def high_order_cell_rule(element: Element, mesh: PolyMesh, degree: int = 4) -> CellRule:
    """Gauss rule over the element's face-fan tetrahedra coned to its centroid."""

    if degree < 4:
        raise QuadratureError(f"cell rule degree must be at least 4, got {degree}")
    ref_points, ref_weights = reference_tetrahedron_rule(math.ceil((degree + 1) / 2))

    apex = element.centroid
    corners: list[np.ndarray] = []
    for position, fid in enumerate(element.faces):
        loop = _oriented_loop(element, position, mesh)
        points = mesh.vertices[loop]
        following = np.roll(points, -1, axis=0)
        center = np.broadcast_to(mesh.faces[fid].centroid, points.shape)
        corners.append(np.stack((center, points, following), axis=1))
    tets = np.concatenate(corners)  # (t, 3, 3): x^F, p_j, p_j+1

    edges = tets - apex
    jacobians = np.linalg.det(edges)
    if np.any(jacobians <= 0.0):
        raise QuadratureError(
            "non-positive sub-tetrahedron volume: element is not star-shaped "
            "with respect to its centroid"
        )
    points = apex + np.einsum("qk,tkd->tqd", ref_points, edges).reshape(-1, 3)
    weights = (jacobians[:, None] * ref_weights[None, :]).ravel()
    return CellRule(points=points, weights=weights)


__all__ = [
    "CellRule",
    "NodalRule",
    "face_phi_moment",
    "face_phi_moments",
    "high_order_cell_rule",
    "reference_tetrahedron_rule",
    "surface_nodal_rule",
    "volume_nodal_rule",
]
