from __future__ import annotations

from pathlib import Path

import numpy as np

from polyvem import Box, PolyMesh, build_connectivity, hex_mesh, read_mesh
from polyvem.geometry import Face, face_geometry
from polyvem.meshgen import cvt_mesh, random_voronoi_mesh

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
NONCONVEX_CUBE = FIXTURES / "nonconvex_cube.json"

ELEMENT_MESHES = [
    "cube_mesh",
    "stretched_mesh",
    "voronoi_cell_mesh",
    "cvt_cell_mesh",
    "nonconvex_mesh",
]

TETRAHEDRON_VERTICES = np.array(
    [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
)
TETRAHEDRON_FACES = [[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]]


def make_face(loop: list[int], vertices: np.ndarray) -> Face:
    geometry = face_geometry(loop, vertices)
    return Face(
        vertices=tuple(loop),
        normal=geometry.normal,
        area=geometry.area,
        centroid=geometry.centroid,
        vertex_mean=geometry.vertex_mean,
        diameter=geometry.diameter,
    )


def tetrahedron() -> PolyMesh:
    return build_connectivity(TETRAHEDRON_VERTICES, TETRAHEDRON_FACES, [[0, 1, 2, 3]])


def unit_cube() -> PolyMesh:
    return hex_mesh(Box.unit(), 1, 1, 1)


def nonconvex_cube() -> PolyMesh:
    return read_mesh(NONCONVEX_CUBE)


def two_bricks() -> PolyMesh:
    """Unit cube split at x = 0.5 into two bricks sharing one face."""

    return hex_mesh(Box.unit(), 2, 1, 1)


def stretched_hex() -> PolyMesh:
    """Two 10 x 2 x 1 bricks."""

    return hex_mesh(Box.parse("0,20,0,2,0,1"), 2, 1, 1)


def voronoi_cells() -> PolyMesh:
    return random_voronoi_mesh(Box.unit(), 12, seed=8)


def cvt_cells() -> PolyMesh:
    return cvt_mesh(Box.unit(), 12, max_iters=10, seed=8)


def translated(mesh: PolyMesh, offset: np.ndarray) -> PolyMesh:
    return build_connectivity(
        mesh.vertices + np.asarray(offset, dtype=float),
        [face.vertices for face in mesh.faces],
        [element.faces for element in mesh.elements],
    )
