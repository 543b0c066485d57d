"""Legacy ASCII VTK output with polyhedron (type 42) cells."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .constants import VOIGT_LABELS
from .exceptions import PolyVemError
from .geometry import PolyMesh

VTK_POLYHEDRON = 42
STRESS_COMPONENTS = tuple(f"s{label}" for label in VOIGT_LABELS)


def _number(value: float) -> str:
    return format(float(value), ".17g")


def polyhedron_stream(mesh: PolyMesh, element_id: int) -> list[int]:
    """Face stream ``[n_faces, m_0, ids..., m_1, ids...]`` with outward loops."""

    element = mesh.elements[element_id]
    stream = [len(element.faces)]
    for fid, sign in zip(element.faces, element.signs):
        loop = list(mesh.faces[fid].vertices)
        if sign < 0:
            loop.reverse()
        stream.append(len(loop))
        stream.extend(loop)
    return stream


def render_vtk(
    mesh: PolyMesh,
    displacement: np.ndarray | None = None,
    cell_stress: np.ndarray | None = None,
    title: str = "polyvem solution",
) -> str:
    lines = [
        "# vtk DataFile Version 4.2",
        title.replace("\n", " ")[:255],
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {mesh.n_vertices} double",
    ]
    lines.extend(" ".join(_number(c) for c in point) for point in mesh.vertices)

    streams = [polyhedron_stream(mesh, e) for e in range(mesh.n_elements)]
    size = sum(len(stream) + 1 for stream in streams)
    lines.append(f"CELLS {mesh.n_elements} {size}")
    lines.extend(" ".join(map(str, [len(stream), *stream])) for stream in streams)
    lines.append(f"CELL_TYPES {mesh.n_elements}")
    lines.extend([str(VTK_POLYHEDRON)] * mesh.n_elements)

    if displacement is not None:
        values = np.asarray(displacement, dtype=float).reshape(-1, 3)
        if len(values) != mesh.n_vertices:
            raise PolyVemError(
                f"displacement has {len(values)} rows for {mesh.n_vertices} vertices"
            )
        lines.append(f"POINT_DATA {mesh.n_vertices}")
        lines.append("VECTORS displacement double")
        lines.extend(" ".join(_number(c) for c in row) for row in values)

    if cell_stress is not None:
        values = np.asarray(cell_stress, dtype=float).reshape(-1, 6)
        if len(values) != mesh.n_elements:
            raise PolyVemError(
                f"stress has {len(values)} rows for {mesh.n_elements} elements"
            )
        lines.append(f"CELL_DATA {mesh.n_elements}")
        lines.append(f"FIELD FieldData {1 + len(STRESS_COMPONENTS)}")
        lines.append(f"stress 6 {mesh.n_elements} double")
        lines.extend(" ".join(_number(c) for c in row) for row in values)
        for name, column in zip(STRESS_COMPONENTS, values.T):
            lines.append(f"{name} 1 {mesh.n_elements} double")
            lines.extend(_number(c) for c in column)

    return "\n".join(lines) + "\n"


def write_vtk(
    path: str | Path,
    mesh: PolyMesh,
    displacement: np.ndarray | None = None,
    cell_stress: np.ndarray | None = None,
) -> Path:
    """Write the mesh with optional point displacements and cell stresses.

    Stress goes out as one six-component ``stress`` array plus one scalar
    array per entry of ``STRESS_COMPONENTS``.
    """

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_vtk(mesh, displacement, cell_stress), encoding="ascii")
    return path

__all__ = ["STRESS_COMPONENTS", "VTK_POLYHEDRON", "polyhedron_stream", "render_vtk", "write_vtk"]
