from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from polyvem import PolyMesh, PolyVemError
from polyvem.geometry import face_geometry
from polyvem.vtk import STRESS_COMPONENTS, polyhedron_stream, render_vtk, write_vtk

from tests.helpers.meshes import two_bricks


def _section(lines: list[str], header: str, count: int) -> list[str]:
    start = next(i for i, line in enumerate(lines) if line.startswith(header))
    return lines[start + 1 : start + 1 + count]


def test_cube_layout(cube_mesh: PolyMesh) -> None:
    lines = render_vtk(cube_mesh).splitlines()

    assert lines[0] == "# vtk DataFile Version 4.2"
    assert lines[2:5] == ["ASCII", "DATASET UNSTRUCTURED_GRID", "POINTS 8 double"]
    assert "CELLS 1 32" in lines
    assert _section(lines, "CELL_TYPES", 1) == ["42"]
    assert not any(line.startswith(("POINT_DATA", "CELL_DATA")) for line in lines)


def test_point_and_cell_data(cube_mesh: PolyMesh) -> None:
    displacement = np.arange(24, dtype=float).reshape(8, 3) / 4.0
    stress = np.array([[1.0, 2.0, 3.0, 0.5, 0.25, 0.125]])
    lines = render_vtk(cube_mesh, displacement, stress).splitlines()

    assert "POINT_DATA 8" in lines
    assert _section(lines, "VECTORS displacement double", 2) == ["0 0.25 0.5", "0.75 1 1.25"]
    assert lines[lines.index("CELL_DATA 1") + 1] == "FIELD FieldData 7"
    assert _section(lines, "stress 6 1 double", 1) == ["1 2 3 0.5 0.25 0.125"]
    assert STRESS_COMPONENTS == ("s11", "s22", "s33", "s12", "s23", "s31")
    assert _section(lines, "s33 1 1 double", 1) == ["3"]
    assert _section(lines, "s31 1 1 double", 1) == ["0.125"]


def test_wrong_row_counts_are_rejected(cube_mesh: PolyMesh) -> None:
    with pytest.raises(PolyVemError, match="displacement has 7 rows for 8 vertices"):
        render_vtk(cube_mesh, np.zeros((7, 3)))
    with pytest.raises(PolyVemError, match="stress has 2 rows for 1 elements"):
        render_vtk(cube_mesh, cell_stress=np.zeros((2, 6)))


def test_face_streams_point_outward() -> None:
    mesh = two_bricks()
    for eid, element in enumerate(mesh.elements):
        stream = polyhedron_stream(mesh, eid)
        assert stream[0] == len(element.faces)
        cursor = 1
        for _ in range(stream[0]):
            size = stream[cursor]
            loop = stream[cursor + 1 : cursor + 1 + size]
            cursor += size + 1
            geometry = face_geometry(loop, mesh.vertices)
            assert geometry.normal @ (geometry.centroid - element.centroid) > 0.0
        assert cursor == len(stream)


def test_write_vtk_creates_parent(tmp_path: Path, nonconvex_mesh: PolyMesh) -> None:
    path = write_vtk(tmp_path / "out" / "solution.vtk", nonconvex_mesh)
    text = path.read_text(encoding="ascii")

    assert f"CELL_TYPES {nonconvex_mesh.n_elements}" in text
    size = sum(len(polyhedron_stream(nonconvex_mesh, e)) + 1 for e in range(4))
    assert f"CELLS 4 {size}" in text
