from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from polyvem import GeometryError, MeshError, PolyMesh, build_connectivity
from polyvem.geometry import element_measures, face_geometry

from tests.helpers.meshes import TETRAHEDRON_FACES, TETRAHEDRON_VERTICES, tetrahedron

SQUARE = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]])


def test_face_geometry_of_unit_square() -> None:
    geometry = face_geometry([0, 1, 2, 3], SQUARE)

    assert_allclose(geometry.normal, [0.0, 0.0, 1.0])
    assert geometry.area == pytest.approx(1.0)
    assert_allclose(geometry.centroid, [0.5, 0.5, 0.0])
    assert geometry.diameter == pytest.approx(np.sqrt(2.0))


def test_face_normal_follows_loop_orientation() -> None:
    assert_allclose(face_geometry([3, 2, 1, 0], SQUARE).normal, [0.0, 0.0, -1.0])


def test_area_centroid_differs_from_vertex_mean_on_irregular_polygon() -> None:
    vertices = np.array([[0.0, 0.0, 0.0], [4.0, 0.0, 0.0], [4.0, 1.0, 0.0], [0.0, 3.0, 0.0]])
    geometry = face_geometry([0, 1, 2, 3], vertices)

    # trapezoid with parallel sides 3 and 1 at x = 0 and x = 4
    assert geometry.area == pytest.approx(8.0)
    assert geometry.centroid[0] == pytest.approx(4.0 * (3.0 + 2.0) / (3.0 * 4.0))
    assert_allclose(geometry.vertex_mean, [2.0, 1.0, 0.0])


@pytest.mark.parametrize(
    ("points", "message"),
    [
        ([[0, 0, 0], [1, 0, 0], [1, 1, 0.1], [0, 1, 0]], "non-planar"),
        ([[0, 0, 0], [1, 0, 0], [2, 0, 0]], "degenerate"),
    ],
)
def test_face_geometry_rejects_bad_polygons(points: list[list[float]], message: str) -> None:
    with pytest.raises(GeometryError, match=message):
        face_geometry(list(range(len(points))), np.array(points, dtype=float))


def test_unit_cube_measures(cube_mesh: PolyMesh) -> None:
    (element,) = cube_mesh.elements

    assert element.volume == pytest.approx(1.0)
    assert_allclose(element.centroid, [0.5, 0.5, 0.5])
    assert element.diameter == pytest.approx(np.sqrt(3.0))
    assert cube_mesh.n_dofs == 24
    assert len(cube_mesh.boundary_faces) == 6
    assert cube_mesh.internal_faces == ()
    assert cube_mesh.tags == ("xmax", "xmin", "ymax", "ymin", "zmax", "zmin")


def test_outward_normals_point_away_from_the_element(cube_mesh: PolyMesh) -> None:
    (zmin,) = cube_mesh.faces_with_tag("zmin")
    assert_allclose(cube_mesh.outward_normal(zmin), [0.0, 0.0, -1.0])

    element = cube_mesh.elements[0]
    for fid in element.faces:
        normal = cube_mesh.outward_normal(fid)
        assert normal @ (cube_mesh.faces[fid].centroid - element.centroid) > 0.0


def test_tetrahedron_volume_and_centroid() -> None:
    mesh = tetrahedron()

    assert mesh.elements[0].volume == pytest.approx(1.0 / 6.0)
    assert_allclose(mesh.elements[0].centroid, [0.25, 0.25, 0.25])


def test_orientation_is_resolved_from_any_loop_direction() -> None:
    flipped = [list(reversed(loop)) if i % 2 else loop for i, loop in enumerate(TETRAHEDRON_FACES)]
    mesh = build_connectivity(TETRAHEDRON_VERTICES, flipped, [[0, 1, 2, 3]])

    assert mesh.elements[0].volume == pytest.approx(1.0 / 6.0)
    assert mesh.elements[0].signs == (1, -1, 1, -1)


def test_nonconvex_fixture_volumes(nonconvex_mesh: PolyMesh) -> None:
    volumes = [element.volume for element in nonconvex_mesh.elements]

    assert_allclose(volumes, [0.225, 0.225, 0.275, 0.275])
    assert nonconvex_mesh.total_volume == pytest.approx(1.0)
    assert len(nonconvex_mesh.internal_faces) == 6


def test_shared_faces_have_opposite_signs(nonconvex_mesh: PolyMesh) -> None:
    for fid in nonconvex_mesh.internal_faces:
        first, second = (nonconvex_mesh.elements[e] for e in nonconvex_mesh.face_elements[fid])
        assert first.signs[first.faces.index(fid)] == -second.signs[second.faces.index(fid)]


def test_element_measures_matches_element(nonconvex_mesh: PolyMesh) -> None:
    element = nonconvex_mesh.elements[0]
    loops = [nonconvex_mesh.faces[fid].vertices for fid in element.faces]
    measures = element_measures(loops, element.signs, nonconvex_mesh.vertices)

    assert measures.volume == pytest.approx(0.225)
    # region under a V-shaped roof: mean of roof height squared over twice the area
    assert_allclose(measures.centroid, [0.5, 0.25, 0.105 / 0.45])


def test_mesh_arrays_are_read_only(cube_mesh: PolyMesh) -> None:
    with pytest.raises(ValueError):
        cube_mesh.vertices[0, 0] = 5.0
    with pytest.raises(TypeError):
        cube_mesh.boundary_tags[0] = "other"  # type: ignore[index]


def test_vertices_on_tags_collects_face_vertices(cube_mesh: PolyMesh) -> None:
    assert cube_mesh.vertices_on_tags(["zmin"]).tolist() == [0, 1, 2, 3]
    assert cube_mesh.vertices_on_tags(["zmin", "zmax"]).size == 8


@pytest.mark.parametrize(
    ("faces", "elements", "message"),
    [
        (TETRAHEDRON_FACES, [[0, 1, 2, 3, 0]], "more than once"),
        (TETRAHEDRON_FACES, [[0, 1, 2]], "belongs to no element"),
        (TETRAHEDRON_FACES[:3], [[0, 1, 2]], "not closed"),
        (TETRAHEDRON_FACES, [[0, 1, 2, 7]], "outside"),
    ],
)
def test_build_connectivity_rejects_broken_topology(
    faces: list[list[int]], elements: list[list[int]], message: str
) -> None:
    with pytest.raises(MeshError, match=message):
        build_connectivity(TETRAHEDRON_VERTICES, faces, elements)


def test_orphan_vertices_are_rejected() -> None:
    vertices = np.vstack([TETRAHEDRON_VERTICES, [[5.0, 5.0, 5.0]]])
    with pytest.raises(MeshError, match="orphan vertex 4"):
        build_connectivity(vertices, TETRAHEDRON_FACES, [[0, 1, 2, 3]])


def test_non_manifold_face_is_rejected() -> None:
    with pytest.raises(MeshError, match="non-manifold face 0: shared by 3 elements"):
        build_connectivity(
            TETRAHEDRON_VERTICES, TETRAHEDRON_FACES, [[0, 1, 2, 3]] * 3
        )


def test_supplied_orientations_must_match() -> None:
    with pytest.raises(MeshError, match="disagree"):
        build_connectivity(
            TETRAHEDRON_VERTICES,
            TETRAHEDRON_FACES,
            [[0, 1, 2, 3]],
            orientations=[[-1, -1, -1, -1]],
        )


def test_boundary_tags_only_on_boundary_faces() -> None:
    mesh_faces = TETRAHEDRON_FACES
    with pytest.raises(MeshError, match="outside the mesh"):
        build_connectivity(TETRAHEDRON_VERTICES, mesh_faces, [[0, 1, 2, 3]], {9: "xmin"})
