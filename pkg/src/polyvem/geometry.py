"""Polyhedral mesh data model: faces, elements, connectivity and measures."""

from __future__ import annotations

import logging
from collections import defaultdict, deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from types import MappingProxyType
from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import pdist

from .constants import AREA_TOL, CLOSURE_TOL, PLANARITY_TOL
from .exceptions import GeometryError, MeshError

logger = logging.getLogger(__name__)


def _frozen(values: Iterable[float] | np.ndarray) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


def _diameter(points: np.ndarray) -> float:
    if len(points) < 2:
        return 0.0
    return float(pdist(points).max())


class FaceGeometry(NamedTuple):
    normal: np.ndarray
    area: float
    centroid: np.ndarray
    vertex_mean: np.ndarray
    diameter: float


class ElementMeasures(NamedTuple):
    volume: float
    centroid: np.ndarray
    vertex_mean: np.ndarray
    diameter: float


@dataclass(frozen=True, eq=False)
class Face:
    """Planar polygon; ``vertices`` run counter-clockwise about ``normal``."""

    vertices: tuple[int, ...]
    normal: np.ndarray
    area: float
    centroid: np.ndarray
    vertex_mean: np.ndarray
    diameter: float

    @property
    def size(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True, eq=False)
class Element:
    """Closed bundle of faces; ``signs[k] * normal`` of face k points outward."""

    faces: tuple[int, ...]
    signs: tuple[int, ...]
    vertices: tuple[int, ...]
    volume: float
    centroid: np.ndarray
    vertex_mean: np.ndarray
    diameter: float

    @property
    def size(self) -> int:
        return len(self.vertices)

    def local_indices(self) -> dict[int, int]:
        return {vertex: local for local, vertex in enumerate(self.vertices)}


@dataclass(frozen=True, eq=False)
class PolyMesh:
    """Immutable polyhedral mesh with face adjacency and boundary tags."""

    vertices: np.ndarray
    faces: tuple[Face, ...]
    elements: tuple[Element, ...]
    face_elements: tuple[tuple[int, ...], ...]
    boundary_tags: Mapping[int, str]

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def n_dofs(self) -> int:
        return 3 * len(self.vertices)

    @property
    def boundary_faces(self) -> tuple[int, ...]:
        return tuple(fid for fid, adj in enumerate(self.face_elements) if len(adj) == 1)

    @property
    def internal_faces(self) -> tuple[int, ...]:
        return tuple(fid for fid, adj in enumerate(self.face_elements) if len(adj) == 2)

    @property
    def tags(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.boundary_tags.values())))

    def faces_with_tag(self, tag: str) -> tuple[int, ...]:
        return tuple(sorted(fid for fid, value in self.boundary_tags.items() if value == tag))

    def vertices_on_tags(self, tags: Iterable[str]) -> np.ndarray:
        wanted = set(tags)
        found = {
            vertex
            for fid, tag in self.boundary_tags.items()
            if tag in wanted
            for vertex in self.faces[fid].vertices
        }
        return np.array(sorted(found), dtype=np.int64)

    def outward_normal(self, face_id: int) -> np.ndarray:
        """Outward unit normal of a boundary face with respect to its element."""

        adjacent = self.face_elements[face_id]
        if len(adjacent) != 1:
            raise MeshError(f"face {face_id} is internal; outward normal is ambiguous")
        element = self.elements[adjacent[0]]
        sign = element.signs[element.faces.index(face_id)]
        return sign * self.faces[face_id].normal

    def element_coords(self, element_id: int) -> np.ndarray:
        return self.vertices[list(self.elements[element_id].vertices)]

    @property
    def h_max(self) -> float:
        return max(element.diameter for element in self.elements)

    @property
    def h_mean(self) -> float:
        return float(np.mean([element.diameter for element in self.elements]))

    @property
    def diameter_range(self) -> tuple[float, float]:
        diameters = [element.diameter for element in self.elements]
        return min(diameters), max(diameters)

    @property
    def total_volume(self) -> float:
        return float(sum(element.volume for element in self.elements))


def face_geometry(loop: Sequence[int], vertices: np.ndarray) -> FaceGeometry:
    """Unit normal, area, area centroid and vertex mean of a planar polygon.

    The area is accumulated over the triangle fan about the vertex mean, which
    is exact for any planar polygon, convex or not. The normal follows the
    loop orientation (counter-clockwise about the returned normal).
    """

    loop = [int(v) for v in loop]
    if len(loop) < 3:
        raise GeometryError(f"face needs at least 3 vertices, got {len(loop)}")
    if len(set(loop)) != len(loop):
        raise GeometryError(f"face vertices must be distinct, got {loop}")

    points = np.asarray(vertices, dtype=float)[loop]
    vertex_mean = points.mean(axis=0)
    diameter = _diameter(points)
    relative = points - vertex_mean
    crosses = np.cross(relative, np.roll(relative, -1, axis=0))
    vector_area = 0.5 * crosses.sum(axis=0)
    area = float(np.linalg.norm(vector_area))
    if diameter == 0.0 or area <= AREA_TOL * diameter**2:
        raise GeometryError(f"degenerate face {loop}: area {area:.3e}")

    normal = vector_area / area
    offset = float(np.abs(relative @ normal).max())
    if offset > PLANARITY_TOL * diameter:
        raise GeometryError(
            f"non-planar face {loop}: out-of-plane offset {offset:.3e} "
            f"exceeds {PLANARITY_TOL:g} x diameter"
        )

    fan_areas = 0.5 * (crosses @ normal)
    fan_centroids = (vertex_mean + points + np.roll(points, -1, axis=0)) / 3.0
    centroid = fan_areas @ fan_centroids / fan_areas.sum()
    return FaceGeometry(normal, area, centroid, vertex_mean, diameter)


def _oriented_loop(loop: Sequence[int], sign: int) -> list[int]:
    return list(loop) if sign > 0 else list(reversed(loop))


def _volume_moments(
    loops: Sequence[Sequence[int]],
    signs: Sequence[int],
    vertices: np.ndarray,
    reference: np.ndarray,
) -> tuple[float, np.ndarray]:
    """Signed volume and first moment (about ``reference``) of a closed surface."""

    volume = 0.0
    moment = np.zeros(3)
    for loop, sign in zip(loops, signs):
        points = vertices[_oriented_loop(loop, sign)] - reference
        center = points.mean(axis=0)
        following = np.roll(points, -1, axis=0)
        tet_volumes = np.cross(points, following) @ center / 6.0
        volume += float(tet_volumes.sum())
        moment += tet_volumes @ ((center + points + following) / 4.0)
    return volume, moment


def element_measures(
    loops: Sequence[Sequence[int]],
    signs: Sequence[int],
    vertices: np.ndarray,
) -> ElementMeasures:
    """Volume, volume centroid and vertex mean of an outward-oriented element."""

    vertices = np.asarray(vertices, dtype=float)
    ids = sorted({int(v) for loop in loops for v in loop})
    points = vertices[ids]
    vertex_mean = points.mean(axis=0)
    volume, moment = _volume_moments(loops, signs, vertices, vertex_mean)
    if volume <= 0.0:
        raise GeometryError(
            f"non-positive element volume {volume:.3e}; face orientation is inverted"
        )
    centroid = vertex_mean + moment / volume
    return ElementMeasures(volume, centroid, vertex_mean, _diameter(points))


def _resolve_orientation(
    element_id: int,
    face_ids: Sequence[int],
    faces: Sequence[Face],
    vertices: np.ndarray,
) -> tuple[int, ...]:
    """Pick face signs so the element surface is consistently outward."""

    edge_uses: dict[tuple[int, int], list[tuple[int, int]]] = defaultdict(list)
    for local, fid in enumerate(face_ids):
        loop = faces[fid].vertices
        for a, b in zip(loop, loop[1:] + loop[:1]):
            key = (a, b) if a < b else (b, a)
            edge_uses[key].append((local, 1 if a < b else -1))

    links: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for edge, uses in edge_uses.items():
        if len(uses) != 2:
            raise MeshError(
                f"element {element_id} is not closed: edge {edge} is used by "
                f"{len(uses)} of its faces"
            )
        (k1, d1), (k2, d2) = uses
        links[k1].append((k2, -d1 * d2))
        links[k2].append((k1, -d1 * d2))

    signs = [0] * len(face_ids)
    signs[0] = 1
    queue = deque([0])
    while queue:
        current = queue.popleft()
        for other, relation in links[current]:
            wanted = signs[current] * relation
            if signs[other] == 0:
                signs[other] = wanted
                queue.append(other)
            elif signs[other] != wanted:
                raise MeshError(f"element {element_id} surface is not orientable")
    if 0 in signs:
        raise MeshError(f"element {element_id} surface is not connected")

    loops = [faces[fid].vertices for fid in face_ids]
    volume, _ = _volume_moments(loops, signs, vertices, vertices[loops[0][0]])
    if volume < 0.0:
        signs = [-s for s in signs]
    return tuple(signs)


def _make_element(
    element_id: int,
    face_ids: tuple[int, ...],
    signs: tuple[int, ...],
    faces: Sequence[Face],
    vertices: np.ndarray,
) -> Element:
    flux = np.zeros(3)
    surface = 0.0
    for fid, sign in zip(face_ids, signs):
        flux += sign * faces[fid].area * faces[fid].normal
        surface += faces[fid].area
    if np.linalg.norm(flux) > CLOSURE_TOL * surface:
        raise MeshError(
            f"element {element_id} surface is not closed: |sum |F| n| = "
            f"{np.linalg.norm(flux):.3e} for surface area {surface:.3e}"
        )

    loops = [faces[fid].vertices for fid in face_ids]
    try:
        measures = element_measures(loops, signs, vertices)
    except GeometryError as exc:
        raise GeometryError(f"element {element_id}: {exc}") from exc

    ids = tuple(sorted({v for loop in loops for v in loop}))
    return Element(
        faces=face_ids,
        signs=signs,
        vertices=ids,
        volume=measures.volume,
        centroid=_frozen(measures.centroid),
        vertex_mean=_frozen(measures.vertex_mean),
        diameter=measures.diameter,
    )


def build_connectivity(
    vertices: Sequence[Sequence[float]] | np.ndarray,
    faces: Sequence[Sequence[int]],
    elements: Sequence[Sequence[int]],
    boundary_tags: Mapping[int, str] | None = None,
    orientations: Sequence[Sequence[int]] | None = None,
) -> PolyMesh:
    """Validate raw mesh arrays and build a fully connected :class:`PolyMesh`.

    Face signs are resolved per element so that normals point outward; when
    ``orientations`` are supplied (as mesh files carry them) they must agree
    with the resolved signs.
    """

    coords = np.array(vertices, dtype=float)
    if coords.ndim != 2 or coords.shape[1] != 3:
        raise MeshError(f"vertices must have shape (N, 3), got {coords.shape}")
    if not np.isfinite(coords).all():
        raise GeometryError("vertex coordinates must be finite")
    coords.setflags(write=False)
    n_vertices = len(coords)

    face_objs: list[Face] = []
    used = np.zeros(n_vertices, dtype=bool)
    for fid, raw_loop in enumerate(faces):
        loop = tuple(int(v) for v in raw_loop)
        for vertex in loop:
            if vertex < 0 or vertex >= n_vertices:
                raise MeshError(
                    f"face {fid} references vertex {vertex} outside 0..{n_vertices - 1}"
                )
        try:
            geometry = face_geometry(loop, coords)
        except GeometryError as exc:
            raise GeometryError(f"face {fid}: {exc}") from exc
        used[list(loop)] = True
        face_objs.append(
            Face(
                vertices=loop,
                normal=_frozen(geometry.normal),
                area=geometry.area,
                centroid=_frozen(geometry.centroid),
                vertex_mean=_frozen(geometry.vertex_mean),
                diameter=geometry.diameter,
            )
        )

    orphans = np.flatnonzero(~used)
    if orphans.size:
        raise MeshError(f"orphan vertex {int(orphans[0])} is not used by any face")

    element_faces: list[tuple[int, ...]] = []
    adjacency: list[list[int]] = [[] for _ in face_objs]
    for eid, raw_faces in enumerate(elements):
        face_ids = tuple(int(f) for f in raw_faces)
        if len(set(face_ids)) != len(face_ids):
            raise MeshError(f"element {eid} lists a face more than once")
        for fid in face_ids:
            if fid < 0 or fid >= len(face_objs):
                raise MeshError(
                    f"element {eid} references face {fid} outside 0..{len(face_objs) - 1}"
                )
            adjacency[fid].append(eid)
        element_faces.append(face_ids)

    for fid, adjacent in enumerate(adjacency):
        if len(adjacent) > 2:
            raise MeshError(f"non-manifold face {fid}: shared by {len(adjacent)} elements")
        if not adjacent:
            raise MeshError(f"face {fid} belongs to no element")

    element_objs: list[Element] = []
    for eid, face_ids in enumerate(element_faces):
        signs = _resolve_orientation(eid, face_ids, face_objs, coords)
        if orientations is not None:
            supplied = tuple(int(s) for s in orientations[eid])
            if supplied != signs:
                raise MeshError(
                    f"element {eid}: supplied face orientations disagree with its "
                    "outward-oriented surface"
                )
        element_objs.append(_make_element(eid, face_ids, signs, face_objs, coords))

    for fid, adjacent in enumerate(adjacency):
        if len(adjacent) == 2:
            first, second = (element_objs[e] for e in adjacent)
            s1 = first.signs[first.faces.index(fid)]
            s2 = second.signs[second.faces.index(fid)]
            if s1 == s2:
                raise MeshError(
                    f"face {fid} has the same orientation in elements "
                    f"{adjacent[0]} and {adjacent[1]}; the elements overlap"
                )

    tags: dict[int, str] = {}
    for fid, tag in (boundary_tags or {}).items():
        fid = int(fid)
        if fid < 0 or fid >= len(face_objs):
            raise MeshError(f"boundary tag references face {fid} outside the mesh")
        if len(adjacency[fid]) != 1:
            raise MeshError(f"boundary tag {tag!r} is attached to internal face {fid}")
        tags[fid] = str(tag)

    mesh = PolyMesh(
        vertices=coords,
        faces=tuple(face_objs),
        elements=tuple(element_objs),
        face_elements=tuple(tuple(adj) for adj in adjacency),
        boundary_tags=MappingProxyType(tags),
    )
    logger.debug(
        "built mesh: %d vertices, %d faces (%d boundary), %d elements",
        mesh.n_vertices,
        mesh.n_faces,
        len(mesh.boundary_faces),
        mesh.n_elements,
    )
    return mesh


__all__ = [
    "Element",
    "ElementMeasures",
    "Face",
    "FaceGeometry",
    "PolyMesh",
    "build_connectivity",
    "element_measures",
    "face_geometry",
]
