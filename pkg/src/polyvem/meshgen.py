"""Built-in mesh sources: structured bricks, clipped Voronoi cells and Lloyd CVT."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.spatial import Delaunay, QhullError, cKDTree
from scipy.spatial.distance import pdist

from .constants import AREA_TOL, MERGE_TOL, BoxSide
from .exceptions import GeometryError, MeshError
from .geometry import PolyMesh, build_connectivity, element_measures, face_geometry

logger = logging.getLogger(__name__)

# plane classification tolerance relative to the box diagonal
_CLIP_TOL = 1e-12

# corner index i + 2j + 4k; loops run counter-clockwise about the outward normal
_BOX_FACE_LOOPS: dict[BoxSide, tuple[int, int, int, int]] = {
    BoxSide.XMIN: (0, 4, 6, 2),
    BoxSide.XMAX: (1, 3, 7, 5),
    BoxSide.YMIN: (0, 1, 5, 4),
    BoxSide.YMAX: (2, 6, 7, 3),
    BoxSide.ZMIN: (0, 2, 3, 1),
    BoxSide.ZMAX: (4, 5, 7, 6),
}


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``[lo, hi]``."""

    lo: tuple[float, float, float]
    hi: tuple[float, float, float]

    def __post_init__(self) -> None:
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != 3 or len(hi) != 3:
            raise MeshError("box bounds need three coordinates each")
        if not all(np.isfinite(lo + hi)) or any(b <= a for a, b in zip(lo, hi)):
            raise MeshError(f"invalid box bounds lo={lo} hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def unit(cls) -> Box:
        return cls((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))

    @classmethod
    def parse(cls, text: str) -> Box:
        """Parse ``"x0,x1,y0,y1,z0,z1"``."""

        try:
            values = [float(part) for part in text.split(",")]
        except ValueError:
            raise MeshError(f"box must be six comma-separated numbers, got {text!r}") from None
        if len(values) != 6:
            raise MeshError(f"box must be six comma-separated numbers, got {text!r}")
        return cls((values[0], values[2], values[4]), (values[1], values[3], values[5]))

    @property
    def extent(self) -> np.ndarray:
        return np.subtract(self.hi, self.lo)

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.extent))

    @property
    def volume(self) -> float:
        return float(np.prod(self.extent))

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (np.asarray(self.lo) + np.asarray(self.hi))

    def corners(self) -> np.ndarray:
        bits = np.array([[i & 1, (i >> 1) & 1, (i >> 2) & 1] for i in range(8)], dtype=bool)
        return np.where(bits, self.hi, self.lo)

    def strictly_contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        return np.all((points > self.lo) & (points < self.hi), axis=1)


@dataclass(frozen=True, eq=False)
class SeedSet:
    """Voronoi generators strictly inside a box."""

    box: Box
    points: np.ndarray
    rng_seed: int | None = None

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=float).reshape(-1, 3)
        if len(points) == 0:
            raise MeshError("a seed set needs at least one seed")
        outside = np.flatnonzero(~self.box.strictly_contains(points))
        if outside.size:
            raise MeshError(f"seed {int(outside[0])} lies outside the box")
        pairs = cKDTree(points).query_pairs(MERGE_TOL * self.box.diagonal, output_type="ndarray")
        if len(pairs):
            a, b = sorted(int(v) for v in pairs[0])
            raise MeshError(f"duplicate seeds {a} and {b}")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @classmethod
    def random(cls, box: Box, n: int, seed: int | None = 0) -> SeedSet:
        if n < 1:
            raise MeshError(f"seed count must be at least 1, got {n}")
        rng = np.random.default_rng(seed)
        return cls(box, rng.uniform(box.lo, box.hi, size=(n, 3)), rng_seed=seed)

    def __len__(self) -> int:
        return len(self.points)


def hex_mesh(
    box: Box,
    nx: int,
    ny: int,
    nz: int,
    distortion: float = 0.0,
    seed: int | None = None,
) -> PolyMesh:
    """Structured brick mesh with faces tagged by box side.

    ``distortion`` moves every vertex by up to that fraction of the local
    spacing; boundary vertices move only within their box faces. Quads that
    end up non-planar are split into two triangles.
    """

    counts = (nx, ny, nz)
    if any(int(c) != c or c < 1 for c in counts):
        raise MeshError(f"subdivisions must be positive integers, got {counts}")
    if not 0.0 <= distortion < 0.5:
        raise MeshError(f"distortion must lie in [0, 0.5), got {distortion}")
    nx, ny, nz = (int(c) for c in counts)

    axes = [np.linspace(lo, hi, n + 1) for lo, hi, n in zip(box.lo, box.hi, (nx, ny, nz))]
    grids = np.meshgrid(*axes, indexing="ij")
    vertices = np.column_stack([g.ravel(order="F") for g in grids])

    if distortion > 0.0:
        rng = np.random.default_rng(seed)
        spacing = box.extent / np.array([nx, ny, nz])
        shift = rng.uniform(-1.0, 1.0, size=vertices.shape) * distortion * spacing
        lattice = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1), np.arange(nz + 1), indexing="ij")
        index = np.column_stack([g.ravel(order="F") for g in lattice])
        on_boundary = (index == 0) | (index == np.array([nx, ny, nz]))
        shift[on_boundary] = 0.0
        vertices = vertices + shift

    def v(i: int, j: int, k: int) -> int:
        return i + (nx + 1) * (j + (ny + 1) * k)

    faces: list[list[int]] = []
    tags: dict[int, str] = {}
    split_count = 0

    def add_face(loop: list[int], tag: str | None) -> list[int]:
        nonlocal split_count
        try:
            face_geometry(loop, vertices)
            pieces = [loop]
        except GeometryError:
            pieces = [[loop[0], loop[1], loop[2]], [loop[0], loop[2], loop[3]]]
            split_count += 1
        ids = []
        for piece in pieces:
            if tag is not None:
                tags[len(faces)] = tag
            ids.append(len(faces))
            faces.append(piece)
        return ids

    x_faces: dict[tuple[int, int, int], list[int]] = {}
    for k in range(nz):
        for j in range(ny):
            for i in range(nx + 1):
                tag = BoxSide.XMIN if i == 0 else BoxSide.XMAX if i == nx else None
                loop = [v(i, j, k), v(i, j + 1, k), v(i, j + 1, k + 1), v(i, j, k + 1)]
                x_faces[i, j, k] = add_face(loop, tag)
    y_faces: dict[tuple[int, int, int], list[int]] = {}
    for k in range(nz):
        for j in range(ny + 1):
            for i in range(nx):
                tag = BoxSide.YMIN if j == 0 else BoxSide.YMAX if j == ny else None
                loop = [v(i, j, k), v(i, j, k + 1), v(i + 1, j, k + 1), v(i + 1, j, k)]
                y_faces[i, j, k] = add_face(loop, tag)
    z_faces: dict[tuple[int, int, int], list[int]] = {}
    for k in range(nz + 1):
        for j in range(ny):
            for i in range(nx):
                tag = BoxSide.ZMIN if k == 0 else BoxSide.ZMAX if k == nz else None
                loop = [v(i, j, k), v(i + 1, j, k), v(i + 1, j + 1, k), v(i, j + 1, k)]
                z_faces[i, j, k] = add_face(loop, tag)

    elements: list[list[int]] = []
    for k in range(nz):
        for j in range(ny):
            for i in range(nx):
                elements.append(
                    x_faces[i, j, k]
                    + x_faces[i + 1, j, k]
                    + y_faces[i, j, k]
                    + y_faces[i, j + 1, k]
                    + z_faces[i, j, k]
                    + z_faces[i, j, k + 1]
                )

    if split_count:
        logger.info("split %d non-planar quads into triangles", split_count)
    return build_connectivity(vertices, faces, elements, tags)


FaceLabel = Union[int, BoxSide]


class _Cell(NamedTuple):
    points: np.ndarray
    faces: list[tuple[FaceLabel, list[int]]]


def _plane_basis(normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    seed = np.eye(3)[int(np.argmin(np.abs(normal)))]
    u = np.cross(seed, normal)
    u /= np.linalg.norm(u)
    return u, np.cross(normal, u)


def _clip(
    points: list[np.ndarray],
    faces: list[tuple[FaceLabel, list[int]]],
    normal: np.ndarray,
    offset: float,
    label: FaceLabel,
    eps: float,
) -> list[tuple[FaceLabel, list[int]]]:
    """Cut a convex cell with the half-space ``normal . x <= offset``.

    ``points`` grows in place with the new edge crossings; the returned face
    list includes the cap polygon on the cutting plane.
    """

    coords = np.asarray(points)
    distance = coords @ normal - offset
    used = sorted({v for _, loop in faces for v in loop})
    if not np.any(distance[used] > eps):
        return faces
    if np.all(distance[used] > -eps):
        raise MeshError("half-space clipping removed an entire cell")

    crossings: dict[tuple[int, int], int] = {}

    def crossing(a: int, b: int) -> int:
        key = (a, b) if a < b else (b, a)
        if key not in crossings:
            p, q = coords[key[0]], coords[key[1]]
            t = distance[key[0]] / (distance[key[0]] - distance[key[1]])
            points.append(p + t * (q - p))
            crossings[key] = len(points) - 1
        return crossings[key]

    clipped: list[tuple[FaceLabel, list[int]]] = []
    cap: set[int] = set()
    coplanar = False
    for face_label, loop in faces:
        kept: list[int] = []
        for a, b in zip(loop, loop[1:] + loop[:1]):
            out_a, out_b = distance[a] > eps, distance[b] > eps
            if not out_a:
                kept.append(a)
                if distance[a] >= -eps:
                    cap.add(a)
            if out_a != out_b:
                inside = b if out_a else a
                if distance[inside] < -eps:
                    index = crossing(a, b)
                    kept.append(index)
                    cap.add(index)
        if len(kept) >= 3:
            clipped.append((face_label, kept))
            if all(v < len(distance) and abs(distance[v]) <= eps for v in kept):
                coplanar = True

    if len(cap) >= 3 and not coplanar:
        ids = sorted(cap)
        ring = np.asarray(points)[ids]
        centre = ring.mean(axis=0)
        u, w = _plane_basis(normal)
        angles = np.arctan2((ring - centre) @ w, (ring - centre) @ u)
        clipped.append((label, [ids[k] for k in np.argsort(angles, kind="stable")]))
    return clipped


def _candidate_neighbours(points: np.ndarray) -> list[np.ndarray]:
    n = len(points)
    everyone = [np.delete(np.arange(n), i) for i in range(n)]
    if n < 5:
        return everyone
    try:
        indptr, indices = Delaunay(points).vertex_neighbor_vertices
    except QhullError:
        logger.info("Delaunay neighbour search failed; clipping against all seeds")
        return everyone
    return [np.asarray(indices[indptr[i] : indptr[i + 1]]) for i in range(n)]


def _clip_cell(index: int, points: np.ndarray, neighbours: np.ndarray, box: Box) -> _Cell:
    eps = _CLIP_TOL * box.diagonal
    cell_points = list(box.corners())
    faces: list[tuple[FaceLabel, list[int]]] = [
        (side, list(loop)) for side, loop in _BOX_FACE_LOOPS.items()
    ]
    seed = points[index]
    order = np.argsort(np.linalg.norm(points[neighbours] - seed, axis=1), kind="stable")
    for j in neighbours[order]:
        direction = points[j] - seed
        normal = direction / np.linalg.norm(direction)
        offset = float(normal @ (0.5 * (points[j] + seed)))
        faces = _clip(cell_points, faces, normal, offset, int(j), eps)
    return _Cell(np.asarray(cell_points), faces)


def _clip_cells(box: Box, points: np.ndarray, workers: int = 1) -> list[_Cell]:
    neighbours = _candidate_neighbours(points)

    def build(index: int) -> _Cell:
        return _clip_cell(index, points, neighbours[index], box)

    if workers <= 1:
        return [build(i) for i in range(len(points))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(build, range(len(points))))


def _cell_centroid(cell: _Cell) -> np.ndarray:
    loops = [loop for _, loop in cell.faces]
    return element_measures(loops, [1] * len(loops), cell.points).centroid


def _dedupe_loop(loop: list[int]) -> list[int]:
    out: list[int] = []
    for v in loop:
        if not out or out[-1] != v:
            out.append(v)
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def _is_sliver(loop: list[int], vertices: np.ndarray) -> bool:
    if len(loop) < 3 or len(set(loop)) != len(loop):
        return True
    points = vertices[loop]
    relative = points - points.mean(axis=0)
    area = 0.5 * np.linalg.norm(np.cross(relative, np.roll(relative, -1, axis=0)).sum(axis=0))
    diameter = float(pdist(points).max())
    return area <= AREA_TOL * diameter**2


def voronoi_mesh(box: Box, seeds: SeedSet | np.ndarray, workers: int = 1) -> PolyMesh:
    """Voronoi diagram of ``seeds`` restricted to ``box``.

    Each cell is the box cut by the bisector half-spaces of its Delaunay
    neighbours. Coincident vertices from neighbouring cells are merged
    within a tolerance of the box diagonal and a face shared by two cells
    takes its vertex loop from the lower-numbered cell.
    """

    if not isinstance(seeds, SeedSet):
        seeds = SeedSet(box, seeds)
    cells = _clip_cells(box, seeds.points, workers)

    sizes = [len(cell.points) for cell in cells]
    offsets = np.concatenate(([0], np.cumsum(sizes)))
    stacked = np.vstack([cell.points for cell in cells])
    pairs = cKDTree(stacked).query_pairs(MERGE_TOL * box.diagonal, output_type="ndarray")
    graph = sp.coo_matrix(
        (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])) if len(pairs) else ([], ([], [])),
        shape=(len(stacked), len(stacked)),
    )
    _, components = connected_components(graph, directed=False)
    labels, first = np.unique(components, return_index=True)
    ranking = np.argsort(first, kind="stable")
    renumber = np.empty(len(labels), dtype=np.int64)
    renumber[labels[ranking]] = np.arange(len(labels))
    merged_ids = renumber[components]
    merged = stacked[first[ranking]]

    faces: list[list[int]] = []
    tags: dict[int, str] = {}
    shared: dict[tuple[int, int], int] = {}
    elements: list[list[int]] = []
    dropped = 0
    for i, cell in enumerate(cells):
        element: list[int] = []
        for label, loop in cell.faces:
            global_loop = _dedupe_loop([int(merged_ids[offsets[i] + v]) for v in loop])
            if isinstance(label, BoxSide):
                if _is_sliver(global_loop, merged):
                    dropped += 1
                    continue
                tags[len(faces)] = str(label)
                element.append(len(faces))
                faces.append(global_loop)
                continue
            key = (min(i, label), max(i, label))
            if key in shared:
                fid = shared[key]
                if set(faces[fid]) != set(global_loop):
                    logger.warning(
                        "cells %d and %d disagree on their shared face vertices", *key
                    )
                element.append(fid)
                continue
            if _is_sliver(global_loop, merged):
                dropped += 1
                continue
            shared[key] = len(faces)
            element.append(len(faces))
            faces.append(global_loop)
        elements.append(element)

    if dropped:
        logger.info("dropped %d sliver faces while merging Voronoi cells", dropped)

    used = np.unique(np.concatenate([np.asarray(loop) for loop in faces]))
    compact = np.full(len(merged), -1, dtype=np.int64)
    compact[used] = np.arange(len(used))
    faces = [[int(compact[v]) for v in loop] for loop in faces]
    mesh = build_connectivity(merged[used], faces, elements, tags)
    logger.debug("voronoi mesh: %d cells, %d faces", mesh.n_elements, mesh.n_faces)
    return mesh


class LloydResult(NamedTuple):
    points: np.ndarray
    movements: list[float]


def lloyd_relaxation(
    box: Box,
    points: np.ndarray,
    max_iters: int = 50,
    tol: float = 1e-4,
    workers: int = 1,
) -> LloydResult:
    """Move seeds to their cell centroids until the largest step is below
    ``tol`` times the box diagonal or ``max_iters`` steps have run."""

    current = SeedSet(box, points).points.copy()
    movements: list[float] = []
    for iteration in range(max_iters):
        cells = _clip_cells(box, current, workers)
        updated = np.array([_cell_centroid(cell) for cell in cells])
        movement = float(np.linalg.norm(updated - current, axis=1).max())
        movements.append(movement)
        current = updated
        logger.info("lloyd iteration %d: max seed movement %.3e", iteration + 1, movement)
        if movement < tol * box.diagonal:
            break
    return LloydResult(current, movements)


def cvt_mesh(
    box: Box,
    n: int,
    max_iters: int = 50,
    seed: int | None = 0,
    tol: float = 1e-4,
    workers: int = 1,
) -> PolyMesh:
    seeds = SeedSet.random(box, n, seed)
    relaxed = lloyd_relaxation(box, seeds.points, max_iters, tol, workers)
    return voronoi_mesh(box, SeedSet(box, relaxed.points, rng_seed=seed), workers)


def random_voronoi_mesh(box: Box, n: int, seed: int | None = 0, workers: int = 1) -> PolyMesh:
    return voronoi_mesh(box, SeedSet.random(box, n, seed), workers)


__all__ = [
    "Box",
    "LloydResult",
    "SeedSet",
    "cvt_mesh",
    "hex_mesh",
    "lloyd_relaxation",
    "random_voronoi_mesh",
    "voronoi_mesh",
]
