"""JSON mesh documents.

A document carries ``version``, ``vertices`` (``[x, y, z]`` lists), ``faces``
(vertex index loops), ``elements`` (signed face references ``±(face id + 1)``,
positive when the face normal points out of the element) and
``boundary_tags`` (face id string to tag). Floats are written in their
shortest round-trip decimal form.
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from pathlib import Path
from typing import TypeAlias, TypedDict, cast

from .exceptions import MeshError, MeshFormatError
from .geometry import PolyMesh, build_connectivity

MESH_FORMAT_VERSION = 1

Coordinates: TypeAlias = list[float]


class MeshDocument(TypedDict):
    version: int
    vertices: list[Coordinates]
    faces: list[list[int]]
    elements: list[list[int]]
    boundary_tags: dict[str, str]


class MeshCodec:
    @staticmethod
    def to_document(mesh: PolyMesh) -> MeshDocument:
        return {
            "version": MESH_FORMAT_VERSION,
            "vertices": mesh.vertices.tolist(),
            "faces": [list(face.vertices) for face in mesh.faces],
            "elements": [
                [sign * (fid + 1) for fid, sign in zip(element.faces, element.signs)]
                for element in mesh.elements
            ],
            "boundary_tags": {
                str(fid): mesh.boundary_tags[fid] for fid in sorted(mesh.boundary_tags)
            },
        }

    @staticmethod
    def encode(mesh: PolyMesh) -> str:
        return json.dumps(MeshCodec.to_document(mesh), separators=(",", ":"), ensure_ascii=False)

    @staticmethod
    def decode(text: str) -> PolyMesh:
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MeshFormatError(
                f"Invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
            ) from exc
        return MeshCodec.from_document(payload)

    @staticmethod
    def from_document(value: object) -> PolyMesh:
        document = _validate_document(value)
        faces = document["faces"]
        face_ids = [[abs(ref) - 1 for ref in element] for element in document["elements"]]
        signs = [[1 if ref > 0 else -1 for ref in element] for element in document["elements"]]
        tags = {int(key): tag for key, tag in document["boundary_tags"].items()}
        return build_connectivity(document["vertices"], faces, face_ids, tags, orientations=signs)


def _is_number(value: object) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_int(value: object) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _validate_document(value: object) -> MeshDocument:
    if not isinstance(value, Mapping):
        raise MeshFormatError("Mesh document must be an object")

    missing = [
        key
        for key in ("version", "vertices", "faces", "elements", "boundary_tags")
        if key not in value
    ]
    if missing:
        raise MeshFormatError(f"Mesh document is missing field {missing[0]!r}")
    if value["version"] != MESH_FORMAT_VERSION:
        raise MeshFormatError(
            f"Unsupported mesh version {value['version']!r}; expected {MESH_FORMAT_VERSION}"
        )

    vertices = value["vertices"]
    if not isinstance(vertices, list):
        raise MeshFormatError("vertices must be a list")
    for index, point in enumerate(vertices):
        if not isinstance(point, list) or len(point) != 3 or not all(map(_is_number, point)):
            raise MeshFormatError(f"vertices[{index}] must be a list of three numbers")

    faces = value["faces"]
    if not isinstance(faces, list):
        raise MeshFormatError("faces must be a list")
    for index, loop in enumerate(faces):
        if not isinstance(loop, list) or not all(map(_is_int, loop)):
            raise MeshFormatError(f"faces[{index}] must be a list of vertex indices")
        for vertex in loop:
            if not 0 <= vertex < len(vertices):
                raise MeshFormatError(
                    f"faces[{index}] references vertex {vertex} but the mesh has "
                    f"{len(vertices)} vertices"
                )

    elements = value["elements"]
    if not isinstance(elements, list):
        raise MeshFormatError("elements must be a list")
    for index, refs in enumerate(elements):
        if not isinstance(refs, list) or not refs or not all(map(_is_int, refs)):
            raise MeshFormatError(f"elements[{index}] must be a non-empty list of face references")
        for ref in refs:
            if ref == 0 or abs(ref) > len(faces):
                raise MeshFormatError(
                    f"elements[{index}] has face reference {ref}; expected ±1..±{len(faces)}"
                )

    tags = value["boundary_tags"]
    if not isinstance(tags, Mapping):
        raise MeshFormatError("boundary_tags must be an object")
    for key, tag in tags.items():
        if not isinstance(key, str) or not key.isdigit():
            raise MeshFormatError(f"boundary_tags key {key!r} must be a face id")
        if int(key) >= len(faces):
            raise MeshFormatError(f"boundary_tags[{key!r}] references a missing face")
        if not isinstance(tag, str) or not tag:
            raise MeshFormatError(f"boundary_tags[{key!r}] must be a non-empty string")

    return cast(MeshDocument, dict(value))


def read_mesh(path: str | Path) -> PolyMesh:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MeshFormatError(f"cannot read mesh file {path}: {exc}") from exc
    try:
        return MeshCodec.decode(text)
    except (MeshError, MeshFormatError) as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def write_mesh(mesh: PolyMesh, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(MeshCodec.encode(mesh) + "\n", encoding="utf-8")
    return path


__all__ = ["MESH_FORMAT_VERSION", "MeshCodec", "MeshDocument", "read_mesh", "write_mesh"]
