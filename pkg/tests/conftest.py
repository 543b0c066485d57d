from __future__ import annotations

import pytest

from polyvem import MaterialModel, PolyMesh

from tests.helpers.meshes import cvt_cells, nonconvex_cube, stretched_hex, unit_cube, voronoi_cells


@pytest.fixture
def material() -> MaterialModel:
    return MaterialModel.isotropic(1.0, 0.3)


@pytest.fixture
def cube_mesh() -> PolyMesh:
    return unit_cube()


@pytest.fixture
def nonconvex_mesh() -> PolyMesh:
    return nonconvex_cube()


@pytest.fixture
def stretched_mesh() -> PolyMesh:
    return stretched_hex()


@pytest.fixture(scope="session")
def voronoi_cell_mesh() -> PolyMesh:
    return voronoi_cells()


@pytest.fixture(scope="session")
def cvt_cell_mesh() -> PolyMesh:
    return cvt_cells()


@pytest.fixture(autouse=True)
def _isolate_workers_env(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("POLYVEM_WORKERS", raising=False)
