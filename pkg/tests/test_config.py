from __future__ import annotations

import json
from pathlib import Path

import pytest
from pydantic import ValidationError

from polyvem import ConfigError
from polyvem.config import (
    AnisotropicMaterial,
    CvtMeshSource,
    FileMeshSource,
    HexMeshSource,
    IsotropicMaterial,
    ProblemName,
    RunConfig,
    VoronoiMeshSource,
    load_config,
    load_config_data,
)
from polyvem.material import MaterialModel


def _write(path: Path, payload: object) -> Path:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def test_defaults_follow_the_problem() -> None:
    patch = RunConfig()
    beam = RunConfig(problem="beam")

    assert isinstance(patch.material, IsotropicMaterial)
    assert patch.material.youngs_modulus == 1.0
    assert beam.material.youngs_modulus == 25.0
    assert beam.beam.nterms == 16
    assert patch.mesh_source() == HexMeshSource()
    assert beam.mesh_source() == HexMeshSource(box=(-1.0, 1.0, -1.0, 1.0, 0.0, 10.0), n=(2, 2, 10))


def test_mesh_sources_are_discriminated_by_kind() -> None:
    config = RunConfig.model_validate(
        {
            "levels": [
                {"kind": "hex", "n": [2, 2, 2]},
                {"kind": "voronoi", "n": 12, "seed": 3},
                {"kind": "cvt", "n": 12, "max_iters": 5},
                {"kind": "file", "path": "mesh.json"},
            ]
        }
    )

    assert [type(level) for level in config.levels] == [
        HexMeshSource,
        VoronoiMeshSource,
        CvtMeshSource,
        FileMeshSource,
    ]
    assert config.levels[0].bounds().volume == pytest.approx(1.0)


def test_hex_source_builds_mesh() -> None:
    mesh = HexMeshSource(box=(0.0, 2.0, 0.0, 1.0, 0.0, 1.0), n=(2, 1, 1)).build()

    assert mesh.n_elements == 2
    assert mesh.total_volume == pytest.approx(2.0)


def test_anisotropic_material_builds() -> None:
    table = MaterialModel.isotropic(3.0, 0.2).components.tolist()
    material = AnisotropicMaterial(components=table).build()

    assert not material.is_isotropic
    assert material.components[0, 0] == pytest.approx(table[0][0])


@pytest.mark.parametrize(
    ("payload", "message"),
    [
        ({"mesh": {"kind": "hex"}, "levels": [{"kind": "hex"}]}, "either mesh or levels"),
        ({"gammas": [1.0, -0.5]}, "every gamma must be positive"),
        ({"problem": "beam", "traction_tags": ["xmax"]}, "traction_tags"),
        ({"unknown": 1}, "Extra inputs"),
        ({"gamma": 0.0}, "greater than 0"),
        ({"quadrature_degree": 3}, "greater than or equal to 4"),
        ({"material": {"kind": "isotropic", "youngs_modulus": 1.0, "poisson_ratio": 0.5}}, "less than 0.5"),
        ({"material": {"kind": "anisotropic", "components": [[1.0] * 5] * 6}}, "6x6"),
        ({"mesh": {"kind": "tetgen"}}, "tetgen"),
        ({"traction_tags": ["top"]}, "traction_tags"),
        ({"size_measure": "median"}, "size_measure"),
    ],
)
def test_invalid_configs_are_rejected(payload: dict, message: str) -> None:
    with pytest.raises(ValidationError, match=message):
        RunConfig.model_validate(payload)


def test_levels_without_mesh_need_a_study() -> None:
    config = RunConfig.model_validate({"levels": [{"kind": "hex"}, {"kind": "hex", "n": [4, 4, 4]}]})

    with pytest.raises(ConfigError, match="single mesh"):
        config.mesh_source()


def test_workers_prefer_config_then_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    assert RunConfig().resolved_workers() == 1
    monkeypatch.setenv("POLYVEM_WORKERS", "3")
    assert RunConfig().resolved_workers() == 3
    assert RunConfig(workers=2).resolved_workers() == 2


@pytest.mark.parametrize(("raw", "message"), [("many", "must be an integer"), ("0", "at least 1")])
def test_bad_worker_environment_is_rejected(
    monkeypatch: pytest.MonkeyPatch, raw: str, message: str
) -> None:
    monkeypatch.setenv("POLYVEM_WORKERS", raw)
    with pytest.raises(ConfigError, match=message):
        RunConfig().resolved_workers()


def test_load_config_applies_overrides(tmp_path: Path) -> None:
    path = _write(
        tmp_path / "run.json",
        {"problem": "beam", "label": "coarse", "beam": {"nterms": 8}, "gamma": 2.0},
    )
    config = load_config(path, {"gamma": 0.5})

    assert config.problem is ProblemName.BEAM
    assert config.label == "coarse"
    assert config.beam.nterms == 8
    assert config.gamma == 0.5


def test_load_config_data_errors(tmp_path: Path) -> None:
    with pytest.raises(ConfigError, match="cannot read config"):
        load_config_data(tmp_path / "missing.json")

    broken = tmp_path / "broken.json"
    broken.write_text('{"gamma": }', encoding="utf-8")
    with pytest.raises(ConfigError, match=r"not valid JSON \(line 1 column"):
        load_config_data(broken)

    with pytest.raises(ConfigError, match="must hold a JSON object"):
        load_config_data(_write(tmp_path / "list.json", [1, 2]))
