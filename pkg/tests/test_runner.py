from __future__ import annotations

import json
from pathlib import Path

import pytest

from polyvem import ConfigError
from polyvem.config import RunConfig
from polyvem.reports import ConvergenceReport, GammaSweepReport
from polyvem.runner import (
    CONVERGENCE_HEADER,
    build_problem,
    run,
    run_convergence,
    run_patch,
)


def _config(tmp_path: Path, **fields: object) -> RunConfig:
    return RunConfig.model_validate({"output_dir": str(tmp_path), **fields})


def test_build_problem_uses_config_values(tmp_path: Path) -> None:
    problem = build_problem(
        _config(tmp_path, problem="beam", gamma=2.0, mode="moment", beam={"traction": "uniform"})
    )

    assert problem.name == "beam"
    assert problem.gamma == 2.0
    assert problem.mode == "moment"
    assert problem.dirichlet_tags == ("zmax",)
    assert problem.material.youngs_modulus == 25.0


def test_patch_run_writes_vtk_and_report(tmp_path: Path) -> None:
    outcome = run(_config(tmp_path, label="patch-run"))

    assert [path.name for path in outcome.files] == ["solution.vtk", "report.json"]
    report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert report["label"] == "patch-run"
    assert report["mesh"]["elements"] == 27
    assert report["errors"]["e_u"] < 1e-10
    assert report["probes"] == []


def test_beam_run_reports_end_probes(tmp_path: Path) -> None:
    outcome = run(_config(tmp_path, problem="beam"))
    loaded, clamped = outcome.report.probes

    assert loaded.name == "loaded_end_center"
    assert loaded.exact is not None and loaded.exact[1] == pytest.approx(0.0, abs=1e-15)
    assert clamped.name == "clamped_end_center"
    assert clamped.exact is not None and clamped.exact[1] == pytest.approx(-0.5)
    # the clamped end carries the exact displacement
    assert clamped.computed == pytest.approx(clamped.exact, abs=1e-12)
    assert outcome.report.errors.e_u > 0.0


def test_patch_command_passes_and_writes_report(tmp_path: Path) -> None:
    outcome = run_patch(
        _config(tmp_path, mesh={"kind": "hex", "n": [3, 3, 3], "distortion": 0.25, "seed": 8})
    )

    assert outcome.passed
    saved = json.loads(outcome.files[0].read_text(encoding="utf-8"))
    assert saved["passed"] is True
    assert saved["displacement_tol"] == 1e-10


def test_patch_command_rejects_beam(tmp_path: Path) -> None:
    with pytest.raises(ConfigError, match="needs problem 'patch'"):
        run_patch(_config(tmp_path, problem="beam"))


def test_convergence_on_patch_levels_is_exact(tmp_path: Path) -> None:
    outcome = run_convergence(
        _config(tmp_path, levels=[{"kind": "hex", "n": [2, 2, 2]}, {"kind": "hex", "n": [3, 3, 3]}])
    )

    assert isinstance(outcome.report, ConvergenceReport)
    assert outcome.report.exact
    lines = (tmp_path / "convergence.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(CONVERGENCE_HEADER)
    assert len(lines) == 3
    assert lines[1].startswith("0,")
    assert (tmp_path / "convergence.json").exists()


def test_convergence_records_size_measure(tmp_path: Path) -> None:
    box = [-1, 1, -1, 1, 0, 10]
    outcome = run_convergence(
        _config(
            tmp_path,
            problem="beam",
            size_measure="mean",
            levels=[
                {"kind": "hex", "box": box, "n": [2, 2, 10]},
                {"kind": "hex", "box": box, "n": [3, 3, 15]},
            ],
        )
    )

    assert isinstance(outcome.report, ConvergenceReport)
    assert outcome.report.size_measure == "mean"
    assert outcome.report.slope_u is not None
    written = json.loads((tmp_path / "convergence.json").read_text(encoding="utf-8"))
    assert written["size_measure"] == "mean"
    root3 = 3.0**0.5
    assert [level["h_mean"] for level in written["levels"]] == pytest.approx([root3, root3 * 2 / 3])


def test_gamma_sweep_writes_one_row_per_gamma(tmp_path: Path) -> None:
    outcome = run_convergence(_config(tmp_path, problem="beam", gammas=[0.5, 1.0, 4.0]))

    assert isinstance(outcome.report, GammaSweepReport)
    assert outcome.report.best_gamma in (0.5, 1.0, 4.0)
    lines = (tmp_path / "gamma_sweep.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "gamma,h,dofs,e_u,e_sigma"
    assert [line.split(",")[0] for line in lines[1:]] == ["0.5", "1", "4"]


def test_convergence_needs_two_levels(tmp_path: Path) -> None:
    with pytest.raises(ConfigError, match="at least 2 mesh levels"):
        run_convergence(_config(tmp_path, levels=[{"kind": "hex"}]))
