"""End-to-end tests for the ``belief-impact`` command line."""

from __future__ import annotations

import json
from pathlib import Path

import pandas as pd
import pytest

from belief_impact.cli.commands import EXIT_FAILED, cmd_validate
from belief_impact.cli.main import main
from belief_impact.cli.output import SWEEP_COLUMNS, UTILITY_COLUMNS, ValidationFailuresDocument
from belief_impact.config import load_run_config
from belief_impact.models.report import ReportDesign
from belief_impact.services.validation import random_instance

SCHEMAS = Path(__file__).resolve().parents[1] / "schemas"


@pytest.fixture(autouse=True)
def _in_tmp(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)


# ── Helpers ──────────────────────────────────────────────

def _config(tmp_path: Path, grid=(0.5, 1.0, 0.5), policy: str = "", viewers: int = 20) -> str:
    """Small TOML run configuration; *grid* is ``(start, stop, step)``."""
    start, stop, step = grid
    path = tmp_path / "run.toml"
    path.write_text(
        "n_draws = 10\n"
        "n_samples = 25\n"
        "[scenario]\n"
        f"n_viewers = {viewers}\n"
        "[epsilon_grid]\n"
        f"start = {start}\nstop = {stop}\nstep = {step}\n"
        f"[policy]\n{policy}\n"
    )
    return str(path)


def _design_report(capsys, *extra: str) -> tuple[int, dict | None, str]:
    code = main(["design-report", *extra])
    captured = capsys.readouterr()
    return code, (json.loads(captured.out) if code == 0 else None), captured.err


def _truth_reporter(moments, x_s, x_t, epsilon) -> ReportDesign:
    return ReportDesign(
        y_star=x_t, lambda_star=0.0, objective=moments.objective(x_t, x_s), binding=False, epsilon=epsilon
    )


# ──────────────────────────────────────────────────────────
# Test 1: design-report
# ──────────────────────────────────────────────────────────
def test_design_report_binding(capsys):
    code, doc, _ = _design_report(capsys, "--x-s", "1,0", "--x-t", "1,0", "--epsilon", "0.2")
    assert code == 0
    assert doc["y_star"] == pytest.approx([1.2, 0.0], abs=1e-8)
    assert doc["lambda_star"] == pytest.approx(0.6667, abs=1e-4)
    assert doc["binding"] is True
    assert doc["admissible"] is True
    assert doc["exaggeration"] == pytest.approx([0.5, 0.0])
    parts = doc["components"]
    total = [sum(v) for v in zip(parts["truth"], parts["source"], parts["prior_offset"])]
    assert total == pytest.approx(doc["y_star"], abs=1e-8)


def test_design_report_non_binding(capsys):
    code, doc, _ = _design_report(capsys, "--x-s", "1,0", "--x-t", "1,0", "--epsilon", "10")
    assert code == 0
    assert doc["lambda_star"] == 0.0
    assert doc["binding"] is False


def test_design_report_matches_schema_fields(capsys):
    _, doc, _ = _design_report(capsys, "--x-s=-1,0", "--x-t", "0,1", "--epsilon", "0.5", "--mu-bar", "0.2,0.2")
    schema = json.loads((SCHEMAS / "design_report.schema.json").read_text())
    assert set(doc) == set(schema["required"])


@pytest.mark.parametrize(
    ("x_s", "field"),
    [("1,0,0", "x_s"), ("1,zero", "x_s")],
)
def test_design_report_malformed_vector(capsys, x_s, field):
    code, _, err = _design_report(capsys, "--x-s", x_s, "--x-t", "1,0", "--epsilon", "0.2")
    assert code == 2
    assert field in err


def test_design_report_bad_epsilon(capsys):
    code, _, err = _design_report(capsys, "--x-s", "1,0", "--x-t", "1,0", "--epsilon", "-1")
    assert code == 2
    assert "epsilon" in err


# ──────────────────────────────────────────────────────────
# Test 2: sweep
# ──────────────────────────────────────────────────────────
def test_sweep_writes_csv(tmp_path):
    config = _config(tmp_path)
    assert main(["sweep", "--config", config, "--seed", "5", "--out", "a"]) == 0
    frame = pd.read_csv(tmp_path / "a" / "sweep.csv")
    assert list(frame.columns) == SWEEP_COLUMNS
    assert len(frame) == 2
    assert frame["epsilon"].tolist() == [0.5, 1.0]


def test_sweep_is_byte_identical_for_equal_seeds(tmp_path):
    config = _config(tmp_path)
    main(["sweep", "--config", config, "--seed", "5", "--out", "a"])
    main(["sweep", "--config", config, "--seed", "5", "--out", "b"])
    assert (tmp_path / "a" / "sweep.csv").read_bytes() == (tmp_path / "b" / "sweep.csv").read_bytes()


def test_sweep_svg(tmp_path):
    config = _config(tmp_path)
    assert main(["sweep", "--config", config, "--seed", "5", "--out", "a", "--svg"]) == 0
    svg = (tmp_path / "a" / "sweep.svg").read_text()
    assert "<svg" in svg


def test_sweep_requires_seed(tmp_path, capsys):
    assert main(["sweep", "--config", _config(tmp_path)]) == 2
    assert "seed" in capsys.readouterr().err


def test_sweep_unwritable_output(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    assert main(["sweep", "--config", _config(tmp_path), "--seed", "1", "--out", str(blocker)]) == 2


# ──────────────────────────────────────────────────────────
# Test 3: optimize-policy
# ──────────────────────────────────────────────────────────
def test_optimize_policy_outputs(tmp_path, capsys):
    config = _config(tmp_path, grid=(0.2, 1.0, 0.4))
    assert main(["optimize-policy", "--config", config, "--seed", "3", "--out", "p"]) == 0
    printed = json.loads(capsys.readouterr().out)
    summary = json.loads((tmp_path / "p" / "summary.json").read_text())
    assert printed == summary
    schema = json.loads((SCHEMAS / "summary.schema.json").read_text())
    assert set(summary) == set(schema["required"])
    assert summary["seed"] == 3
    assert summary["epsilon_star"] in (0.2, 0.6, 1.0)

    frame = pd.read_csv(tmp_path / "p" / "utility.csv")
    assert list(frame.columns) == UTILITY_COLUMNS
    assert len(frame) == 3


def test_optimize_policy_zero_beta(tmp_path):
    config = _config(tmp_path, grid=(0.2, 1.0, 0.4), policy="beta = 0.0")
    assert main(["optimize-policy", "--config", config, "--seed", "3", "--out", "p"]) == 0
    frame = pd.read_csv(tmp_path / "p" / "utility.csv")
    assert frame["total"].tolist() == pytest.approx(frame["u1"].tolist())


def test_optimize_policy_single_epsilon(tmp_path):
    config = _config(tmp_path, grid=(0.5, 0.55, 0.1))
    assert main(["optimize-policy", "--config", config, "--seed", "3", "--out", "p"]) == 0
    assert json.loads((tmp_path / "p" / "summary.json").read_text())["epsilon_star"] == 0.5


def test_optimize_policy_infeasible_margin(tmp_path, capsys):
    config = _config(tmp_path, policy="d_min = 2.5")
    assert main(["optimize-policy", "--config", config, "--seed", "3", "--out", "p"]) == 2
    assert "acceptance rate" in capsys.readouterr().err


# ──────────────────────────────────────────────────────────
# Test 4: validate
# ──────────────────────────────────────────────────────────
def test_validate_passes(capsys):
    assert main(["validate", "--seed", "1", "--instances", "2", "--resolution", "2e-3", "--tol", "5e-2"]) == 0
    out = capsys.readouterr().out
    assert "2/2 passed" in out


def test_validate_reports_failures(tmp_path):
    config = load_run_config(seed=1, output_dir=tmp_path / "v")
    code = cmd_validate(config, 2, resolution=2e-3, design_fn=_truth_reporter)
    assert code == EXIT_FAILED
    failures = json.loads((tmp_path / "v" / "validate_failures.json").read_text())
    assert failures
    assert {"x_s", "x_t", "epsilon", "means", "sigmas", "sigmas_s"} <= set(failures[0])


def test_validate_failures_replay_the_same_instances(tmp_path):
    config = load_run_config(seed=1, output_dir=tmp_path / "v")
    cmd_validate(config, 2, resolution=2e-3, design_fn=_truth_reporter)
    text = (tmp_path / "v" / "validate_failures.json").read_text()
    document = ValidationFailuresDocument.model_validate_json(text)
    assert document.root
    for failure in document.root:
        assert failure.model_dump() == random_instance(1, failure.index).to_dict()
