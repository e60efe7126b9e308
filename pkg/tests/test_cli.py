"""Command-line pipeline: artifacts, determinism, stage chaining, exits."""

import hashlib
import json
import subprocess
import sys

import numpy as np
import pytest

from paretotrace.artifacts import load_trace_csv
from paretotrace.cli import ARTIFACT_NAMES, main


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_cli(args):
    return main(list(args))


def test_full_run_writes_every_artifact(quadratic_run):
    out, manifest = quadratic_run
    for name in ARTIFACT_NAMES:
        assert (out / name).exists(), name
    assert (out / "manifest.json").exists()
    on_disk = json.loads((out / "manifest.json").read_text())
    assert on_disk["config"]["objectives"] == "synthetic:quadratic"
    assert set(manifest["stages"]) == {
        "sample",
        "subspace",
        "mix",
        "trace",
        "front",
    }
    # m = 6 for this catalog entry: one base pass plus m forward steps
    counts = manifest["stages"]["sample"]["evaluations"]
    assert counts["L"] == 300 * 7
    assert counts["W"] == 300 * 7


def test_repeated_runs_are_byte_identical(tmp_path, quadratic_run):
    first, _ = quadratic_run
    second = tmp_path / "again"
    code = run_cli(
        [
            "run",
            "--objectives",
            "synthetic:quadratic",
            "--n",
            "300",
            "--out",
            str(second),
        ]
    )
    assert code == 0
    for name in ARTIFACT_NAMES:
        assert digest(first / name) == digest(second / name), name


def test_stage_chain_reproduces_the_single_run(tmp_path, quadratic_run):
    full, _ = quadratic_run
    staged = tmp_path / "staged"
    base = [
        "--objectives",
        "synthetic:quadratic",
        "--n",
        "300",
        "--out",
        str(staged),
    ]
    for stage in ("sample", "subspace", "mix", "trace", "front"):
        assert run_cli([stage] + base) == 0
    for name in ARTIFACT_NAMES:
        assert digest(full / name) == digest(staged / name), name


def test_seed_changes_the_samples(tmp_path):
    args = ["run", "--objectives", "synthetic:mirror", "--n", "60"]
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert run_cli(args + ["--seed", "1", "--out", str(a)]) == 0
    assert run_cli(args + ["--seed", "2", "--out", str(b)]) == 0
    assert digest(a / "samples.csv") != digest(b / "samples.csv")


def test_trace_artifact_round_trips(quadratic_run):
    out, _ = quadratic_run
    trace = load_trace_csv(out / "trace.csv")
    assert trace["ts"][0] == 0.0 and trace["ts"][-1] == 1.0
    assert trace["ys"].shape == (101, 2)
    assert trace["in_domain"].dtype == bool


def test_unknown_objectives_exit_2(tmp_path, capsys):
    code = run_cli(
        [
            "run",
            "--objectives",
            "synthetic:unknown",
            "--out",
            str(tmp_path / "x"),
        ]
    )
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_space_flag_is_rejected_for_synthetic_objectives(tmp_path):
    space_file = tmp_path / "space.json"
    space_file.write_text("{}")
    code = run_cli(
        [
            "run",
            "--objectives",
            "synthetic:quadratic",
            "--space",
            str(space_file),
            "--out",
            str(tmp_path / "x"),
        ]
    )
    assert code == 2


def test_invalid_numeric_flags_exit_2(tmp_path):
    code = run_cli(
        [
            "run",
            "--objectives",
            "synthetic:quadratic",
            "--n",
            "0",
            "--out",
            str(tmp_path / "x"),
        ]
    )
    assert code == 2


def test_missing_inputs_for_a_stage_exit_2(tmp_path):
    code = run_cli(
        [
            "subspace",
            "--objectives",
            "synthetic:quadratic",
            "--out",
            str(tmp_path / "empty"),
        ]
    )
    assert code == 2


def test_degenerate_spectrum_exits_3(tmp_path):
    out = tmp_path / "degen"
    base = ["--objectives", "synthetic:quadratic", "--n", "50", "--out", str(out)]
    assert run_cli(["sample"] + base) == 0
    grads = np.loadtxt(out / "gradients_L.csv", delimiter=",", ndmin=2)
    np.savetxt(out / "gradients_L.csv", np.zeros_like(grads), delimiter=",")
    assert run_cli(["subspace"] + base) == 0
    # rank selection must refuse the all-zero spectrum
    assert run_cli(["mix", "--rank", "auto"] + base) == 3


def test_env_var_supplies_the_output_directory(tmp_path, monkeypatch):
    target = tmp_path / "from_env"
    monkeypatch.setenv("PARETO_TRACE_OUT", str(target))
    code = run_cli(["sample", "--objectives", "synthetic:mirror", "--n", "30"])
    assert code == 0
    assert (target / "samples.csv").exists()


def test_explicit_out_beats_the_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("PARETO_TRACE_OUT", str(tmp_path / "ignored"))
    chosen = tmp_path / "chosen"
    code = run_cli(
        [
            "sample",
            "--objectives",
            "synthetic:mirror",
            "--n",
            "30",
            "--out",
            str(chosen),
        ]
    )
    assert code == 0
    assert (chosen / "samples.csv").exists()
    assert not (tmp_path / "ignored").exists()


def test_console_module_entry_point(tmp_path):
    out = tmp_path / "subproc"
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "paretotrace",
            "run",
            "--objectives",
            "synthetic:mirror",
            "--n",
            "40",
            "--out",
            str(out),
        ],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (out / "manifest.json").exists()


def test_rank_auto_is_accepted(tmp_path):
    out = tmp_path / "auto"
    code = run_cli(
        [
            "run",
            "--objectives",
            "synthetic:quadratic",
            "--n",
            "120",
            "--rank",
            "auto",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["stages"]["mix"]["rank_used"] == 2


def test_failed_run_leaves_a_partial_manifest(tmp_path):
    out = tmp_path / "partial"
    code = run_cli(
        [
            "run",
            "--objectives",
            "synthetic:ridge",
            "--n",
            "80",
            "--rank",
            "1",
            "--out",
            str(out),
        ]
    )
    assert code == 2
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["failed_stage"] == "trace"
    assert "error" in manifest
