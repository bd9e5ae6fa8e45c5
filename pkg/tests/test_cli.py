"""Command-line interface: exit codes, file outputs, determinism."""

import csv
import json
import math
import subprocess
import sys

import pytest

from emaflow.cli import main

CANONICAL = [
    "--set", "profile.preset=quadratic",
    "--set", "profile.a=0",
    "--set", "profile.c=-2",
    "--set", "profile.d=1",
]


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------- simulate


def test_simulate_equilibrium(tmp_path, capsys):
    out = str(tmp_path / "run")
    code, stdout, stderr = run_cli(["simulate", "--out", out], capsys)
    assert code == 0
    assert stderr == ""
    assert "termination=horizon_reached" in stdout

    with open(tmp_path / "run" / "snapshots.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "r", "rho", "u", "p", "q", "mu", "nu"]
    # static profile: every field column is constant
    for row in rows[1:]:
        assert row[2:] == ["1.0", "0.0", "0.0", "0.0", "0.0", "0.0"]

    diag = json.loads((tmp_path / "run" / "diagnostics.json").read_text())
    assert diag["termination"] == "horizon_reached"
    assert diag["t_blowup_estimate"] is None
    assert diag["bkm_integral"] == 0.0


def test_simulate_supercritical_exits_2(tmp_path, capsys):
    out = str(tmp_path / "run")
    code, stdout, _ = run_cli(["simulate", "--out", out, *CANONICAL], capsys)
    assert code == 2
    assert "termination=blowup_detected" in stdout
    diag = json.loads((tmp_path / "run" / "diagnostics.json").read_text())
    assert abs(diag["t_blowup_estimate"] - math.pi / 6.0) <= 1e-2


# ---------------------------------------------------------------- classify


def test_classify_equilibrium(tmp_path, capsys):
    out = str(tmp_path / "cl")
    code, _, _ = run_cli(["classify", "--out", out], capsys)
    assert code == 0
    verdict = json.loads((tmp_path / "cl" / "verdict.json").read_text())
    assert verdict["class"] == "subcritical"
    assert verdict["t_blowup"] is None
    assert verdict["margins"] == {"gradient_branch": 1.0, "ratio_branch": 1.0}


def test_classify_supercritical_still_exits_0(tmp_path, capsys):
    # a verdict is the product, not a failure
    out = str(tmp_path / "cl")
    code, _, _ = run_cli(["classify", "--out", out, *CANONICAL], capsys)
    assert code == 0
    verdict = json.loads((tmp_path / "cl" / "verdict.json").read_text())
    assert verdict["class"] == "supercritical"
    assert verdict["witness_r"] == 0.0
    assert verdict["t_blowup"] == pytest.approx(math.pi / 6.0, abs=1e-12)


def test_classify_boundary_tuned(tmp_path, capsys):
    out = str(tmp_path / "cl")
    c = math.sqrt(0.4)
    code, _, _ = run_cli(
        [
            "classify", "--out", out,
            "--set", "profile.preset=quadratic",
            "--set", "profile.a=0.3",
            "--set", f"profile.c={c!r}",
            "--set", "profile.d=1",
        ],
        capsys,
    )
    assert code == 0
    verdict = json.loads((tmp_path / "cl" / "verdict.json").read_text())
    assert verdict["class"] == "boundary"


# ---------------------------------------------------------------- sweep


def test_sweep_single_cell(tmp_path, capsys):
    out = str(tmp_path / "sw")
    code, stdout, _ = run_cli(
        [
            "sweep", "--out", out,
            "--set", "sweep.axis1=lambda0, 0, 0, 1",
            "--set", "sweep.axis2=h0, 0, 0, 1",
        ],
        capsys,
    )
    assert code == 0
    assert "cells=1" in stdout
    lines = (tmp_path / "sw" / "sweep.csv").read_text().splitlines()
    assert lines[0] == "lambda0,h0,regime,t_blowup"
    assert lines[1] == "0.0,0.0,subcritical,"
    assert len(lines) == 2


SWEEP_ARGS = [
    "--set", "sweep.axis1=lambda0, -1.5, 1.5, 5",
    "--set", "sweep.axis2=h0, -0.5, 0.45, 4",
]


def test_sweep_deterministic_across_threads(tmp_path, capsys):
    outputs = []
    for tag, threads in (("a", "1"), ("b", "4"), ("c", "1")):
        out = str(tmp_path / tag)
        code, _, _ = run_cli(
            ["sweep", "--out", out, "--threads", threads, *SWEEP_ARGS], capsys
        )
        assert code == 0
        outputs.append((tmp_path / tag / "sweep.csv").read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]


def test_simulate_deterministic_across_runs(tmp_path, capsys):
    payloads = []
    for tag in ("a", "b"):
        out = str(tmp_path / tag)
        code, _, _ = run_cli(
            ["simulate", "--out", out, "--set", "simulate.n_chars=64"], capsys
        )
        assert code == 0
        payloads.append(
            (
                (tmp_path / tag / "snapshots.csv").read_bytes(),
                (tmp_path / tag / "diagnostics.json").read_bytes(),
            )
        )
    assert payloads[0] == payloads[1]


# ---------------------------------------------------------------- validate


def test_validate_selected_suites(tmp_path, capsys):
    out = str(tmp_path / "val")
    code, stdout, _ = run_cli(
        [
            "validate", "--out", out,
            "--set", "validate.suites=ellipse_invariant, blowup_time_agreement",
        ],
        capsys,
    )
    assert code == 0
    assert stdout.count("PASS") == 2
    report = json.loads((tmp_path / "val" / "report.json").read_text())
    assert report["all_passed"] is True
    assert [c["name"] for c in report["criteria"]] == [
        "blowup_time_agreement",
        "ellipse_invariant",
    ]
    for c in report["criteria"]:
        assert c["passed"] is True
        assert c["measured"] <= c["budget"]


def test_validate_rejects_empty_selection(tmp_path, capsys):
    code, _, stderr = run_cli(
        ["validate", "--out", str(tmp_path / "v"), "--set", "validate.suites="],
        capsys,
    )
    assert code == 1
    assert stderr.startswith("error: ConfigError:")
    assert "empty suite selection" in stderr


def test_validate_rejects_unknown_suite(tmp_path, capsys):
    code, _, stderr = run_cli(
        ["validate", "--out", str(tmp_path / "v"), "--set", "validate.suites=wibble"],
        capsys,
    )
    assert code == 1
    assert "unknown validation suite" in stderr


# ---------------------------------------------------------------- error contract


@pytest.mark.parametrize(
    "argv,needle",
    [
        ([], "a subcommand is required"),
        (["frobnicate"], "invalid choice"),
        (["simulate", "--set", "garbage"], "SECTION.KEY=VALUE"),
        (["simulate", "--set", "profile.preset=unknown_thing"], "unknown preset"),
        (["simulate", "--config", "/nonexistent/run.ini"], "cannot read"),
    ],
)
def test_usage_errors_exit_1(tmp_path, capsys, argv, needle):
    if argv and argv[0] == "simulate":
        argv = argv + ["--out", str(tmp_path / "x")]
    code, _, stderr = run_cli(argv, capsys)
    assert code == 1
    lines = [l for l in stderr.splitlines() if l]
    assert len(lines) == 1
    assert lines[0].startswith("error: ")
    assert needle in lines[0]


# ---------------------------------------------------------------- module entry point


def test_module_entry_point(tmp_path):
    out = str(tmp_path / "run")
    proc = subprocess.run(
        [sys.executable, "-m", "emaflow", "simulate", "--out", out,
         "--set", "simulate.n_chars=32"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "termination=horizon_reached" in proc.stdout

    bad = subprocess.run(
        [sys.executable, "-m", "emaflow", "nope"], capture_output=True, text=True
    )
    assert bad.returncode == 1
    assert bad.stderr.startswith("error: ")
