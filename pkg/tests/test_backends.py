"""Parity between the compiled stepper kernels and the pure-Python twin.

The two backends share the Butcher tableau and controller constants but not
arithmetic order, so results agree to integrator accuracy rather than bitwise.
"""

import json
import os
import subprocess
import sys
import textwrap

import numpy as np
import pytest

from emaflow.spectral import BACKEND, IntegratorConfig, integrate

PROBE = textwrap.dedent(
    """\
    import json
    import emaflow.spectral as spectral

    cases = [
        ("qnu", (0.5, 0.0), 1.0, 50.0),
        ("qnu", (-1.2, 0.0), 1.0, 100.0),
        ("swirl", (0.0, 0.3, 0.0, 0.2, 0.1, 0.5), 1.0, 10.0),
        ("ep", (2.0, -0.5), 1.0, 40.0),
    ]
    out = {"backend": spectral.BACKEND, "cases": []}
    for system, state0, kappa, horizon in cases:
        cfg = spectral.IntegratorConfig(horizon=horizon)
        n = 2 if system == "ep" else 1
        traj = spectral.integrate(system, state0, kappa, n=n, config=cfg)
        out["cases"].append(
            {
                "kind": traj.termination.kind,
                "t_est": traj.termination.t_est,
                "final": list(traj.final_state),
                "steps": len(traj.times),
            }
        )
    print(json.dumps(out))
    """
)


def _run_probe(env_extra):
    env = dict(os.environ, **env_extra)
    proc = subprocess.run(
        [sys.executable, "-c", PROBE], capture_output=True, text=True, env=env
    )
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)


def test_backend_flag_is_sane():
    assert BACKEND in ("compiled", "python")


def test_forced_fallback_reports_python():
    out = _run_probe({"EMAFLOW_PURE_PYTHON": "1"})
    assert out["backend"] == "python"


def test_backends_agree():
    if BACKEND != "compiled":
        pytest.skip("compiled extension not available; nothing to compare")
    compiled = _run_probe({})
    assert compiled["backend"] == "compiled"
    python = _run_probe({"EMAFLOW_PURE_PYTHON": "1"})

    for got, want in zip(compiled["cases"], python["cases"]):
        assert got["kind"] == want["kind"]
        assert got["steps"] == want["steps"]
        np.testing.assert_allclose(got["final"], want["final"], rtol=1e-9, atol=1e-12)
        if want["t_est"] is None:
            assert got["t_est"] is None
        else:
            assert abs(got["t_est"] - want["t_est"]) <= 1e-9
