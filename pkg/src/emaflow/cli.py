"""Command-line entry points.

Four subcommands share one config file:

    emaflow simulate --config run.ini --out results/
    emaflow classify --config run.ini
    emaflow sweep    --config run.ini --threads 8
    emaflow validate --config run.ini

Exit codes: 0 for a regular finish, 2 when a singularity (or a failed
validation criterion) is detected, 1 for usage, I/O, and configuration
errors.  Errors print a single line to stderr.  All file outputs are
byte-deterministic for a fixed config and seed, independent of
--threads.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import SWIRL_FIELDS, RunConfig, load_run_config
from .errors import EmaflowError
from .lagrange import advance_ensemble, bkm_monitor, gradient_bound_check
from .spectral import BACKEND, SwirlState
from .threshold import (
    classify_point,
    classify_profile,
    default_classification_grid,
    sigma_membership,
    threshold_margin,
)

__all__ = ["main"]


def _fmt(x) -> str:
    # repr of a float is the shortest string that round-trips.
    return repr(float(x))


def _write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_json(path: Path, payload) -> str:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    path.write_text(text, encoding="utf-8")
    return text


def _outdir(config: RunConfig) -> Path:
    path = Path(config.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_simulate(config: RunConfig) -> int:
    profile = config.build_profile()
    output_times = np.linspace(0.0, config.t_end, config.n_snapshots)
    result = advance_ensemble(
        profile,
        n_chars=config.n_chars,
        t_end=config.t_end,
        config=config.integrator,
        output_times=output_times,
        grid_size=config.grid_size,
    )
    outdir = _outdir(config)

    rows = []
    for snap in result.snapshots:
        t_str = _fmt(snap.t)
        for i in range(snap.grid.size):
            rows.append(
                (
                    t_str,
                    _fmt(snap.grid[i]),
                    _fmt(snap.rho[i]),
                    _fmt(snap.u[i]),
                    _fmt(snap.p[i]),
                    _fmt(snap.q[i]),
                    _fmt(snap.mu[i]),
                    _fmt(snap.nu[i]),
                )
            )
    _write_csv(outdir / "snapshots.csv", ("t", "r", "rho", "u", "p", "q", "mu", "nu"), rows)

    n = profile.dimension
    r0 = result.seeds
    rho0 = result.rho0
    ref = r0 * (1.0 - np.asarray(profile.nu0(r0), dtype=float))
    denom = np.maximum(1.0, np.abs(ref))
    path_drift = 0.0
    density_drift = 0.0
    for state in result.char_states:
        r = state[:, 0]
        mu = state[:, 4]
        nu = state[:, 5]
        g = state[:, 6]
        path_drift = max(
            path_drift, float(np.max(np.abs(r * (1.0 - nu) - ref) / denom))
        )
        rho_ma = (1.0 - mu) * (1.0 - nu) ** (n - 1)
        rho_cont = rho0 * np.exp(-g)
        density_drift = max(density_drift, float(np.max(np.abs(rho_ma - rho_cont))))

    bound_margin = None
    for snap in result.snapshots:
        _, margin = gradient_bound_check(snap)
        bound_margin = margin if bound_margin is None else min(bound_margin, margin)

    diag = {
        "backend": BACKEND,
        "preset": config.preset,
        "n": n,
        "kappa": config.kappa,
        "seed": config.seed,
        "n_chars": config.n_chars,
        "t_end": config.t_end,
        "termination": result.termination.kind,
        "t_blowup_estimate": result.termination.t_est,
        "n_snapshots_written": len(result.snapshots),
        "bkm_integral": bkm_monitor(result.snapshots) if len(result.snapshots) >= 2 else None,
        "path_invariant_drift": path_drift,
        "density_consistency_drift": density_drift,
        "gradient_bound_min_margin": bound_margin,
    }
    _write_json(outdir / "diagnostics.json", diag)

    print(
        f"simulate: termination={result.termination.kind} "
        f"snapshots={len(result.snapshots)} out={outdir}"
    )
    return 0 if result.termination.kind == "horizon_reached" else 2


def cmd_classify(config: RunConfig) -> int:
    profile = config.build_profile()
    grid = default_classification_grid(profile, config.classify_grid_size)
    verdict = classify_profile(profile, grid)

    radii = np.concatenate(([0.0], grid))
    margin_gradient = min(
        threshold_margin(profile.du0(r), profile.d2phi0(r), profile.kappa)
        for r in radii
    )
    margin_ratio = min(
        threshold_margin(profile.q0(r), profile.nu0(r), profile.kappa) for r in radii
    )

    payload = {
        "class": verdict.regime,
        "witness_r": verdict.witness_r,
        "t_blowup": verdict.t_blowup,
        "horizon": verdict.horizon,
        "margins": {
            "gradient_branch": margin_gradient,
            "ratio_branch": margin_ratio,
        },
        "preset": config.preset,
        "n": profile.dimension,
        "kappa": profile.kappa,
        "grid_size": int(grid.size),
    }
    text = _write_json(_outdir(config) / "verdict.json", payload)
    sys.stdout.write(text)
    return 0


def _sweep_rows(config: RunConfig):
    ax1, ax2 = config.sweep_axis1, config.sweep_axis2
    vals1 = np.linspace(ax1.lo, ax1.hi, ax1.count)
    vals2 = np.linspace(ax2.lo, ax2.hi, ax2.count)
    tasks = [(float(v1), float(v2)) for v1 in vals1 for v2 in vals2]

    if config.sweep_mode == "pointwise_threshold":

        def cell(task):
            v1, v2 = task
            point = {ax1.name: v1, ax2.name: v2}
            verdict = classify_point(point["lambda0"], point["h0"], config.kappa)
            return verdict.regime, verdict.t_blowup

    else:

        def cell(task):
            v1, v2 = task
            base = {name: 0.0 for name in SWIRL_FIELDS}
            base.update(config.sweep_fixed)
            base[ax1.name] = v1
            base[ax2.name] = v2
            state = SwirlState(
                p=base["p0"],
                q=base["q0"],
                mu=base["mu0"],
                nu=base["nu0"],
                theta_r=base["theta_r0"],
                theta_over_r=base["theta_over_r0"],
            )
            verdict = sigma_membership(
                state,
                config.kappa,
                horizon=config.sweep_horizon,
                config=config.integrator,
            )
            return verdict.regime, verdict.t_blowup

    if config.threads == 1:
        outcomes = [cell(task) for task in tasks]
    else:
        # executor.map returns results in task order, so the merged
        # file is identical to the single-threaded one.
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            outcomes = list(pool.map(cell, tasks))

    rows = []
    for (v1, v2), (regime, t_blowup) in zip(tasks, outcomes):
        rows.append(
            (_fmt(v1), _fmt(v2), regime, "" if t_blowup is None else _fmt(t_blowup))
        )
    return (ax1.name, ax2.name, "regime", "t_blowup"), rows


def cmd_sweep(config: RunConfig) -> int:
    header, rows = _sweep_rows(config)
    outdir = _outdir(config)
    _write_csv(outdir / "sweep.csv", header, rows)
    print(f"sweep: mode={config.sweep_mode} cells={len(rows)} out={outdir}")
    return 0


def cmd_validate(config: RunConfig) -> int:
    from .validation import resolve_suites, run_criteria

    names = resolve_suites(config.validate_suites)
    results = run_criteria(names, seed=config.seed)
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(
            f"{status}  {res.name}: measured={res.measured:.6g} "
            f"budget={res.budget:.6g} ({res.elapsed_s:.2f}s)"
        )
    report = {
        "backend": BACKEND,
        "seed": config.seed,
        "all_passed": all(res.passed for res in results),
        "criteria": [
            {
                "name": res.name,
                "description": res.description,
                "passed": res.passed,
                "measured": res.measured,
                "budget": res.budget,
                "elapsed_s": res.elapsed_s,
            }
            for res in results
        ],
    }
    _write_json(_outdir(config) / "report.json", report)
    return 0 if report["all_passed"] else 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; route them through the single
    # error path instead so usage problems exit 1.
    def error(self, message):
        raise EmaflowError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="emaflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    for name, func, help_text in (
        ("simulate", cmd_simulate, "advance a characteristic ensemble, write snapshots"),
        ("classify", cmd_classify, "classify a profile against the critical threshold"),
        ("sweep", cmd_sweep, "grid sweep over initial data, write sweep.csv"),
        ("validate", cmd_validate, "run the acceptance criteria, write report.json"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", metavar="PATH", help="INI config file")
        cmd.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="SECTION.KEY=VALUE",
            help="override one config entry (repeatable)",
        )
        cmd.add_argument("--out", metavar="DIR", help="output directory")
        cmd.add_argument("--threads", type=int, metavar="N", help="worker threads")
        cmd.add_argument("--seed", type=int, metavar="N", help="sampling seed")
        cmd.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            raise EmaflowError("a subcommand is required (see --help)")
        config = load_run_config(
            args.config,
            args.set,
            out=args.out,
            threads=args.threads,
            seed=args.seed,
        )
        return args.func(config)
    except (EmaflowError, OSError) as exc:
        message = " ".join(str(exc).split())
        print(f"error: {type(exc).__name__}: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
