"""Executable acceptance criteria.

Each criterion exercises one cross-representation claim at desk scale
and reports a scalar against a budget: either a raw worst-case error
against its tolerance, or (where a criterion carries several
tolerances) the worst error normalized by its own tolerance, with
budget 1.  Raw sub-measurements always land in the details dict.

The registry is shared by `emaflow validate` and the test suite, so
passing criteria here and passing acceptance tests are the same event.
"""

from __future__ import annotations

import contextlib
import io
import math
import tempfile
import time
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .config import RunConfig, SweepAxis
from .errors import ConfigError
from .flow import conserved_energy, energy_nodes, flow_radius, pushforward_density
from .lagrange import advance_ensemble
from .profiles import ProfilePreset
from .spectral import IntegratorConfig, integrate
from .spectral.monitors import monitor_ellipse
from .threshold import (
    blowup_time_closed_form,
    classify_point,
    classify_profile,
    default_classification_grid,
    sharpness_bisect,
)

__all__ = ["CriterionResult", "available_criteria", "resolve_suites", "run_criteria"]


@dataclass(frozen=True)
class CriterionResult:
    name: str
    description: str
    passed: bool
    measured: float
    budget: float
    elapsed_s: float
    details: dict = field(default_factory=dict)


def _rng(seed: int, index: int) -> np.random.Generator:
    # One independent stream per criterion so reordering suites never
    # changes any sample.
    return np.random.default_rng([seed, index])


def _build(name: str, params: dict, n: int, kappa: float = 1.0):
    return ProfilePreset(name=name, params=dict(params)).build(dimension=n, kappa=kappa)


# Subcritical presets shared by the equivalence and energy criteria.
_EQUIV_CASES = (
    ("quadratic", {"a": 0.2, "c": 0.3, "d": 1.0}, 2),
    ("quadratic", {"a": -0.3, "c": 0.4, "d": 0.5}, 3),
)
_EQUIV_TIMES = (0.5, 1.0, 2.0 * math.pi)


def _crit_sharpness(seed: int):
    worst = 0.0
    details = {}
    for kappa in (1.0, 4.0):
        for h0 in (-0.5, 0.0, 0.25, 0.4):
            boundary = sharpness_bisect(h0, kappa, horizon=200.0, tol=1e-3)
            exact = math.sqrt(kappa * (1.0 - 2.0 * h0))
            err = abs(boundary - exact)
            details[f"kappa={kappa:g}, h0={h0:g}"] = err
            worst = max(worst, err)
    return worst <= 1e-3, worst, 1e-3, details


def _crit_blowup_agreement(seed: int):
    rng = _rng(seed, 2)
    config = IntegratorConfig(rel_tol=1e-9, abs_tol=1e-12, horizon=8.0)
    worst = 0.0
    worst_abs = 0.0
    accepted = 0
    draws = 0
    n_missed = 0
    while accepted < 50 and draws < 10_000:
        draws += 1
        lam0 = rng.uniform(-3.0, 3.0)
        h0 = rng.uniform(-1.0, 1.0)
        if classify_point(lam0, h0, 1.0).regime != "supercritical":
            continue
        accepted += 1
        t_exact = blowup_time_closed_form(lam0, h0, 1.0)
        traj = integrate("qnu", (lam0, h0), 1.0, config=config, record=False)
        if traj.termination.kind != "blowup_detected" or traj.termination.t_est is None:
            n_missed += 1
            continue
        err = abs(traj.termination.t_est - t_exact)
        worst_abs = max(worst_abs, err)
        worst = max(worst, err / max(1e-3, 1e-3 * t_exact))
    details = {
        "points": accepted,
        "undetected_blowups": n_missed,
        "worst_abs_error": worst_abs,
    }
    passed = accepted == 50 and n_missed == 0 and worst <= 1.0
    return passed, worst, 1.0, details


def _crit_ellipse(seed: int):
    rng = _rng(seed, 3)
    config = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-10, horizon=50.0)
    worst = 0.0
    unbounded = 0
    for _ in range(20):
        nu0 = rng.uniform(-1.0, 0.45)
        frac = rng.uniform(-0.95, 0.95)
        q0 = frac * math.sqrt(1.0 - 2.0 * nu0)
        traj = integrate("qnu", (q0, nu0), 1.0, config=config)
        if traj.termination.kind != "horizon_reached":
            unbounded += 1
            continue
        worst = max(worst, monitor_ellipse(traj, 1.0))
    passed = unbounded == 0 and worst <= 1e-8
    return passed, worst, 1e-8, {"unbounded": unbounded}


def _crit_swirl(seed: int):
    rng = _rng(seed, 4)
    config = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12, horizon=50.0)
    worst = 0.0
    unbounded = 0
    worst_j1 = 0.0
    worst_j2 = 0.0
    for _ in range(20):
        q0 = rng.uniform(-2.0, 2.0)
        nu0 = rng.uniform(-1.0, 0.9)
        tor0 = float(rng.choice([-1.0, 1.0])) * rng.uniform(0.1, 0.5)
        traj = integrate("swirl_q", (q0, nu0, tor0), 1.0, config=config)
        if traj.termination.kind != "horizon_reached":
            unbounded += 1
            continue
        q = traj.states[:, 0]
        nu = traj.states[:, 1]
        tor = traj.states[:, 2]
        v = 1.0 / (1.0 - nu)
        w = q * v
        c0 = tor[0] * v[0] ** 2
        j1 = tor * v**2
        j2 = w**2 + (1.0 - v) ** 2 + c0**2 / v**2
        d1 = float(np.max(np.abs(j1 - j1[0])) / max(abs(j1[0]), 1.0))
        d2 = float(np.max(np.abs(j2 - j2[0])) / max(abs(j2[0]), 1.0))
        worst_j1 = max(worst_j1, d1)
        worst_j2 = max(worst_j2, d2)
        worst = max(worst, d1, d2)
    passed = unbounded == 0 and worst <= 1e-8
    details = {
        "unbounded": unbounded,
        "worst_angular_moment_drift": worst_j1,
        "worst_energy_drift": worst_j2,
    }
    return passed, worst, 1e-8, details


def _ep_excursion_bound(q0: float, nu0: float, n: int, kappa: float = 1.0) -> float:
    """A priori sup-norm bound for a Poisson-coupled (q, nu) trajectory.

    b = (1 - n nu)^(-1/n) turns the system into the conservative
    oscillator b'' = -(kappa/n)(b - b^(1-n)) with energy
    E = b'^2/2 + V(b), whose barrier at b -> 0 bounds every excursion:
    sigma_max = exp(4E/kappa) for n = 2 and (n(n-2)E/kappa)^(n/(n-2))
    for n >= 3.  The same barrier is what makes the trajectory bounded
    at all, so the bound is sharp in shape if not in constants.
    """
    sigma0 = 1.0 - n * nu0
    if sigma0 <= 0.0:
        return math.inf
    b0 = sigma0 ** (-1.0 / n)
    if n == 2:
        potential = 0.5 * kappa * (0.5 * b0 * b0 - math.log(b0))
    else:
        potential = (kappa / n) * (0.5 * b0 * b0 + b0 ** (2 - n) / (n - 2))
    energy = 0.5 * (q0 * b0) ** 2 + potential
    if n == 2:
        b_min = math.exp(-2.0 * energy / kappa)
    else:
        b_min = (kappa / (n * (n - 2) * energy)) ** (1.0 / (n - 2))
    sigma_max = b_min ** (-n)
    q_max = math.sqrt(2.0 * energy) / b_min
    return max(sigma_max / n + 1.0 / n, q_max)


def _crit_euler_poisson(seed: int):
    rng = _rng(seed, 5)
    config = IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10, horizon=100.0)
    # Bounded is not the same as small: the oscillator analysis above
    # shows sup|q, nu| can reach exp(2 q0^2 / kappa) inside the sampled
    # box, beyond any fixed finite detector.  Sample the box but keep
    # only points whose excursion certificate clears the blowup
    # magnitude with two orders to spare, so a detector hit can only
    # mean a genuine pole.
    cap = 0.01 * config.blowup_magnitude
    blowups = 0
    accepted = 0
    rejected = 0
    for n in (2, 3):
        kept = 0
        while kept < 50 and rejected < 100_000:
            nu0 = rng.uniform(-3.0, 1.0 / n)
            q0 = rng.uniform(-5.0, 5.0)
            if _ep_excursion_bound(q0, nu0, n) > cap:
                rejected += 1
                continue
            kept += 1
            accepted += 1
            traj = integrate("ep", (q0, nu0), 1.0, n=n, config=config, record=False)
            if traj.termination.kind != "horizon_reached":
                blowups += 1
    details = {"points": accepted, "rejected_certificates": rejected}
    return blowups == 0 and accepted == 100, float(blowups), 0.0, details


@lru_cache(maxsize=1)
def _equivalence_runs():
    config = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)
    runs = []
    for name, params, n in _EQUIV_CASES:
        profile = _build(name, params, n)
        result = advance_ensemble(
            profile,
            n_chars=2048,
            t_end=_EQUIV_TIMES[-1],
            config=config,
            output_times=(0.0,) + _EQUIV_TIMES,
            grid_size=256,
        )
        runs.append((profile, result))
    return tuple(runs)


def _crit_flow_lagrange(seed: int):
    worst = 0.0
    details = {}
    for profile, result in _equivalence_runs():
        if result.termination.kind != "horizon_reached":
            return False, math.inf, 1e-4, {"termination": result.termination.kind}
        case_worst = 0.0
        for snap in result.snapshots:
            if snap.t == 0.0:
                continue
            top = float(flow_radius(profile, profile.r_max, snap.t))
            for i in range(snap.grid.size):
                r = float(snap.grid[i])
                if r <= 0.0:
                    r0 = 0.0
                elif r >= top:
                    r0 = profile.r_max
                else:
                    r0 = brentq(
                        lambda s: float(flow_radius(profile, s, snap.t)) - r,
                        0.0,
                        profile.r_max,
                        xtol=1e-13,
                        rtol=8.9e-16,
                    )
                rho_flow = float(pushforward_density(profile, r0, snap.t))
                case_worst = max(case_worst, abs(float(snap.rho[i]) - rho_flow))
        details[f"n={profile.dimension}"] = case_worst
        worst = max(worst, case_worst)
    return worst <= 1e-4, worst, 1e-4, details


def _crit_energy(seed: int):
    worst_closed = 0.0
    worst_ensemble = 0.0
    times = (0.5, 1.0, math.pi, 2.0 * math.pi)
    config = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)
    for name, params, n in _EQUIV_CASES:
        profile = _build(name, params, n)
        nodes, weights = energy_nodes(profile, 256)
        e_ref = conserved_energy(profile, nodes, weights, 0.0)
        scale = max(abs(e_ref), 1e-300)
        for t in times:
            e_t = conserved_energy(profile, nodes, weights, t)
            worst_closed = max(worst_closed, abs(e_t - e_ref) / scale)

        result = advance_ensemble(
            profile,
            t_end=times[-1],
            config=config,
            output_times=(0.0,) + times,
            seeds=nodes,
            grid=np.array([0.0, profile.r_max]),
        )
        if result.termination.kind != "horizon_reached":
            return False, math.inf, 1.0, {"termination": result.termination.kind}
        gam = nodes - np.asarray(profile.dphi0(nodes), dtype=float)
        factor = result.rho0 * nodes ** (n - 1) * weights
        energies = []
        for state in result.char_states:
            r = state[:, 0]
            u = state[:, 1]
            energies.append(0.5 * float(np.sum((u**2 + (r - gam) ** 2) * factor)))
        e0 = energies[0]
        scale = max(abs(e0), 1e-300)
        for e_t in energies[1:]:
            worst_ensemble = max(worst_ensemble, abs(e_t - e0) / scale)
    worst = max(worst_closed / 1e-10, worst_ensemble / 1e-6)
    details = {
        "closed_form_drift": worst_closed,
        "closed_form_budget": 1e-10,
        "ensemble_drift": worst_ensemble,
        "ensemble_budget": 1e-6,
    }
    return worst <= 1.0, worst, 1.0, details


def _crit_path_invariants(seed: int):
    worst_path = 0.0
    worst_density = 0.0
    for profile, result in _equivalence_runs():
        n = profile.dimension
        seeds = result.seeds
        ref = seeds * (1.0 - np.asarray(profile.nu0(seeds), dtype=float))
        denom = np.maximum(1.0, np.abs(ref))
        for state in result.char_states:
            r = state[:, 0]
            mu = state[:, 4]
            nu = state[:, 5]
            g = state[:, 6]
            worst_path = max(
                worst_path, float(np.max(np.abs(r * (1.0 - nu) - ref) / denom))
            )
            rho_ma = (1.0 - mu) * (1.0 - nu) ** (n - 1)
            rho_cont = result.rho0 * np.exp(-g)
            worst_density = max(worst_density, float(np.max(np.abs(rho_ma - rho_cont))))
    worst = max(worst_path / 1e-8, worst_density / 1e-6)
    details = {
        "path_invariant_drift": worst_path,
        "path_budget": 1e-8,
        "density_route_difference": worst_density,
        "density_budget": 1e-6,
    }
    return worst <= 1.0, worst, 1.0, details


_DIMENSION_PRESETS = (
    ("equilibrium", {}),
    ("quadratic", {"a": 0.2, "c": 0.3, "d": 1.0}),
    ("quadratic", {"a": -0.3, "c": 0.4, "d": 0.5}),
    ("quadratic", {"a": 0.0, "c": 1.0, "d": 0.0}),
    ("quadratic", {"a": 0.0, "c": -2.0, "d": 1.0}),
    ("quadratic", {"a": 0.45, "c": 0.1, "d": 1.0}),
    ("quadratic", {"a": -1.0, "c": 1.2, "d": 0.3}),
    ("quadratic", {"a": 0.3, "c": -0.9, "d": 0.2}),
    ("bump", {"a": 0.1, "b": 0.2, "c": 0.2, "d": 1.0, "rc": 2.0, "s": 1.0}),
    ("bump", {"a": -0.2, "b": -0.3, "c": -0.8, "d": 0.5, "rc": 2.5, "s": 1.5}),
)


def _crit_dimension_independence(seed: int):
    mismatches = 0
    details = {}
    for name, params in _DIMENSION_PRESETS:
        verdicts = []
        for n in (2, 3):
            profile = _build(name, params, n)
            grid = default_classification_grid(profile, 128)
            verdicts.append(classify_profile(profile, grid))
        v2, v3 = verdicts
        same = (
            v2.regime == v3.regime
            and v2.witness_r == v3.witness_r
            and v2.t_blowup == v3.t_blowup
        )
        label = name + "(" + ",".join(f"{k}={v:g}" for k, v in params.items()) + ")"
        details[label] = v2.regime if same else f"{v2.regime} != {v3.regime}"
        if not same:
            mismatches += 1
    return mismatches == 0, float(mismatches), 0.0, details


def _crit_phase_diagram(seed: int):
    from .cli import cmd_sweep

    def run_config(out: str, threads: int) -> RunConfig:
        config = RunConfig(
            threads=threads,
            out=out,
            sweep_mode="pointwise_threshold",
            sweep_axis1=SweepAxis("lambda0", -2.0, 2.0, 41),
            sweep_axis2=SweepAxis("h0", -1.0, 0.45, 41),
        )
        return config.validate()

    with tempfile.TemporaryDirectory() as tmp:
        dir1 = str(Path(tmp) / "serial")
        dir8 = str(Path(tmp) / "threaded")
        quiet = io.StringIO()
        with contextlib.redirect_stdout(quiet):
            cmd_sweep(run_config(dir1, 1))
            cmd_sweep(run_config(dir8, 8))
        bytes1 = (Path(dir1) / "sweep.csv").read_bytes()
        bytes8 = (Path(dir8) / "sweep.csv").read_bytes()
        identical = bytes1 == bytes8

        mismatches = 0
        rows = bytes1.decode("utf-8").splitlines()[1:]
        for row in rows:
            cells = row.split(",")
            lam0 = float(cells[0])
            h0 = float(cells[1])
            analytic = (
                "subcritical" if lam0 * lam0 < 1.0 - 2.0 * h0 else "supercritical"
            )
            if cells[2] != analytic:
                mismatches += 1

    details = {
        "csv_identical_across_threads": identical,
        "nodes": len(rows),
        "node_mismatches": mismatches,
    }
    passed = identical and mismatches == 0 and len(rows) == 41 * 41
    return passed, float(mismatches + (0 if identical else 1)), 0.0, details


_REGISTRY = (
    (
        "threshold_sharpness",
        "bisected stability boundary matches sqrt(kappa(1-2 h0)) to 1e-3",
        _crit_sharpness,
    ),
    (
        "blowup_time_agreement",
        "integrator pole estimate matches the closed-form blowup time on 50 "
        "supercritical samples",
        _crit_blowup_agreement,
    ),
    (
        "ellipse_invariant",
        "w^2 + kappa(1-v)^2 drifts below 1e-8 on 20 subcritical trajectories "
        "to horizon 50",
        _crit_ellipse,
    ),
    (
        "swirl_invariants",
        "rotational invariants conserved to 1e-8 and the (q, nu, theta/r) "
        "branch stays bounded",
        _crit_swirl,
    ),
    (
        "euler_poisson_boundedness",
        "no blowups for nu0 < 1/n at n = 2, 3 over 100 samples, horizon 100",
        _crit_euler_poisson,
    ),
    (
        "flow_lagrange_equivalence",
        "ensemble density snapshots match the closed-form pushforward to 1e-4",
        _crit_flow_lagrange,
    ),
    (
        "energy_conservation",
        "oscillator energy constant to 1e-10 (closed form) and 1e-6 (ensemble)",
        _crit_energy,
    ),
    (
        "path_invariants",
        "r(1-nu) constant to 1e-8; spectral vs continuity density to 1e-6",
        _crit_path_invariants,
    ),
    (
        "dimension_independence",
        "classification verdicts identical for n = 2 and n = 3 on 10 presets",
        _crit_dimension_independence,
    ),
    (
        "phase_diagram_golden",
        "41x41 pointwise sweep reproduces the analytic region, byte-identical "
        "across thread counts",
        _crit_phase_diagram,
    ),
)


def available_criteria() -> tuple[str, ...]:
    return tuple(name for name, _, _ in _REGISTRY)


def resolve_suites(selection) -> list[str]:
    """Expand a suite selection ('all' or criterion names) into an
    ordered, deduplicated list of criterion names."""
    names = available_criteria()
    if not selection:
        raise ConfigError("empty suite selection: nothing to validate")
    chosen: set[str] = set()
    for item in selection:
        if item == "all":
            chosen.update(names)
        elif item in names:
            chosen.add(item)
        else:
            raise ConfigError(
                f"unknown validation suite {item!r}; "
                f"available: all, {', '.join(names)}"
            )
    return [name for name in names if name in chosen]


def run_criteria(names, seed: int = 0) -> list[CriterionResult]:
    lookup = {name: (desc, func) for name, desc, func in _REGISTRY}
    results = []
    for name in names:
        desc, func = lookup[name]
        start = time.perf_counter()
        passed, measured, budget, details = func(seed)
        results.append(
            CriterionResult(
                name=name,
                description=desc,
                passed=bool(passed),
                measured=float(measured),
                budget=float(budget),
                elapsed_s=time.perf_counter() - start,
                details=details,
            )
        )
    return results
