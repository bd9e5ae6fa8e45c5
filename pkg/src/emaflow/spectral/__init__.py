"""Spectral ODE systems, adaptive integrator, and invariant monitors."""

from ._backend import BACKEND
from .integrator import IntegratorConfig, Termination, Trajectory, integrate
from .monitors import monitor_ellipse, monitor_swirl_invariants
from .systems import (
    SYSTEM_DIMS,
    SpectralState,
    SwirlState,
    rhs_ep_qnu,
    rhs_pmu,
    rhs_qnu,
    rhs_swirl,
    rhs_swirl_q,
    rhs_wv,
)

__all__ = [
    "BACKEND",
    "IntegratorConfig",
    "Termination",
    "Trajectory",
    "integrate",
    "monitor_ellipse",
    "monitor_swirl_invariants",
    "SYSTEM_DIMS",
    "SpectralState",
    "SwirlState",
    "rhs_ep_qnu",
    "rhs_pmu",
    "rhs_qnu",
    "rhs_swirl",
    "rhs_swirl_q",
    "rhs_wv",
]
