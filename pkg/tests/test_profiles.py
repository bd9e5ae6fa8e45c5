"""Profile construction, derived density, and the rearrangement map.

The density is never free data: it is fixed by the determinant
constraint, so most assertions here are closed-form arithmetic plus the
agreement of the two independent routes to Gamma^{-1}.
"""

import math

import numpy as np
import pytest

from emaflow import DomainError, ProfilePreset, derive_density, gamma_inverse
from emaflow.errors import QuadratureError
from emaflow.profiles import (
    RadialProfile,
    gamma_inverse_identity,
    transported_primitive,
)

PRESET_GRID = [
    ("equilibrium", {}),
    ("quadratic", {"a": 0.2, "c": 0.3, "d": 1.0}),
    ("quadratic", {"a": -0.3, "c": 0.4, "d": 0.5}),
    ("bump", {"a": 0.1, "b": 0.2, "c": 0.2, "d": 1.0, "rc": 2.0, "s": 1.0}),
    ("bump", {"a": -0.2, "b": -0.3, "c": -0.8, "d": 0.5, "rc": 2.5, "s": 1.5}),
]


def _zeros(r):
    return np.zeros_like(np.asarray(r, dtype=float))


def step_density_profile():
    """n=3 profile whose density is 1 on [0,1] and 0 beyond.

    dphi0 = max(r-1, 0) makes mu0 jump to 1 at r=1, which kills the
    density there; e0(2) = integral of s^2 over [0,1] = 1/3.
    """

    def dphi0(r):
        r_arr = np.asarray(r, dtype=float)
        return np.maximum(r_arr - 1.0, 0.0)

    def d2phi0(r):
        r_arr = np.asarray(r, dtype=float)
        return np.where(r_arr > 1.0, 1.0, 0.0)

    return RadialProfile(
        dimension=3, kappa=1.0,
        u0=_zeros, du0=_zeros, dphi0=dphi0, d2phi0=d2phi0,
        r_max=4.0, name="step-density",
    )


# --- derive_density -------------------------------------------------------

def test_density_equilibrium_is_one(equilibrium):
    for r in (0.0, 1e-9, 0.5, 2.0, 5.0):
        assert derive_density(equilibrium, r) == 1.0


def test_density_one_dimensional_is_one_minus_mu():
    # In one dimension the ratio eigenvalue carries exponent zero.
    c = 0.25
    prof = RadialProfile(
        dimension=1, kappa=1.0,
        u0=_zeros, du0=_zeros,
        dphi0=lambda r: c * np.asarray(r, dtype=float),
        d2phi0=lambda r: np.full_like(np.asarray(r, dtype=float), c),
        r_max=5.0,
    )
    for r in (0.0, 0.3, 1.0, 4.9):
        assert derive_density(prof, r) == pytest.approx(1.0 - c, abs=1e-15)


def test_density_quadratic_core_value():
    prof = ProfilePreset("quadratic", {"a": 0.3}).build()
    assert derive_density(prof, 1.0) == pytest.approx(0.49, abs=1e-15)
    # origin limit: both eigenvalues coincide, so the power is n
    assert derive_density(prof, 0.0) == pytest.approx(0.49, abs=1e-15)


def test_density_rejects_out_of_domain(subcritical_profile):
    with pytest.raises(DomainError):
        derive_density(subcritical_profile, -0.1)
    with pytest.raises(DomainError):
        derive_density(subcritical_profile, subcritical_profile.r_max + 1.0)


def test_density_vectorized(subcritical_profile):
    r = np.array([0.0, 0.5, 1.0, 2.0])
    values = derive_density(subcritical_profile, r)
    assert values.shape == r.shape
    for i, ri in enumerate(r):
        assert values[i] == derive_density(subcritical_profile, float(ri))


# --- transported_primitive ------------------------------------------------

def test_mass_primitive_equilibrium_disk(equilibrium):
    # rho0 = 1, n = 2: integral of s over [0,1]
    assert transported_primitive(equilibrium, 1.0) == pytest.approx(0.5, abs=1e-12)


def test_mass_primitive_at_zero(equilibrium):
    assert transported_primitive(equilibrium, 0.0) == 0.0


def test_mass_primitive_step_density():
    prof = step_density_profile()
    assert transported_primitive(prof, 2.0) == pytest.approx(1.0 / 3.0, abs=1e-9)
    # nothing accumulates beyond the support
    assert transported_primitive(prof, 4.0) == pytest.approx(1.0 / 3.0, abs=1e-9)


@pytest.mark.parametrize("name,params", PRESET_GRID)
def test_mass_primitive_monotone(name, params):
    prof = ProfilePreset(name, params).build()
    grid = np.geomspace(1e-3 * prof.r_max, prof.r_max, 24)
    values = [transported_primitive(prof, float(r)) for r in grid]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


# --- gamma_inverse --------------------------------------------------------

def test_gamma_equilibrium_is_identity(equilibrium):
    for r in (0.0, 0.25, 1.0, 3.7):
        assert gamma_inverse(equilibrium, r) == pytest.approx(r, abs=1e-12)
        assert gamma_inverse_identity(equilibrium, r) == r


def test_gamma_constant_density_scaling():
    # rho0 = (1-a)^2 constant, so Gamma^{-1}(r) = (1-a) r.
    prof = ProfilePreset("quadratic", {"a": 0.3}).build()
    assert gamma_inverse(prof, 1.0) == pytest.approx(0.7, abs=1e-10)
    for r in (0.5, 2.0):
        assert gamma_inverse(prof, r) == pytest.approx(0.7 * r, abs=1e-9)


@pytest.mark.parametrize("name,params", PRESET_GRID)
def test_gamma_routes_agree(name, params):
    prof = ProfilePreset(name, params).build()
    for r in (0.3, 1.0, 2.4, prof.r_max):
        quad = gamma_inverse(prof, r)
        ident = gamma_inverse_identity(prof, r)
        assert quad == pytest.approx(ident, abs=1e-9)


@pytest.mark.parametrize("name,params", PRESET_GRID)
def test_gamma_power_identity(name, params):
    # Gamma^{-1}(r)^n = n e0(r) by definition of the map.
    n = 2
    prof = ProfilePreset(name, params).build(dimension=n)
    for r in (0.7, 3.1):
        lhs = gamma_inverse(prof, r) ** n
        rhs = n * transported_primitive(prof, r)
        assert lhs == pytest.approx(rhs, abs=1e-10)


# --- profile invariants ---------------------------------------------------

@pytest.mark.parametrize("name,params", PRESET_GRID)
def test_density_nonnegative_on_grid(name, params):
    prof = ProfilePreset(name, params).build()
    grid = np.geomspace(1e-4 * prof.r_max, prof.r_max, 64)
    assert np.all(derive_density(prof, grid) >= 0.0)


@pytest.mark.parametrize("name,params", PRESET_GRID)
def test_origin_consistency(name, params):
    # nu0(r) - mu0(0) vanishes linearly with slope at most 1 for the
    # preset family (quadratic: exactly zero; bump: support is away
    # from the origin).
    prof = ProfilePreset(name, params).build()
    mu_origin = float(prof.d2phi0(0.0))
    for r in (prof.r_eps, 1e-4, 1e-2):
        assert abs(float(prof.nu0(r)) - mu_origin) <= 1.0 * r


def test_ratio_forms_have_origin_limits(subcritical_profile):
    prof = subcritical_profile
    assert float(prof.q0(0.0)) == pytest.approx(float(prof.du0(0.0)), abs=1e-15)
    assert float(prof.nu0(0.0)) == pytest.approx(float(prof.d2phi0(0.0)), abs=1e-15)
    # ratio and direct evaluation cross over smoothly at r_eps
    r = 2.0 * prof.r_eps
    assert float(prof.q0(r)) == pytest.approx(float(prof.u0(r)) / r, rel=1e-9)


# --- construction errors --------------------------------------------------

def test_unknown_preset_rejected():
    with pytest.raises(DomainError, match="unknown preset"):
        ProfilePreset("sawtooth").build()


def test_unused_parameters_rejected():
    with pytest.raises(DomainError, match="unused parameters"):
        ProfilePreset("quadratic", {"a": 0.1, "zz": 3.0}).build()


def test_bump_support_must_fit():
    with pytest.raises(DomainError, match="support"):
        ProfilePreset("bump", {"rc": 0.5, "s": 1.0}).build()
    with pytest.raises(DomainError, match="support"):
        ProfilePreset("bump", {"rc": 4.8, "s": 1.0}).build()


def test_nonvanishing_origin_data_rejected():
    with pytest.raises(DomainError, match="vanish"):
        RadialProfile(
            dimension=2, kappa=1.0,
            u0=lambda r: np.ones_like(np.asarray(r, dtype=float)),
            du0=_zeros, dphi0=_zeros, d2phi0=_zeros, r_max=5.0,
        )


def test_bad_dimension_and_kappa_rejected():
    with pytest.raises(DomainError):
        RadialProfile(dimension=0, kappa=1.0, u0=_zeros, du0=_zeros,
                      dphi0=_zeros, d2phi0=_zeros, r_max=5.0)
    with pytest.raises(DomainError):
        RadialProfile(dimension=2, kappa=0.0, u0=_zeros, du0=_zeros,
                      dphi0=_zeros, d2phi0=_zeros, r_max=5.0)


def test_negative_velocity_width_rejected():
    with pytest.raises(DomainError):
        ProfilePreset("quadratic", {"d": -1.0}).build()
