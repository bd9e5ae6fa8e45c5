"""Adaptive Gauss-Kronrod panels and the fixed Gauss-Legendre rule."""

import math

import numpy as np
import pytest

from emaflow.errors import DomainError, QuadratureError
from emaflow.quadrature import gauss_legendre_nodes, integrate_adaptive


def test_polynomial_exact():
    # a single 15-point panel integrates degree <= 22 exactly
    value, err = integrate_adaptive(lambda s: 5.0 * s**4, 0.0, 2.0)
    assert value == pytest.approx(32.0, abs=1e-12)
    assert err <= 1e-12


def test_gaussian_against_erf():
    value, _ = integrate_adaptive(lambda s: np.exp(-(s**2)), 0.0, 1.0)
    exact = 0.5 * math.sqrt(math.pi) * math.erf(1.0)
    assert value == pytest.approx(exact, abs=1e-13)


def test_empty_interval():
    assert integrate_adaptive(lambda s: s, 1.0, 1.0) == (0.0, 0.0)


def test_kink_is_resolved():
    value, _ = integrate_adaptive(lambda s: np.abs(s - 0.5), 0.0, 1.0)
    assert value == pytest.approx(0.25, abs=1e-12)


def test_reversed_interval_rejected():
    with pytest.raises(DomainError):
        integrate_adaptive(lambda s: s, 1.0, 0.0)


def test_nonfinite_integrand_rejected():
    # nan left of 0.5, which the first panel already samples
    with pytest.raises(QuadratureError, match="finite"):
        integrate_adaptive(lambda s: np.where(s < 0.5, np.nan, 1.0), 0.0, 1.0)


def test_panel_budget_exhaustion():
    with pytest.raises(QuadratureError, match="stalled"):
        integrate_adaptive(
            lambda s: np.sin(1e4 * s), 0.0, 1.0, abs_tol=1e-15, rel_tol=1e-15,
            max_panels=4,
        )


def test_scalar_integrand_rejected():
    # the integrand must be vectorized; a scalar return is a bug in the caller
    with pytest.raises(TypeError):
        integrate_adaptive(lambda s: 1.0, 0.0, 1.0)


def test_legendre_degree_exactness():
    nodes, weights = gauss_legendre_nodes(5, 0.0, 1.0)
    assert nodes.shape == weights.shape == (5,)
    # 5 points are exact through degree 9
    assert np.sum(weights * nodes**8) == pytest.approx(1.0 / 9.0, abs=1e-14)
    assert np.sum(weights * nodes**9) == pytest.approx(1.0 / 10.0, abs=1e-14)
    assert np.all(weights > 0)
    assert np.all(np.diff(nodes) > 0)


def test_legendre_invalid_requests():
    with pytest.raises(DomainError):
        gauss_legendre_nodes(0, 0.0, 1.0)
    with pytest.raises(DomainError):
        gauss_legendre_nodes(4, 1.0, 1.0)
    with pytest.raises(DomainError):
        gauss_legendre_nodes(4, 0.0, math.inf)
