"""Special-function kernel against quadrature, closed forms, and scipy."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy import special as sp

from qdefault import specfun

GRID_SHAPES = [0.25, 0.5, 1.0, 1.5, 3.0, 10.0]
GRID_Z = np.arange(0.01, 1.0, 0.01)


# ---------------------------------------------------------------------------
# erf / normal_cdf
# ---------------------------------------------------------------------------

def test_erf_at_zero():
    assert specfun.erf(0.0) == 0.0


def test_erf_saturation():
    assert abs(specfun.erf(6.0) - 1.0) < 1e-12


def test_erf_one_vs_quadrature_oracle():
    oracle, err = integrate.quad(lambda t: 2.0 / np.sqrt(np.pi) * np.exp(-t * t), 0.0, 1.0)
    assert err < 1e-12
    assert abs(specfun.erf(1.0) - oracle) < 1e-12
    assert abs(specfun.erf(1.0) - 0.8427007929497149) < 1e-12


def test_erf_against_scipy_grid():
    x = np.linspace(-8.0, 8.0, 321)
    assert np.max(np.abs(specfun.erf(x) - sp.erf(x))) < 1e-12


@given(st.floats(min_value=-10.0, max_value=10.0, allow_nan=False))
def test_erf_odd_symmetry_exact(x):
    assert specfun.erf(-x) == -specfun.erf(x)


def test_erf_rejects_non_finite():
    for bad in (np.inf, -np.inf, np.nan):
        with pytest.raises(ValueError):
            specfun.erf(bad)


def test_normal_cdf_center_and_tails():
    assert specfun.normal_cdf(0.0) == 0.5
    assert abs(specfun.normal_cdf(8.0) - 1.0) < 1e-14
    oracle, err = integrate.quad(
        lambda t: np.exp(-t * t / 2.0) / np.sqrt(2.0 * np.pi), -40.0, -2.0
    )
    assert err < 1e-11
    assert abs(specfun.normal_cdf(-2.0) - oracle) < 1e-11
    assert abs(specfun.normal_cdf(-2.0) - 0.022750131948179195) < 1e-14


def test_normal_cdf_symmetry_identity():
    z = np.linspace(-10.0, 10.0, 401)
    total = np.asarray(specfun.normal_cdf(z)) + np.asarray(specfun.normal_cdf(-z))
    assert np.max(np.abs(total - 1.0)) < 1e-14


def test_normal_cdf_monotone():
    z = np.linspace(-12.0, 12.0, 2001)
    vals = np.asarray(specfun.normal_cdf(z))
    assert np.all(np.diff(vals) >= 0.0)


def test_normal_cdf_rejects_non_finite():
    with pytest.raises(ValueError):
        specfun.normal_cdf(np.nan)


# ---------------------------------------------------------------------------
# log_gamma / digamma / beta
# ---------------------------------------------------------------------------

def test_log_gamma_known_values():
    assert abs(specfun.log_gamma(1.0)) < 1e-14
    assert abs(specfun.log_gamma(0.5) - 0.5 * np.log(np.pi)) < 1e-14
    assert abs(specfun.log_gamma(5.0) - np.log(24.0)) < 1e-13


def test_log_gamma_relative_accuracy_vs_scipy():
    x = np.concatenate([np.geomspace(1e-8, 0.4, 25), np.geomspace(0.5, 1e12, 60)])
    mine = np.asarray(specfun.log_gamma(x))
    ref = sp.gammaln(x)
    rel = np.abs(mine - ref) / np.maximum(np.abs(ref), 1.0)
    assert np.max(rel) < 1e-12


@given(st.floats(min_value=1e-6, max_value=1e6, allow_nan=False))
@settings(max_examples=60)
def test_log_gamma_recurrence(x):
    lhs = specfun.log_gamma(x + 1.0)
    rhs = specfun.log_gamma(x) + np.log(x)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_log_gamma_domain():
    for bad in (0.0, -1.0, np.nan):
        with pytest.raises(ValueError):
            specfun.log_gamma(bad)


def test_digamma_vs_scipy():
    x = np.geomspace(1e-4, 1e8, 80)
    assert np.max(np.abs(np.asarray(specfun.digamma(x)) - sp.digamma(x))
                  / np.maximum(np.abs(sp.digamma(x)), 1.0)) < 1e-11


def test_beta_known_values():
    assert abs(specfun.beta(0.5, 0.5) - np.pi) < 1e-13
    assert abs(specfun.beta(1.5, 0.5) - np.pi / 2.0) < 1e-13
    for n in (0.25, 1.0, 7.0):
        assert abs(specfun.beta(1.0, n) - 1.0 / n) < 1e-13


def test_beta_symmetry_and_domain():
    for m, n in [(0.3, 2.2), (1.7, 5.0), (0.25, 0.25)]:
        assert specfun.beta(m, n) == pytest.approx(specfun.beta(n, m), rel=1e-14)
    with pytest.raises(ValueError):
        specfun.beta(0.0, 1.0)
    with pytest.raises(ValueError):
        specfun.beta(1.0, -2.0)


# ---------------------------------------------------------------------------
# Regularized incomplete Beta
# ---------------------------------------------------------------------------

def test_reg_inc_beta_endpoints():
    for m in GRID_SHAPES:
        assert specfun.reg_inc_beta(m, 0.5, 1.0) == 1.0
        assert specfun.reg_inc_beta(m, 0.5, 0.0) == 0.0


def test_reg_inc_beta_arcsine_identity():
    # I_z(1/2, 1/2) = (2/pi) arcsin(sqrt(z))
    z = np.arange(0.05, 1.0, 0.05)
    mine = np.asarray(specfun.reg_inc_beta(0.5, 0.5, z))
    oracle = 2.0 / np.pi * np.arcsin(np.sqrt(z))
    assert np.max(np.abs(mine - oracle)) < 1e-12
    assert abs(specfun.reg_inc_beta(0.5, 0.5, 0.5) - 0.5) < 1e-12


def trig_oracle_15_05(z):
    # int_0^z t^{1/2} (1-t)^{-1/2} dt = theta - sin(2 theta)/2 at theta = arcsin(sqrt(z)),
    # normalized by B(1.5, 0.5) = pi/2.
    theta = np.arcsin(np.sqrt(z))
    return (theta - np.sin(2.0 * theta) / 2.0) / (np.pi / 2.0)


def test_reg_inc_beta_trig_closed_form():
    z = np.arange(0.05, 1.0, 0.05)
    mine = np.asarray(specfun.reg_inc_beta(1.5, 0.5, z))
    assert np.max(np.abs(mine - trig_oracle_15_05(z))) < 1e-12
    assert abs(specfun.reg_inc_beta(1.5, 0.5, 0.5) - 0.18169011381620932) < 1e-12


def test_reg_inc_beta_symmetry_identity_grid():
    m, n, z = np.meshgrid(GRID_SHAPES, GRID_SHAPES, GRID_Z, indexing="ij")
    total = np.asarray(specfun.reg_inc_beta(m, n, z)) + np.asarray(
        specfun.reg_inc_beta(n, m, 1.0 - z)
    )
    assert np.max(np.abs(total - 1.0)) < 1e-10


def test_reg_inc_beta_monotone_in_z_grid():
    m, n, z = np.meshgrid(GRID_SHAPES, GRID_SHAPES, GRID_Z, indexing="ij")
    vals = np.asarray(specfun.reg_inc_beta(m, n, z))
    assert np.all(np.diff(vals, axis=2) >= -1e-13)


def test_reg_inc_beta_vs_adaptive_quadrature():
    z_grid = [0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99]
    for m in GRID_SHAPES:
        for n in GRID_SHAPES:
            b = specfun.beta(m, n)
            for z in z_grid:
                # algebraic weights absorb the endpoint singularities; integrate
                # whichever side keeps the opposite endpoint away
                if z <= 0.5:
                    part, err = integrate.quad(
                        lambda t: (1.0 - t) ** (n - 1.0), 0.0, z,
                        weight="alg", wvar=(m - 1.0, 0.0), limit=200,
                    )
                    oracle = part / b
                else:
                    part, err = integrate.quad(
                        lambda t: t ** (m - 1.0), z, 1.0,
                        weight="alg", wvar=(0.0, n - 1.0), limit=200,
                    )
                    oracle = 1.0 - part / b
                assert err < 1e-9
                assert abs(specfun.reg_inc_beta(m, n, z) - oracle) < 1e-8


def test_reg_inc_beta_extreme_shape_vs_scipy():
    # large first shape with n = 1/2: the regime exercised by the Gaussian limit
    a = 1e6
    for z in (0.999999995, 0.99999950000025, 0.9999820003239941):
        assert abs(specfun.reg_inc_beta(a, 0.5, z) - sp.betainc(a, 0.5, z)) < 1e-9


def test_reg_inc_beta_domain_errors():
    with pytest.raises(ValueError):
        specfun.reg_inc_beta(1.0, 1.0, -0.1)
    with pytest.raises(ValueError):
        specfun.reg_inc_beta(1.0, 1.0, 1.1)
    with pytest.raises(ValueError):
        specfun.reg_inc_beta(0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        specfun.reg_inc_beta(1.0, -1.0, 0.5)


# ---------------------------------------------------------------------------
# Incomplete Gamma
# ---------------------------------------------------------------------------

def test_gammainc_complement_and_scipy():
    a = np.array([0.5, 1.0, 2.5, 10.0, 50.0])
    x = np.array([0.0, 0.3, 1.0, 7.0, 80.0])
    aa, xx = np.meshgrid(a, x)
    p = np.asarray(specfun.gammainc_p(aa, xx))
    q = np.asarray(specfun.gammainc_q(aa, xx))
    assert np.max(np.abs(p + q - 1.0)) < 1e-13
    assert np.max(np.abs(p - sp.gammainc(aa, xx))) < 1e-12


def test_gammainc_domain():
    with pytest.raises(ValueError):
        specfun.gammainc_p(0.0, 1.0)
    with pytest.raises(ValueError):
        specfun.gammainc_p(1.0, -1.0)


# ---------------------------------------------------------------------------
# q-Gaussian normalization constant
# ---------------------------------------------------------------------------

def test_c_q_known_values():
    assert abs(specfun.c_q(2.0) - np.pi) < 1e-12
    assert abs(specfun.c_q(1.5) - (np.pi / 2.0) * np.sqrt(2.0)) < 1e-12
    oracle = specfun.beta(0.5, 1.5) / np.sqrt(0.5)
    assert specfun.c_q(1.5) == pytest.approx(oracle, rel=1e-14)


def test_c_q_gaussian_limit():
    assert abs(specfun.c_q(1.0 + 1e-8) - np.sqrt(np.pi)) < 1e-6


def test_c_q_continuous_and_finite():
    q = np.linspace(1.0 + 1e-6, 3.0 - 1e-6, 4001)
    vals = np.asarray(specfun.c_q(q))
    assert np.all(np.isfinite(vals)) and np.all(vals > 0.0)
    # no jumps anywhere on the interior grid
    rel_step = np.abs(np.diff(vals)) / vals[:-1]
    assert np.max(rel_step[q[:-1] < 2.9]) < 1e-2


def test_c_q_domain():
    for bad in (1.0, 3.0, 0.5, 3.5):
        with pytest.raises(ValueError):
            specfun.c_q(bad)
