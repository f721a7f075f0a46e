"""Structural default models.

Merton and Black-Cox baselines with constant return precision, their
q-Gaussian generalizations driven by the generalized distance-to-default,
large- and small-DTD asymptotic approximations, and the absorbing-boundary
transition density used by the first-passage Monte Carlo checks.

Conventions: ``x0 = ln(V0 / D)`` is log inverse leverage, ``t`` is a horizon
in trading days, drifts are per trading day, and the q-model operations take
zero drift (the simplified DTD).  All operations are pure and broadcast over
numpy arrays.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import specfun
from .dist import QGaussianParams, qgaussian_cdf, qgaussian_two_sided_tail

__all__ = [
    "YEAR_DAYS",
    "BarrierCrossedWarning",
    "AsymptoticRegimeWarning",
    "PDModel",
    "DistanceToDefault",
    "PDCurve",
    "merton_dtd",
    "generalized_dtd",
    "distance_to_default",
    "merton_pd",
    "blackcox_pd",
    "qmerton_pd",
    "qblackcox_pd",
    "qblackcox_asymptotic_far",
    "qblackcox_asymptotic_near",
    "absorbing_green",
    "pd_curve",
]

#: Trading days per year; the 1-year horizon of the headline PD numbers.
YEAR_DAYS = 250


class BarrierCrossedWarning(UserWarning):
    """Start value at or below the default barrier; PD reported as 1."""


class AsymptoticRegimeWarning(UserWarning):
    """Asymptotic formula evaluated near the edge of its validity regime."""


class PDModel(str, Enum):
    MERTON = "merton"
    BLACK_COX = "blackcox"
    Q_MERTON = "qmerton"
    Q_BLACK_COX = "qblackcox"


def _check_pos(value, name: str) -> None:
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr) & (arr > 0.0)):
        raise ValueError(f"{name} must be positive and finite")


# ---------------------------------------------------------------------------
# Distances to default
# ---------------------------------------------------------------------------

def merton_dtd(x0, m, beta, t):
    """Merton distance to default (x0 + m t) sqrt(beta / t)."""
    _check_pos(beta, "beta")
    _check_pos(t, "t")
    x0 = np.asarray(x0, dtype=float)
    out = (x0 + np.asarray(m, float) * t) * np.sqrt(np.asarray(beta, float) / t)
    return float(out) if out.ndim == 0 else out


def generalized_dtd(x0, beta_tilde, t):
    """Generalized distance to default x0 sqrt(beta_tilde / t).

    Built from the q-Gaussian scale instead of a return precision, so it
    stays finite even when the return variance is divergent or undefined.
    """
    _check_pos(beta_tilde, "beta_tilde")
    _check_pos(t, "t")
    x0 = np.asarray(x0, dtype=float)
    out = x0 * np.sqrt(np.asarray(beta_tilde, float) / t)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DistanceToDefault:
    """Simple (drift-free Merton) and generalized DTD at one horizon."""

    simple: float
    generalized: float
    horizon_days: float
    with_drift: float | None = None


def distance_to_default(x0, params: QGaussianParams, gauss_beta, t, m=None) -> DistanceToDefault:
    """Bundle the simple and generalized DTD for one firm state and horizon."""
    dd = DistanceToDefault(
        simple=float(merton_dtd(x0, 0.0, gauss_beta, t)),
        generalized=float(generalized_dtd(x0, params.beta_tilde, t)),
        horizon_days=float(t),
        with_drift=None if m is None else float(merton_dtd(x0, m, gauss_beta, t)),
    )
    return dd


# ---------------------------------------------------------------------------
# Cumulative default probabilities
# ---------------------------------------------------------------------------

def merton_pd(x0, m, beta, t):
    """Merton cumulative PD: Phi(-dd) with the drifted DTD."""
    dd = merton_dtd(x0, m, beta, t)
    out = np.asarray(specfun.normal_cdf(-np.asarray(dd, float)))
    return float(out) if out.ndim == 0 else out


def _warn_crossed(x0_arr) -> np.ndarray:
    crossed = x0_arr < 0.0
    if np.any(crossed):
        warnings.warn(
            "x0 < 0: asset value already below the default barrier; PD set to 1",
            BarrierCrossedWarning,
            stacklevel=3,
        )
    return crossed


def blackcox_pd(x0, m, beta, t):
    """Black-Cox first-passage cumulative PD with an absorbing barrier at x = 0.

    Equals exactly twice the drift-free Merton PD when m = 0.  ``x0 < 0``
    (barrier already crossed) yields PD = 1 with a warning rather than an
    error so that batch pipelines keep running over distressed firms.
    """
    _check_pos(beta, "beta")
    _check_pos(t, "t")
    x0_arr = np.asarray(x0, dtype=float)
    crossed = _warn_crossed(x0_arr)
    m_arr = np.asarray(m, dtype=float)
    beta_arr = np.asarray(beta, dtype=float)
    scale = np.sqrt(beta_arr / t)
    first = np.asarray(specfun.normal_cdf(-(x0_arr + m_arr * t) * scale))
    second_cdf = np.asarray(specfun.normal_cdf(-(x0_arr - m_arr * t) * scale))
    with np.errstate(divide="ignore", over="ignore"):
        log_second = -2.0 * m_arr * x0_arr * beta_arr + np.log(second_cdf)
        second = np.where(second_cdf > 0.0, np.exp(log_second), 0.0)
    out = np.clip(first + second, 0.0, 1.0)
    out = np.where(crossed, 1.0, out)
    return float(out) if out.ndim == 0 else out


def qmerton_pd(p: QGaussianParams, x0, t):
    """q-Gaussian Merton PD: CDF of the q-Gaussian at the default point.

    For x0 >= 0 this is (1/2) I_z(a, 1/2) with z = 1 / (1 + (q-1) dd^2 / 2);
    at q = 1 it reduces exactly to the drift-free Merton formula.
    """
    _check_pos(t, "t")
    out = qgaussian_cdf(p, 0.0 * np.asarray(x0, float), x0=np.asarray(x0, float), t=t)
    out = np.clip(np.asarray(out), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def qblackcox_pd(p: QGaussianParams, x0, t):
    """q-Gaussian Black-Cox PD: I_z(a, 1/2) at z = 1 / (1 + (q-1) dd^2 / 2).

    Exactly twice :func:`qmerton_pd` for solvent firms; finite and in (0, 1)
    even where the return variance diverges.  ``x0 < 0`` yields a flagged
    PD = 1, and q = 1 dispatches to the drift-free Black-Cox baseline.
    """
    _check_pos(t, "t")
    x0_arr = np.asarray(x0, dtype=float)
    crossed = _warn_crossed(x0_arr)
    safe_x0 = np.where(crossed, 0.0, x0_arr)
    if p.is_gaussian:
        base = 2.0 * np.asarray(
            specfun.normal_cdf(-safe_x0 * np.sqrt(p.beta_tilde / t))
        )
    else:
        dd = safe_x0 * np.sqrt(p.beta_tilde / t)
        base = np.asarray(qgaussian_two_sided_tail(p, dd))
    out = np.where(crossed, 1.0, np.clip(base, 0.0, 1.0))
    return float(out) if out.ndim == 0 else out


def qblackcox_asymptotic_far(p: QGaussianParams, x0, t):
    """Power-law approximation of the q-Black-Cox PD for (q-1) dd^2 >> 1.

    PD ~ [2 (q-1)^((q-2)/(q-1)) / ((3-q) C_q)] (sqrt(2)/dd)^n with
    n = (3-q)/(q-1).  Raises outside (q-1) dd^2 >= 10 and warns below 100.
    """
    if p.is_gaussian:
        raise ValueError("far asymptote requires q > 1 (Gaussian tails are not power laws)")
    _check_pos(t, "t")
    dd = generalized_dtd(x0, p.beta_tilde, t)
    regime = (p.q - 1.0) * np.asarray(dd, float) ** 2
    if np.any(regime < 10.0):
        raise ValueError("far asymptote requires (q-1) dd^2 >= 10")
    if np.any(regime < 100.0):
        warnings.warn(
            "far asymptote evaluated with (q-1) dd^2 < 100; accuracy degrades",
            AsymptoticRegimeWarning,
            stacklevel=2,
        )
    w = p.q - 1.0
    n = (3.0 - p.q) / w
    prefactor = 2.0 * w ** ((p.q - 2.0) / w) / ((3.0 - p.q) * specfun.c_q(p.q))
    out = prefactor * (np.sqrt(2.0) / np.asarray(dd, float)) ** n
    out = np.asarray(out)
    return float(out) if out.ndim == 0 else out


def qblackcox_asymptotic_near(p: QGaussianParams, x0, t):
    """Linear approximation PD ~ 1 - sqrt(2) dd / C_q for (q-1) dd^2 << 1.

    Enforced for (q-1) dd^2 <= 0.1.  At q = 1 the Gaussian limit
    C_q -> sqrt(pi) is used, matching the small-argument Black-Cox expansion.
    """
    _check_pos(t, "t")
    dd = np.asarray(generalized_dtd(x0, p.beta_tilde, t), float)
    regime = (p.q - 1.0) * dd * dd
    if np.any(regime > 0.1):
        raise ValueError("near asymptote requires (q-1) dd^2 <= 0.1")
    cq = np.sqrt(np.pi) if p.is_gaussian else specfun.c_q(p.q)
    out = np.asarray(1.0 - np.sqrt(2.0) * dd / cq)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Absorbing-boundary transition density
# ---------------------------------------------------------------------------

def absorbing_green(beta, m, x, x0, t):
    """Transition density of drifted Brownian motion absorbed at x = 0.

    Image-method solution: a drift prefactor times the difference of the
    direct and reflected Gaussian kernels.  Vanishes at the boundary and
    integrates over (0, inf) to the Black-Cox survival probability.
    """
    _check_pos(beta, "beta")
    _check_pos(t, "t")
    _check_pos(x0, "x0")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0.0):
        raise ValueError("x must be >= 0 (region above the absorbing boundary)")
    beta = float(beta)
    m = float(m)
    x0 = float(x0)
    t = float(t)
    pref = np.sqrt(beta / (2.0 * np.pi * t)) * np.exp(
        beta * m * (x_arr - x0) - beta * m * m * t / 2.0
    )
    direct = np.exp(-beta * (x_arr - x0) ** 2 / (2.0 * t))
    image = np.exp(-beta * (x_arr + x0) ** 2 / (2.0 * t))
    out = pref * (direct - image)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# PD term structures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PDCurve:
    """Cumulative PD per horizon for one model; horizons in trading days."""

    model: PDModel
    horizons: np.ndarray
    pd: np.ndarray


def pd_curve(model: PDModel, horizons, x0, *, params: QGaussianParams | None = None,
             beta=None, m=0.0) -> PDCurve:
    """Evaluate one model's cumulative PD over an ascending horizon grid."""
    hz = np.asarray(horizons, dtype=float)
    if hz.ndim != 1 or hz.size == 0 or np.any(hz <= 0.0) or np.any(np.diff(hz) <= 0.0):
        raise ValueError("horizons must be a strictly ascending positive grid")
    model = PDModel(model)
    if model in (PDModel.MERTON, PDModel.BLACK_COX):
        if beta is None:
            raise ValueError(f"{model.value} needs a Gaussian precision beta")
        fn = merton_pd if model is PDModel.MERTON else blackcox_pd
        values = np.array([fn(x0, m, beta, h) for h in hz])
    else:
        if params is None:
            raise ValueError(f"{model.value} needs QGaussianParams")
        fn = qmerton_pd if model is PDModel.Q_MERTON else qblackcox_pd
        values = np.array([fn(params, x0, h) for h in hz])
    return PDCurve(model=model, horizons=hz, pd=values)
