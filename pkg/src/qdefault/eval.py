"""Validation machinery.

Superstatistics time-series simulator (piecewise-constant precision with
Gamma-distributed regimes), first-passage default simulator, Monte Carlo PD
oracle, ROC curves with trapezoidal AUC, and the 100-fold year-stratified
resampling protocol for AUC distributions.  A synthetic-portfolio generator
builds labeled market data for end-to-end pipeline validation.

All randomness flows through explicit seeds; parallel units draw their
streams from (seed, unit index) so results do not depend on scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import GammaParams, gamma_to_q
from .market import FirmSeries, ReturnSeries
from .models import blackcox_pd

__all__ = [
    "SimConfig",
    "RocResult",
    "McPdResult",
    "ResampledAuc",
    "simulate_superstat",
    "simulate_firm_paths",
    "mc_pd_oracle",
    "roc_curve",
    "resampled_auc",
    "synthesize_portfolio",
    "write_roc_points",
    "write_auc_distribution",
]

_BASE_DATE = np.datetime64("2006-01-02", "D")  # a Monday


@dataclass(frozen=True)
class SimConfig:
    """Superstatistics simulator settings.

    ``regime_len_days`` is the mean duration of a volatility regime; regime
    lengths are geometric (memoryless), so the mean fully determines the law.
    """

    gamma: GammaParams
    regime_len_days: float
    n_days: int
    drift: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.regime_len_days) and self.regime_len_days >= 1.0):
            raise ValueError("regime_len_days must be >= 1")
        if not (isinstance(self.n_days, (int, np.integer)) and self.n_days >= 2):
            raise ValueError("n_days must be an integer >= 2")
        if not np.isfinite(self.drift):
            raise ValueError("drift must be finite")


@dataclass(frozen=True)
class McPdResult:
    value: float
    stderr: float
    n_draws: int


@dataclass(frozen=True)
class RocResult:
    """(fpr, tpr) points from (0,0) to (1,1) and the trapezoidal AUC."""

    points: np.ndarray
    auc: float
    n_pos: int
    n_neg: int


@dataclass(frozen=True)
class ResampledAuc:
    aucs: np.ndarray
    mean: float
    std: float


def _synthetic_dates(n: int, start: np.datetime64 = _BASE_DATE) -> np.ndarray:
    return np.busday_offset(start, np.arange(n), roll="following")


def _regime_precisions(rng: np.random.Generator, gamma: GammaParams,
                       mean_len: float, n_steps: int) -> np.ndarray:
    """Piecewise-constant precision path over ``n_steps`` unit steps."""
    p = min(1.0, 1.0 / mean_len)
    betas = np.empty(0)
    lengths = np.empty(0, dtype=np.int64)
    total = 0
    while total < n_steps:
        k = max(8, int((n_steps - total) / mean_len * 1.5) + 2)
        new_len = rng.geometric(p, size=k)
        new_beta = rng.gamma(shape=gamma.a, scale=1.0 / gamma.b, size=k)
        lengths = np.concatenate([lengths, new_len])
        betas = np.concatenate([betas, new_beta])
        total = int(np.sum(lengths))
    return np.repeat(betas, lengths)[:n_steps]


def _superstat_returns(rng: np.random.Generator, gamma: GammaParams,
                       regime_len_days: float, n_days: int, drift: float,
                       substeps: int = 1) -> np.ndarray:
    """Per-substep increments; per-day variance is 1/beta within a regime."""
    n_steps = n_days * substeps
    beta_days = _regime_precisions(rng, gamma, regime_len_days, n_days)
    beta_steps = np.repeat(beta_days, substeps)
    sd = 1.0 / np.sqrt(beta_steps * substeps)
    return drift / substeps + rng.standard_normal(n_steps) * sd


def simulate_superstat(cfg: SimConfig, firm_id: str = "sim") -> ReturnSeries:
    """Simulate daily returns with slowly fluctuating precision.

    Within a regime returns are i.i.d. Gaussian with the regime's precision;
    regime lengths are geometric with mean ``cfg.regime_len_days``.  With a
    one-day mean the unconditional law is the q-Gaussian matching the Gamma
    parameters; with regimes spanning the sample it collapses to a single
    conditional Gaussian.
    """
    rng = np.random.default_rng(cfg.seed)
    v = _superstat_returns(rng, cfg.gamma, cfg.regime_len_days, cfg.n_days, cfg.drift)
    return ReturnSeries(firm_id=firm_id, dates=_synthetic_dates(cfg.n_days), v=v)


def simulate_firm_paths(cfg: SimConfig, x0: float, n_firms: int,
                        substeps_per_day: int = 1
                        ) -> list[tuple[ReturnSeries, int | None]]:
    """Cumulative-sum log-asset paths from x0 with first-passage default at 0.

    Returns one (daily ReturnSeries, default day) pair per firm; the default
    day is the 1-based trading day whose path first touches or crosses zero
    (0 when x0 <= 0), or None.  ``substeps_per_day > 1`` refines barrier
    monitoring for continuity checks.  Firm i draws its stream from
    (cfg.seed, i).
    """
    if n_firms < 1:
        raise ValueError("n_firms must be >= 1")
    if substeps_per_day < 1:
        raise ValueError("substeps_per_day must be >= 1")
    if not np.isfinite(x0) or x0 < 0.0:
        raise ValueError("x0 must be >= 0")
    dates = _synthetic_dates(cfg.n_days)
    out: list[tuple[ReturnSeries, int | None]] = []
    for i in range(n_firms):
        rng = np.random.default_rng([cfg.seed, i])
        steps = _superstat_returns(
            rng, cfg.gamma, cfg.regime_len_days, cfg.n_days, cfg.drift, substeps_per_day
        )
        daily = steps.reshape(cfg.n_days, substeps_per_day).sum(axis=1)
        series = ReturnSeries(firm_id=f"sim{i:05d}", dates=dates, v=daily)
        if x0 <= 0.0:
            out.append((series, 0))
            continue
        path = x0 + np.cumsum(steps)
        hit = np.flatnonzero(path <= 0.0)
        default_day = int(hit[0]) // substeps_per_day + 1 if hit.size else None
        out.append((series, default_day))
    return out


def mc_pd_oracle(g: GammaParams, x0: float, t: float, n_draws: int = 10 ** 6,
                 seed: int = 0) -> McPdResult:
    """Monte Carlo average of the conditional Black-Cox PD over the precision law.

    Each draw contributes an exact conditional PD (no binomial noise), so the
    standard error is that of the PD values themselves.
    """
    if n_draws < 10 ** 4:
        raise ValueError("n_draws must be at least 10^4")
    if x0 < 0.0:
        raise ValueError("x0 must be >= 0")
    rng = np.random.default_rng(seed)
    betas = rng.gamma(shape=g.a, scale=1.0 / g.b, size=n_draws)
    pds = blackcox_pd(x0, 0.0, betas, t)
    value = float(np.mean(pds))
    stderr = float(np.std(pds, ddof=1) / np.sqrt(n_draws))
    return McPdResult(value=value, stderr=stderr, n_draws=n_draws)


# ---------------------------------------------------------------------------
# ROC / AUC
# ---------------------------------------------------------------------------

def roc_curve(scores, labels) -> RocResult:
    """ROC curve over descending score thresholds with ties grouped.

    ``labels`` are truthy for defaulters.  The x-axis is the standard
    false-positive rate (non-defaulters flagged high-risk over all
    non-defaulters); AUC is the trapezoidal integral.
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=bool)
    if s.shape != y.shape or s.ndim != 1:
        raise ValueError("scores and labels must be aligned 1-D arrays")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    n_pos = int(np.sum(y))
    n_neg = int(len(y) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise ValueError("need at least one defaulter and one non-defaulter")
    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    y_sorted = y[order]
    cum_tp = np.cumsum(y_sorted)
    cum_fp = np.cumsum(~y_sorted)
    # last index of each tied block
    block_end = np.flatnonzero(np.diff(s_sorted) != 0.0)
    idx = np.concatenate([block_end, [len(s_sorted) - 1]])
    tpr = np.concatenate([[0.0], cum_tp[idx] / n_pos])
    fpr = np.concatenate([[0.0], cum_fp[idx] / n_neg])
    auc = float(np.trapezoid(tpr, fpr))
    return RocResult(
        points=np.column_stack((fpr, tpr)), auc=auc, n_pos=n_pos, n_neg=n_neg
    )


def resampled_auc(scores, defaulted, default_years, repeats: int = 100,
                  seed: int = 0) -> ResampledAuc:
    """AUC distribution over balanced year-stratified resamples.

    Each repeat keeps every defaulter and draws, per default year, as many
    non-defaulters (without replacement within the repeat) as there were
    defaults that year.  Deterministic for a given seed.
    """
    s = np.asarray(scores, dtype=float)
    d = np.asarray(defaulted, dtype=bool)
    years = np.asarray(default_years)
    if not (s.shape == d.shape == years.shape) or s.ndim != 1:
        raise ValueError("scores, defaulted, default_years must be aligned 1-D arrays")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    pos_idx = np.flatnonzero(d)
    neg_idx = np.flatnonzero(~d)
    if pos_idx.size == 0 or neg_idx.size == 0:
        raise ValueError("need at least one defaulter and one non-defaulter")
    year_list = sorted(set(years[pos_idx].tolist()))
    counts = {y: int(np.sum(years[pos_idx] == y)) for y in year_list}
    needed = sum(counts.values())
    if needed > neg_idx.size:
        for y in year_list:
            needed_so_far = sum(counts[z] for z in year_list if z <= y)
            if needed_so_far > neg_idx.size:
                raise ValueError(
                    f"not enough non-defaulters to match {counts[y]} defaults in year {y}"
                )
    rng = np.random.default_rng(seed)
    aucs = np.empty(repeats)
    for rep in range(repeats):
        pool = neg_idx.copy()
        chosen: list[np.ndarray] = []
        for y in year_list:
            take = counts[y]
            pick = rng.choice(pool, size=take, replace=False)
            chosen.append(pick)
            pool = np.setdiff1d(pool, pick, assume_unique=True)
        sel = np.concatenate([pos_idx] + chosen)
        aucs[rep] = roc_curve(s[sel], d[sel]).auc
    return ResampledAuc(
        aucs=aucs,
        mean=float(np.mean(aucs)),
        std=float(np.std(aucs, ddof=1)) if repeats > 1 else 0.0,
    )


# ---------------------------------------------------------------------------
# Synthetic labeled portfolios
# ---------------------------------------------------------------------------

def synthesize_portfolio(
    n_safe: int = 360,
    n_risky: int = 40,
    history_days: int = 320,
    outcome_days: int = 250,
    safe_gamma: GammaParams | None = None,
    risky_gamma: GammaParams | None = None,
    x0_safe: float = 1.5,
    x0_risky: float = 0.5,
    regime_len_days: float = 25.0,
    liabilities: float = 100.0,
    seed: int = 0,
    start: np.datetime64 = _BASE_DATE,
    max_redraws: int = 200,
) -> dict[str, FirmSeries]:
    """Labeled synthetic market data: thin-tailed solvent and fat-tailed
    high-leverage firms.

    Only the history window is written out (the data available at valuation);
    the label is whether the continued path first crosses the barrier during
    the outcome window.  Histories that would cross before valuation are
    redrawn, mirroring a portfolio of firms alive at the valuation date.
    Firm i draws its stream from (seed, i).
    """
    if safe_gamma is None:
        safe_gamma = GammaParams(a=12.0, b=12.0 / 2840.0)  # q ~ 1.08, vol ~ 2%/day
    if risky_gamma is None:
        risky_gamma = GammaParams(a=0.6765, b=2.3529 / 5000.0)  # q ~ 1.85
    total_days = history_days + outcome_days
    dates = _synthetic_dates(history_days + 1, start)
    firms: dict[str, FirmSeries] = {}
    n_firms = n_safe + n_risky
    for i in range(n_firms):
        risky = i >= n_safe
        firm_id = f"R{i:04d}" if risky else f"S{i:04d}"
        gamma = risky_gamma if risky else safe_gamma
        x0_base = x0_risky if risky else x0_safe
        rng = np.random.default_rng([seed, i])
        x0 = x0_base * rng.uniform(0.85, 1.15)
        for attempt in range(max_redraws):
            steps = _superstat_returns(rng, gamma, regime_len_days, total_days, 0.0)
            path = x0 + np.cumsum(steps)
            if np.all(path[:history_days] > 0.0):
                break
        else:
            raise RuntimeError(f"{firm_id}: no surviving history in {max_redraws} draws")
        hit = np.flatnonzero(path[history_days:] <= 0.0)
        default_date = (
            np.busday_offset(start, history_days + 1 + int(hit[0]), roll="following")
            if hit.size
            else None
        )
        log_x = np.concatenate([[x0], path[:history_days]])
        equity = liabilities * np.expm1(log_x)  # E = V - D = D (e^x - 1) > 0
        firms[firm_id] = FirmSeries(
            firm_id=firm_id,
            dates=dates,
            equity=equity,
            liabilities_raw=np.full(history_days + 1, liabilities),
            default_date=default_date,
        )
    return firms


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def write_roc_points(result: RocResult, path: str, fmt: str = "csv") -> None:
    from .market import _atomic_write, fmt_num

    lines = []
    if fmt == "csv":
        lines.append("fpr,tpr")
        for fpr, tpr in result.points:
            lines.append(f"{fmt_num(fpr)},{fmt_num(tpr)}")
    elif fmt == "json":
        for fpr, tpr in result.points:
            lines.append('{"fpr": %s, "tpr": %s}' % (fmt_num(fpr), fmt_num(tpr)))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    _atomic_write(path, "\n".join(lines) + "\n")


def write_auc_distribution(result: ResampledAuc, path: str, fmt: str = "csv") -> None:
    from .market import _atomic_write, fmt_num

    lines = []
    if fmt == "csv":
        lines.append("repeat,auc")
        for i, a in enumerate(result.aucs):
            lines.append(f"{i},{fmt_num(a)}")
    elif fmt == "json":
        for i, a in enumerate(result.aucs):
            lines.append('{"repeat": %d, "auc": %s}' % (i, fmt_num(a)))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    _atomic_write(path, "\n".join(lines) + "\n")
