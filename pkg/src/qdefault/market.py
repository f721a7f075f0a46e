"""Market-data ingestion and asset-value construction.

CSV firm series (equity market capitalization + book total liabilities),
interpolation of quarterly liability reports, default-point policies, the
direct-proxy and iterative-implied asset valuations, and daily
log-asset-returns.

Input schema (long format, one row per firm-day):

    firm_id,date,market_cap,total_liabilities[,defaulted_on]

Dates are ISO (YYYY-MM-DD).  Liabilities may repeat between quarterly reports
or be blank between them; blanks are interpolated.  Numeric outputs are
serialized with 12 significant digits.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import specfun
from .models import YEAR_DAYS

__all__ = [
    "ConvergenceError",
    "DefaultPointPolicy",
    "AssetMethod",
    "FirmSeries",
    "AssetSeries",
    "ReturnSeries",
    "interpolate_liabilities",
    "default_point",
    "direct_proxy_assets",
    "implied_assets",
    "log_returns",
    "parse_firms_csv",
    "load_firms_csv",
    "write_firms_csv",
    "write_assets",
    "fmt_num",
]

REQUIRED_COLUMNS = ("firm_id", "date", "market_cap", "total_liabilities")


class ConvergenceError(RuntimeError):
    """Iterative asset-value solve failed to converge; carries the last iterate."""

    def __init__(self, message: str, last: "AssetSeries | None" = None):
        super().__init__(message)
        self.last = last


class DefaultPointPolicy(str, Enum):
    TOTAL_LIABILITIES = "total"
    LIABILITIES_80 = "total80"

    @property
    def factor(self) -> float:
        return 1.0 if self is DefaultPointPolicy.TOTAL_LIABILITIES else 0.8


class AssetMethod(str, Enum):
    DIRECT_PROXY = "proxy"
    ITERATIVE_IMPLIED = "implied"


def _as_dates(dates) -> np.ndarray:
    arr = np.asarray(dates, dtype="datetime64[D]")
    if arr.ndim != 1:
        raise ValueError("dates must be one-dimensional")
    return arr


@dataclass(frozen=True)
class FirmSeries:
    """Date-indexed market capitalization and book liabilities of one issuer."""

    firm_id: str
    dates: np.ndarray
    equity: np.ndarray
    liabilities_raw: np.ndarray
    default_date: np.datetime64 | None = None

    def __post_init__(self):
        dates = _as_dates(self.dates)
        equity = np.asarray(self.equity, dtype=float)
        liab = np.asarray(self.liabilities_raw, dtype=float)
        if not (len(dates) == len(equity) == len(liab)):
            raise ValueError(f"{self.firm_id}: mismatched column lengths")
        if len(dates) == 0:
            raise ValueError(f"{self.firm_id}: empty series")
        if np.any(np.diff(dates.astype("int64")) <= 0):
            raise ValueError(f"{self.firm_id}: dates must be strictly increasing")
        if not np.all(np.isfinite(equity) & (equity > 0.0)):
            raise ValueError(f"{self.firm_id}: equity must be positive")
        known = np.isfinite(liab)
        if np.any(liab[known] < 0.0):
            raise ValueError(f"{self.firm_id}: liabilities must be >= 0")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "equity", equity)
        object.__setattr__(self, "liabilities_raw", liab)

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class AssetSeries:
    """Market value of assets and default point on the firm's date grid."""

    firm_id: str
    dates: np.ndarray
    V: np.ndarray
    D: np.ndarray
    method: AssetMethod
    dp_policy: DefaultPointPolicy

    def __post_init__(self):
        dates = _as_dates(self.dates)
        V = np.asarray(self.V, dtype=float)
        D = np.asarray(self.D, dtype=float)
        if not (len(dates) == len(V) == len(D)):
            raise ValueError(f"{self.firm_id}: mismatched column lengths")
        if not np.all(np.isfinite(V) & (V > 0.0)):
            raise ValueError(f"{self.firm_id}: asset values must be positive")
        if not np.all(np.isfinite(D) & (D >= 0.0)):
            raise ValueError(f"{self.firm_id}: default points must be >= 0")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "D", D)

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class ReturnSeries:
    """Daily log-asset-returns; dates mark the end of each one-day interval."""

    firm_id: str
    dates: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        dates = _as_dates(self.dates)
        v = np.asarray(self.v, dtype=float)
        if len(dates) != len(v):
            raise ValueError(f"{self.firm_id}: mismatched column lengths")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"{self.firm_id}: returns must be finite")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "v", v)

    def __len__(self) -> int:
        return len(self.v)


# ---------------------------------------------------------------------------
# Liability interpolation and default points
# ---------------------------------------------------------------------------

def interpolate_liabilities(f: FirmSeries) -> np.ndarray:
    """Smooth quarterly liability steps by linear interpolation in calendar date.

    Report points are the non-blank observations, collapsing runs of repeated
    values to the first date of each run; the series is constant before the
    first and after the last report.
    """
    liab = f.liabilities_raw
    known = np.isfinite(liab)
    if not np.any(known):
        raise ValueError(f"{f.firm_id}: no liability observations to interpolate")
    idx = np.flatnonzero(known)
    vals = liab[idx]
    keep = np.ones(len(idx), dtype=bool)
    keep[1:] = vals[1:] != vals[:-1]
    rep_idx = idx[keep]
    rep_vals = vals[keep]
    x = f.dates.astype("int64").astype(float)
    return np.interp(x, x[rep_idx], rep_vals)


def default_point(d_t: float, policy: DefaultPointPolicy) -> float:
    """Default barrier from interpolated liabilities: full value or an 80% haircut."""
    if not (np.isfinite(d_t) and d_t > 0.0):
        raise ValueError(
            "degenerate firm: nonpositive liabilities give no default point (PD is 0 downstream)"
        )
    return float(d_t) * DefaultPointPolicy(policy).factor


# ---------------------------------------------------------------------------
# Asset construction
# ---------------------------------------------------------------------------

def direct_proxy_assets(f: FirmSeries,
                        policy: DefaultPointPolicy = DefaultPointPolicy.TOTAL_LIABILITIES
                        ) -> AssetSeries:
    """Direct proxy V = E + D with interpolated total liabilities.

    The asset value always uses full liabilities; the policy haircut applies
    only to the stored default point used for leverage downstream.
    """
    policy = DefaultPointPolicy(policy)
    d_full = interpolate_liabilities(f)
    return AssetSeries(
        firm_id=f.firm_id,
        dates=f.dates,
        V=f.equity + d_full,
        D=d_full * policy.factor,
        method=AssetMethod.DIRECT_PROXY,
        dp_policy=policy,
    )


def _bs_call(v, d, r: float, sigma: float, t_years: float):
    """Black-Scholes call value of equity on assets ``v`` with strike ``d``."""
    v = np.asarray(v, dtype=float)
    d = np.asarray(d, dtype=float)
    disc = np.exp(-r * t_years)
    vol = sigma * np.sqrt(t_years)
    if vol < 1e-12:
        return np.maximum(v - d * disc, 0.0)
    with np.errstate(divide="ignore"):
        d1 = (np.log(v / d) + (r + 0.5 * sigma * sigma) * t_years) / vol
    d2 = d1 - vol
    return v * np.asarray(specfun.normal_cdf(d1)) - d * disc * np.asarray(
        specfun.normal_cdf(d2)
    )


def _implied_sweep(equity: np.ndarray, d_full: np.ndarray, r: float,
                   t_years: float, sigma_v: float) -> np.ndarray:
    """Solve E_i = call(V_i) for V_i on every day at once by bracketed bisection.

    The call value is increasing in V with E <= call^{-1}(E) <= E + D e^{-rT},
    so the bracket always holds; a violated bracket is a per-day error.
    """
    disc = float(np.exp(-r * t_years))
    trivial = d_full <= 0.0
    if sigma_v < 1e-12:
        return np.where(trivial, equity, equity + d_full * disc)
    lo = equity.copy()
    hi = np.where(trivial, equity, equity + d_full * disc)
    solve = np.flatnonzero(~trivial)
    f_lo = _bs_call(lo[solve], d_full[solve], r, sigma_v, t_years) - equity[solve]
    f_hi = _bs_call(hi[solve], d_full[solve], r, sigma_v, t_years) - equity[solve]
    bad = solve[(f_lo > 1e-9 * equity[solve]) | (f_hi < -1e-9 * equity[solve])]
    if bad.size:
        i = int(bad[0])
        raise ConvergenceError(
            f"day {i}: cannot bracket implied asset value (E={equity[i]:g}, D={d_full[i]:g})"
        )
    d_safe = np.where(trivial, 1.0, d_full)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = _bs_call(mid, d_safe, r, sigma_v, t_years) < equity
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= 1e-12 * np.maximum(1.0, np.abs(lo))):
            break
    return np.where(trivial, equity, 0.5 * (lo + hi))


def implied_assets(f: FirmSeries, r: float = 0.02, option_horizon_years: float = 1.0,
                   policy: DefaultPointPolicy = DefaultPointPolicy.TOTAL_LIABILITIES,
                   tol: float = 1e-6, max_sweeps: int = 50) -> AssetSeries:
    """Iterative implied asset values from the call-option relation.

    Fixed point: start from V = E + D, estimate the annualized asset
    volatility from the current V series, invert the call formula day by
    day, and repeat until the maximum relative change drops below ``tol``.
    """
    if len(f) < 2:
        raise ValueError(f"{f.firm_id}: need at least 2 observations")
    policy = DefaultPointPolicy(policy)
    d_full = interpolate_liabilities(f)
    v = f.equity + d_full

    def as_series(values: np.ndarray) -> AssetSeries:
        return AssetSeries(
            firm_id=f.firm_id,
            dates=f.dates,
            V=values,
            D=d_full * policy.factor,
            method=AssetMethod.ITERATIVE_IMPLIED,
            dp_policy=policy,
        )

    for _ in range(max_sweeps):
        rets = np.diff(np.log(v))
        sigma_daily = float(np.std(rets, ddof=1)) if len(rets) > 1 else 0.0
        sigma_v = sigma_daily * np.sqrt(YEAR_DAYS)
        v_new = _implied_sweep(f.equity, d_full, r, option_horizon_years, sigma_v)
        delta = float(np.max(np.abs(v_new - v) / v))
        v = v_new
        if delta < tol:
            return as_series(v)
    raise ConvergenceError(
        f"{f.firm_id}: implied asset iteration did not converge in {max_sweeps} sweeps",
        last=as_series(v),
    )


def log_returns(a: AssetSeries) -> ReturnSeries:
    """Daily log-asset-returns v_i = ln(V_i / V_{i-1})."""
    if len(a) < 2:
        raise ValueError(f"{a.firm_id}: need at least 2 observations for returns")
    return ReturnSeries(firm_id=a.firm_id, dates=a.dates[1:], v=np.diff(np.log(a.V)))


# ---------------------------------------------------------------------------
# CSV interfaces
# ---------------------------------------------------------------------------

def fmt_num(x: float) -> str:
    """Canonical 12-significant-digit rendering used by every table writer."""
    return "%.12g" % float(x)


def _parse_date(text: str) -> np.datetime64:
    return np.datetime64(text.strip(), "D")


def parse_firms_csv(path: str) -> tuple[dict[str, FirmSeries], list[str]]:
    """Lenient long-format reader: returns (firms, per-row reject diagnostics).

    Rows failing validation (bad dates, nonpositive market cap, negative
    liabilities, duplicate firm/date pairs) are rejected individually with
    line numbers; structurally broken files raise ValueError.
    """
    rejects: list[str] = []
    rows: dict[str, list[tuple]] = {}
    default_dates: dict[str, np.datetime64] = {}
    seen: set[tuple[str, str]] = set()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: empty file")
        missing = [c for c in REQUIRED_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise ValueError(f"{path}: missing required columns {missing}")
        has_flag = "defaulted_on" in reader.fieldnames
        for lineno, row in enumerate(reader, start=2):
            firm = (row.get("firm_id") or "").strip()
            if not firm:
                rejects.append(f"{path}:{lineno}: blank firm_id")
                continue
            try:
                date = _parse_date(row["date"])
                if np.isnat(date):
                    raise ValueError
            except Exception:
                rejects.append(f"{path}:{lineno}: unparseable date {row.get('date')!r}")
                continue
            key = (firm, str(date))
            if key in seen:
                rejects.append(f"{path}:{lineno}: duplicate (firm_id, date) = {key}")
                continue
            try:
                mkt = float(row["market_cap"])
            except (TypeError, ValueError):
                rejects.append(f"{path}:{lineno}: unparseable market_cap {row.get('market_cap')!r}")
                continue
            if not (np.isfinite(mkt) and mkt > 0.0):
                rejects.append(f"{path}:{lineno}: market_cap must be positive, got {mkt!r}")
                continue
            raw_liab = (row.get("total_liabilities") or "").strip()
            if raw_liab == "":
                liab = float("nan")
            else:
                try:
                    liab = float(raw_liab)
                except ValueError:
                    rejects.append(f"{path}:{lineno}: unparseable total_liabilities {raw_liab!r}")
                    continue
                if not (np.isfinite(liab) and liab >= 0.0):
                    rejects.append(f"{path}:{lineno}: total_liabilities must be >= 0, got {liab!r}")
                    continue
            if has_flag:
                flag = (row.get("defaulted_on") or "").strip()
                if flag and firm not in default_dates:
                    try:
                        default_dates[firm] = _parse_date(flag)
                    except Exception:
                        rejects.append(f"{path}:{lineno}: unparseable defaulted_on {flag!r}")
                        continue
            seen.add(key)
            rows.setdefault(firm, []).append((date, mkt, liab))

    firms: dict[str, FirmSeries] = {}
    for firm, entries in rows.items():
        entries.sort(key=lambda e: e[0])
        dates = np.array([e[0] for e in entries], dtype="datetime64[D]")
        equity = np.array([e[1] for e in entries], dtype=float)
        liab = np.array([e[2] for e in entries], dtype=float)
        try:
            firms[firm] = FirmSeries(
                firm_id=firm,
                dates=dates,
                equity=equity,
                liabilities_raw=liab,
                default_date=default_dates.get(firm),
            )
        except ValueError as exc:
            rejects.append(f"{path}: firm {firm}: {exc}")
    return firms, rejects


def load_firms_csv(*paths: str) -> dict[str, FirmSeries]:
    """Strict reader over one or more files; any rejected row raises."""
    firms: dict[str, FirmSeries] = {}
    for path in paths:
        parsed, rejects = parse_firms_csv(path)
        if rejects:
            raise ValueError(f"{path}: {len(rejects)} invalid rows; first: {rejects[0]}")
        dup = set(parsed) & set(firms)
        if dup:
            raise ValueError(f"{path}: firms {sorted(dup)} appear in multiple files")
        firms.update(parsed)
    return firms


def write_firms_csv(firms: dict[str, FirmSeries], path: str) -> None:
    """Normalized long-format dump, sorted by (firm_id, date)."""
    buf = io.StringIO()
    buf.write("firm_id,date,market_cap,total_liabilities,defaulted_on\n")
    for firm_id in sorted(firms):
        f = firms[firm_id]
        flag = str(f.default_date) if f.default_date is not None else ""
        for i in range(len(f)):
            liab = f.liabilities_raw[i]
            liab_txt = fmt_num(liab) if np.isfinite(liab) else ""
            buf.write(
                f"{f.firm_id},{f.dates[i]},{fmt_num(f.equity[i])},{liab_txt},{flag}\n"
            )
    _atomic_write(path, buf.getvalue())


def write_assets(assets: list[AssetSeries], path: str, fmt: str = "csv") -> None:
    """Asset/return table ``firm_id,date,V,D,v`` as CSV or JSON lines."""
    ordered = sorted(assets, key=lambda a: a.firm_id)
    lines: list[str] = []
    if fmt == "csv":
        lines.append("firm_id,date,V,D,v")
        for a in ordered:
            rets = np.diff(np.log(a.V))
            for i in range(len(a)):
                v_txt = fmt_num(rets[i - 1]) if i > 0 else ""
                lines.append(
                    f"{a.firm_id},{a.dates[i]},{fmt_num(a.V[i])},{fmt_num(a.D[i])},{v_txt}"
                )
    elif fmt == "json":
        for a in ordered:
            rets = np.diff(np.log(a.V))
            for i in range(len(a)):
                v_txt = fmt_num(rets[i - 1]) if i > 0 else "null"
                lines.append(
                    '{"firm_id": "%s", "date": "%s", "V": %s, "D": %s, "v": %s}'
                    % (a.firm_id, a.dates[i], fmt_num(a.V[i]), fmt_num(a.D[i]), v_txt)
                )
    else:
        raise ValueError(f"unknown format {fmt!r}")
    _atomic_write(path, "\n".join(lines) + "\n")


def _atomic_write(path: str, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)
