"""Command-line front end.

Wires ingestion -> asset construction -> rolling fits -> DTD/PD tables ->
ROC evaluation, with seeded, byte-reproducible outputs.  Subcommands:

    ingest    validate input CSVs into a normalized firm store
    assets    build asset series (direct proxy or iterative implied)
    fit       rolling-window q-Gaussian and Gaussian fit tracks
    pd        full pipeline table: q, beta_tilde, DTDs, Black-Cox and
              q-Black-Cox PDs per firm-day (writes assets/fits as byproducts)
    dtd       distance-to-default columns from an existing pd table
    acf       autocorrelation tables of absolute/squared/raw returns
    qq        Q-Q quantile pairs against a fitted law
    qhist     histogram of final-window q per firm
    roc       ROC points and resampled AUC distribution
    simulate  synthetic labeled portfolio in the ingest schema

Exit codes: 0 success, 1 partial per-firm failures, 2 invalid invocation,
schema violation, or missing prerequisite.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import warnings
from dataclasses import dataclass, fields

import numpy as np

from . import eval as evaluation
from . import inference, market, models
from .dist import GammaParams, QGaussianParams
from .market import (
    AssetMethod,
    ConvergenceError,
    DefaultPointPolicy,
    _atomic_write,
    fmt_num,
)

__all__ = ["RunConfig", "main"]


@dataclass
class RunConfig:
    inputs: tuple[str, ...] = ()
    method: str = "proxy"
    dp_policy: str = "total"
    window: int = 250
    horizon_days: int = 250
    risk_free: float = 0.02
    option_horizon_years: float = 1.0
    seed: int = 0
    out_dir: str = "."
    fmt: str = "csv"

    def __post_init__(self):
        if self.window < 100:
            raise ValueError("window must be >= 100")
        if self.horizon_days < 1:
            raise ValueError("horizon_days must be >= 1")
        if self.fmt not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        AssetMethod(self.method)
        DefaultPointPolicy(self.dp_policy)


_CONFIG_KEYS = {
    "input": "inputs",
    "method": "method",
    "dp_policy": "dp_policy",
    "window": "window",
    "horizon_days": "horizon_days",
    "risk_free": "risk_free",
    "option_horizon_years": "option_horizon_years",
    "seed": "seed",
    "out_dir": "out_dir",
    "format": "fmt",
}


def _read_config(path: str) -> dict:
    """Flat key=value config file; '#' starts a comment."""
    values: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            val = val.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            field = _CONFIG_KEYS[key]
            if field == "inputs":
                values.setdefault("inputs", [])
                values["inputs"].append(val)
            elif field in ("window", "horizon_days", "seed"):
                values[field] = int(val)
            elif field in ("risk_free", "option_horizon_years"):
                values[field] = float(val)
            else:
                values[field] = val
    if "inputs" in values:
        values["inputs"] = tuple(values["inputs"])
    return values


def _build_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        values.update(_read_config(args.config))
    overrides = {
        "method": getattr(args, "method", None),
        "dp_policy": getattr(args, "dp_policy", None),
        "window": getattr(args, "window", None),
        "horizon_days": getattr(args, "horizon_days", None),
        "risk_free": getattr(args, "risk_free", None),
        "option_horizon_years": getattr(args, "option_horizon", None),
        "seed": args.seed,
        "out_dir": args.out_dir,
        "fmt": args.format,
    }
    for key, val in overrides.items():
        if val is not None:
            values[key] = val
    known = {f.name for f in fields(RunConfig)}
    return RunConfig(**{k: v for k, v in values.items() if k in known})


def _out_path(cfg: RunConfig, name: str) -> str:
    os.makedirs(cfg.out_dir, exist_ok=True)
    return os.path.join(cfg.out_dir, name)


def _require(cfg: RunConfig, name: str) -> str:
    path = os.path.join(cfg.out_dir, name)
    if not os.path.exists(path):
        raise SystemExit2(f"missing prerequisite {path}; run the producing stage first")
    return path


class SystemExit2(Exception):
    """Invalid invocation / schema / missing prerequisite (exit code 2)."""


def _write_table(path: str, header: str, rows: list[tuple], json_fields: list[tuple[str, str]],
                 fmt: str) -> None:
    """Rows are pre-formatted strings; json_fields pairs (name, kind) with
    kind 's' (string) or 'n' (raw numeric/boolean token)."""
    lines: list[str] = []
    if fmt == "csv":
        lines.append(header)
        lines.extend(",".join(row) for row in rows)
    elif fmt == "json":
        for row in rows:
            parts = []
            for (name, kind), cell in zip(json_fields, row):
                if kind == "s":
                    parts.append(f'"{name}": "{cell}"')
                else:
                    parts.append(f'"{name}": {cell if cell != "" else "null"}')
            lines.append("{" + ", ".join(parts) + "}")
    else:
        raise SystemExit2(f"unknown format {fmt!r}")
    _atomic_write(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_ingest(cfg: RunConfig, args) -> int:
    inputs = list(args.files) or list(cfg.inputs)
    if not inputs:
        raise SystemExit2("ingest: no input files given")
    firms: dict[str, market.FirmSeries] = {}
    rejects: list[str] = []
    for path in inputs:
        try:
            parsed, file_rejects = market.parse_firms_csv(path)
        except (OSError, ValueError) as exc:
            raise SystemExit2(f"ingest: {exc}") from exc
        rejects.extend(file_rejects)
        for firm_id, series in parsed.items():
            if firm_id in firms:
                rejects.append(f"{path}: firm {firm_id} already ingested from another file")
                continue
            firms[firm_id] = series
    if not firms:
        raise SystemExit2("ingest: no valid firm series")
    market.write_firms_csv(firms, _out_path(cfg, "firms.csv"))
    print(f"ingested {len(firms)} firm series, {len(rejects)} rejected rows")
    for firm_id in sorted(firms):
        f = firms[firm_id]
        gaps = "" if len(f) >= cfg.window + 1 else f"  [too short for window {cfg.window}]"
        print(f"  {firm_id}: {len(f)} rows, {f.dates[0]}..{f.dates[-1]}{gaps}")
    for line in rejects:
        print(f"  reject: {line}", file=sys.stderr)
    return 1 if rejects else 0


def _load_store(cfg: RunConfig) -> dict[str, market.FirmSeries]:
    path = _require(cfg, "firms.csv")
    try:
        return market.load_firms_csv(path)
    except ValueError as exc:
        raise SystemExit2(f"firm store is invalid: {exc}") from exc


def _build_assets(cfg: RunConfig, firms: dict[str, market.FirmSeries]
                  ) -> tuple[dict[str, market.AssetSeries], list[str]]:
    policy = DefaultPointPolicy(cfg.dp_policy)
    method = AssetMethod(cfg.method)
    assets: dict[str, market.AssetSeries] = {}
    failures: list[str] = []
    for firm_id in sorted(firms):
        try:
            if method is AssetMethod.DIRECT_PROXY:
                assets[firm_id] = market.direct_proxy_assets(firms[firm_id], policy)
            else:
                assets[firm_id] = market.implied_assets(
                    firms[firm_id],
                    r=cfg.risk_free,
                    option_horizon_years=cfg.option_horizon_years,
                    policy=policy,
                )
        except (ValueError, ConvergenceError) as exc:
            failures.append(f"{firm_id}: {exc}")
    return assets, failures


def cmd_assets(cfg: RunConfig, args) -> int:
    firms = _load_store(cfg)
    assets, failures = _build_assets(cfg, firms)
    if not assets:
        raise SystemExit2("assets: every firm failed")
    market.write_assets(list(assets.values()), _out_path(cfg, "assets.csv"), cfg.fmt)
    print(f"built {len(assets)} asset series ({cfg.method}), {len(failures)} failures")
    for line in failures:
        print(f"  failed: {line}", file=sys.stderr)
    return 1 if failures else 0


def _fit_tracks(cfg: RunConfig, assets: dict[str, market.AssetSeries]
                ) -> tuple[dict[str, list], dict[str, list], list[str]]:
    qfits: dict[str, list] = {}
    gfits: dict[str, list] = {}
    failures: list[str] = []
    for firm_id in sorted(assets):
        try:
            rets = market.log_returns(assets[firm_id])
            qfits[firm_id] = inference.rolling_fit(rets, window=cfg.window, law="qgaussian")
            gfits[firm_id] = inference.rolling_fit(rets, window=cfg.window, law="gaussian")
            if not qfits[firm_id]:
                raise ValueError("no fittable windows")
        except ValueError as exc:
            qfits.pop(firm_id, None)
            gfits.pop(firm_id, None)
            failures.append(f"{firm_id}: {exc}")
    return qfits, gfits, failures


def _write_gaussian_fits(gfits: dict[str, list], path: str, fmt: str) -> None:
    rows = []
    for firm_id in sorted(gfits):
        for fr in gfits[firm_id]:
            rows.append(
                (
                    firm_id,
                    str(fr.window_end_date),
                    fmt_num(fr.params.m),
                    fmt_num(fr.params.beta),
                    fmt_num(fr.log_likelihood),
                )
            )
    _write_table(
        path,
        "firm_id,window_end_date,m,beta,loglik",
        rows,
        [("firm_id", "s"), ("window_end_date", "s"), ("m", "n"), ("beta", "n"), ("loglik", "n")],
        fmt,
    )


def cmd_fit(cfg: RunConfig, args) -> int:
    firms = _load_store(cfg)
    assets, asset_failures = _build_assets(cfg, firms)
    qfits, gfits, fit_failures = _fit_tracks(cfg, assets)
    if not qfits:
        raise SystemExit2("fit: no firm produced any fit")
    inference.serialize_fits(qfits, _out_path(cfg, "fits.csv"), cfg.fmt)
    _write_gaussian_fits(gfits, _out_path(cfg, "fits_gaussian.csv"), cfg.fmt)
    failures = asset_failures + fit_failures
    n_windows = sum(len(t) for t in qfits.values())
    print(f"fitted {n_windows} windows across {len(qfits)} firms, {len(failures)} failures")
    for line in failures:
        print(f"  failed: {line}", file=sys.stderr)
    return 1 if failures else 0


def cmd_pd(cfg: RunConfig, args) -> int:
    firms = _load_store(cfg)
    assets, asset_failures = _build_assets(cfg, firms)
    market.write_assets(list(assets.values()), _out_path(cfg, "assets.csv"), cfg.fmt)
    qfits, gfits, fit_failures = _fit_tracks(cfg, assets)
    if not qfits:
        raise SystemExit2("pd: no firm produced any fit")
    inference.serialize_fits(qfits, _out_path(cfg, "fits.csv"), cfg.fmt)
    _write_gaussian_fits(gfits, _out_path(cfg, "fits_gaussian.csv"), cfg.fmt)

    horizon = float(cfg.horizon_days)
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", models.BarrierCrossedWarning)
        for firm_id in sorted(qfits):
            a = assets[firm_id]
            date_to_idx = {str(d): i for i, d in enumerate(a.dates)}
            gauss_by_date = {str(fr.window_end_date): fr for fr in gfits.get(firm_id, [])}
            for fr in qfits[firm_id]:
                date = str(fr.window_end_date)
                g = gauss_by_date.get(date)
                if g is None:
                    continue
                i = date_to_idx[date]
                v_i, d_i = a.V[i], a.D[i]
                with np.errstate(divide="ignore"):
                    x0 = float(np.log(v_i / d_i)) if d_i > 0.0 else float("inf")
                params: QGaussianParams = fr.params
                dd_gen = models.generalized_dtd(x0, params.beta_tilde, horizon)
                dd_simple = models.merton_dtd(x0, 0.0, g.params.beta, horizon)
                pd_bc = models.blackcox_pd(x0, 0.0, g.params.beta, horizon)
                pd_qbc = models.qblackcox_pd(params, x0, horizon)
                rows.append(
                    (
                        firm_id,
                        date,
                        fmt_num(params.q),
                        fmt_num(params.beta_tilde),
                        fmt_num(dd_gen),
                        fmt_num(dd_simple),
                        fmt_num(pd_bc),
                        fmt_num(pd_qbc),
                    )
                )
    _write_table(
        _out_path(cfg, "pd.csv"),
        "firm_id,date,q,beta_tilde,dd_gen,dd_simple,pd_bc,pd_qbc",
        rows,
        [
            ("firm_id", "s"),
            ("date", "s"),
            ("q", "n"),
            ("beta_tilde", "n"),
            ("dd_gen", "n"),
            ("dd_simple", "n"),
            ("pd_bc", "n"),
            ("pd_qbc", "n"),
        ],
        cfg.fmt,
    )
    failures = asset_failures + fit_failures
    print(f"pd table: {len(rows)} firm-days across {len(qfits)} firms, {len(failures)} failures")
    for line in failures:
        print(f"  failed: {line}", file=sys.stderr)
    return 1 if failures else 0


def _read_csv_table(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def cmd_dtd(cfg: RunConfig, args) -> int:
    pd_path = _require(cfg, "pd.csv")
    rows = [
        (r["firm_id"], r["date"], r["dd_gen"], r["dd_simple"])
        for r in _read_csv_table(pd_path)
    ]
    _write_table(
        _out_path(cfg, "dtd.csv"),
        "firm_id,date,dd_gen,dd_simple",
        rows,
        [("firm_id", "s"), ("date", "s"), ("dd_gen", "n"), ("dd_simple", "n")],
        cfg.fmt,
    )
    print(f"dtd table: {len(rows)} firm-days")
    return 0


def cmd_acf(cfg: RunConfig, args) -> int:
    firms = _load_store(cfg)
    assets, failures = _build_assets(cfg, firms)
    transform = inference.AcfTransform(args.transform)
    rows = []
    for firm_id in sorted(assets):
        try:
            rets = market.log_returns(assets[firm_id])
            h_max = min(args.max_lag, (len(rets) - 1) // 2)
            if h_max < 1:
                raise ValueError("series too short for any lag")
            res = inference.acf(rets, transform=transform, h_max=h_max)
        except ValueError as exc:
            failures.append(f"{firm_id}: {exc}")
            continue
        for lag, val in zip(res.lags, res.values):
            rows.append((firm_id, str(int(lag)), fmt_num(val)))
    if not rows:
        raise SystemExit2("acf: no firm produced a table")
    _write_table(
        _out_path(cfg, "acf.csv"),
        "firm_id,lag,value",
        rows,
        [("firm_id", "s"), ("lag", "n"), ("value", "n")],
        cfg.fmt,
    )
    print(f"acf table: {len(rows)} rows ({transform.value})")
    for line in failures:
        print(f"  failed: {line}", file=sys.stderr)
    return 1 if failures else 0


def cmd_qq(cfg: RunConfig, args) -> int:
    firms = _load_store(cfg)
    assets, failures = _build_assets(cfg, firms)
    rows = []
    for firm_id in sorted(assets):
        try:
            rets = market.log_returns(assets[firm_id])
            if args.law == "gaussian":
                fr = inference.fit_gaussian_mle(rets.v)
            else:
                fr = inference.fit_qgaussian_mle(rets.v)
            pairs = inference.qq_pairs(rets.v, fr.params, center=fr.center)
        except ValueError as exc:
            failures.append(f"{firm_id}: {exc}")
            continue
        n = len(pairs)
        for k, (theo, emp) in enumerate(pairs, start=1):
            rows.append((firm_id, fmt_num(k / (n + 1.0)), fmt_num(theo), fmt_num(emp)))
    if not rows:
        raise SystemExit2("qq: no firm produced a table")
    _write_table(
        _out_path(cfg, "qq.csv"),
        "firm_id,p,theoretical,empirical",
        rows,
        [("firm_id", "s"), ("p", "n"), ("theoretical", "n"), ("empirical", "n")],
        cfg.fmt,
    )
    print(f"qq table: {len(rows)} rows ({args.law})")
    for line in failures:
        print(f"  failed: {line}", file=sys.stderr)
    return 1 if failures else 0


def _final_fits(fits_path: str) -> dict[str, dict]:
    final: dict[str, dict] = {}
    for row in _read_csv_table(fits_path):
        cur = final.get(row["firm_id"])
        if cur is None or row["window_end_date"] > cur["window_end_date"]:
            final[row["firm_id"]] = row
    return final


def cmd_qhist(cfg: RunConfig, args) -> int:
    fits_path = _require(cfg, "fits.csv")
    firms = _load_store(cfg)
    final = _final_fits(fits_path)
    if not final:
        raise SystemExit2("qhist: fits.csv holds no fits")
    qs = np.array([float(r["q"]) for r in final.values()])
    labels = np.array(
        [firms[fid].default_date is not None if fid in firms else False for fid in final]
    )
    edges = np.linspace(1.0, 3.0, args.bins + 1)
    rows = []
    q53 = 5.0 / 3.0
    for k in range(args.bins):
        lo, hi = edges[k], edges[k + 1]
        in_bin = (qs >= lo) & (qs < hi) if k < args.bins - 1 else (qs >= lo) & (qs <= hi)
        rows.append(
            (
                fmt_num(lo),
                fmt_num(hi),
                str(int(np.sum(in_bin))),
                str(int(np.sum(in_bin & labels))),
                "true" if lo <= q53 < hi else "false",
            )
        )
    _write_table(
        _out_path(cfg, "qhist.csv"),
        "bin_lo,bin_hi,n_firms,n_defaulters,contains_q53",
        rows,
        [
            ("bin_lo", "n"),
            ("bin_hi", "n"),
            ("n_firms", "n"),
            ("n_defaulters", "n"),
            ("contains_q53", "n"),
        ],
        cfg.fmt,
    )
    print(f"qhist: {len(qs)} firms binned, {int(labels.sum())} defaulters")
    return 0


def cmd_roc(cfg: RunConfig, args) -> int:
    pd_path = _require(cfg, "pd.csv")
    firms = _load_store(cfg)
    table = _read_csv_table(pd_path)
    if not table:
        raise SystemExit2("roc: pd.csv is empty")
    by_firm: dict[str, list[dict]] = {}
    for row in table:
        by_firm.setdefault(row["firm_id"], []).append(row)
    if args.asof:
        asof = np.datetime64(args.asof, "D")
    else:
        last_dates = [max(np.datetime64(r["date"], "D") for r in rows_)
                      for rows_ in by_firm.values()]
        asof = min(last_dates)
    horizon_end = np.busday_offset(asof, cfg.horizon_days, roll="following")

    scores, labels, years, skipped = [], [], [], []
    for firm_id in sorted(by_firm):
        eligible = [r for r in by_firm[firm_id] if np.datetime64(r["date"], "D") <= asof]
        if not eligible:
            skipped.append(firm_id)
            continue
        last = max(eligible, key=lambda r: r["date"])
        default_date = firms[firm_id].default_date if firm_id in firms else None
        if default_date is not None and default_date <= asof:
            skipped.append(firm_id)  # already in default at valuation
            continue
        is_pos = default_date is not None and asof < default_date <= horizon_end
        scores.append(float(last["pd_qbc"]))
        labels.append(is_pos)
        years.append(int(str(default_date)[:4]) if is_pos else -1)
    try:
        roc = evaluation.roc_curve(np.array(scores), np.array(labels))
        resampled = evaluation.resampled_auc(
            np.array(scores),
            np.array(labels),
            np.array(years),
            repeats=args.repeats,
            seed=cfg.seed,
        )
    except ValueError as exc:
        raise SystemExit2(f"roc: {exc}") from exc
    evaluation.write_roc_points(roc, _out_path(cfg, "roc_points.csv"), cfg.fmt)
    evaluation.write_auc_distribution(resampled, _out_path(cfg, "roc_auc.csv"), cfg.fmt)
    print(
        f"roc: asof {asof}, {roc.n_pos} defaulters / {roc.n_neg} non-defaulters, "
        f"full-sample auc {fmt_num(roc.auc)}, resampled mean {fmt_num(resampled.mean)} "
        f"std {fmt_num(resampled.std)} over {args.repeats} repeats"
    )
    if skipped:
        print(f"  skipped {len(skipped)} firms without usable scores", file=sys.stderr)
    return 0


def cmd_simulate(cfg: RunConfig, args) -> int:
    def gamma_for(q: float, daily_vol: float) -> GammaParams:
        if q <= 1.0:
            raise SystemExit2("simulate: q must be > 1")
        var = daily_vol * daily_vol
        if q < 5.0 / 3.0:
            beta_tilde = 2.0 / ((5.0 - 3.0 * q) * var)
        else:
            beta_tilde = 1.0 / var
        a = (3.0 - q) / (2.0 * (q - 1.0))
        b = (2.0 * a + 1.0) / (2.0 * beta_tilde)
        return GammaParams(a=a, b=b)

    firms = evaluation.synthesize_portfolio(
        n_safe=args.n_safe,
        n_risky=args.n_risky,
        history_days=args.history_days,
        outcome_days=args.outcome_days,
        safe_gamma=gamma_for(args.q_safe, args.daily_vol),
        risky_gamma=gamma_for(args.q_risky, args.daily_vol),
        x0_safe=args.x0_safe,
        x0_risky=args.x0_risky,
        regime_len_days=args.tau,
        seed=cfg.seed,
    )
    out = _out_path(cfg, "sim_firms.csv")
    market.write_firms_csv(firms, out)
    n_def = sum(1 for f in firms.values() if f.default_date is not None)
    print(f"simulated {len(firms)} firms ({n_def} defaulters) -> {out}")
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qdefault", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--seed", type=int, default=None, help="base random seed")
    p.add_argument("--out-dir", default=None, help="run directory for all tables")
    p.add_argument("--format", choices=("csv", "json"), default=None, help="table format")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("ingest", help="validate input CSVs into a firm store")
    sp.add_argument("files", nargs="*", help="input CSVs (long format)")

    for name in ("assets", "fit", "pd"):
        sp = sub.add_parser(name)
        sp.add_argument("--method", choices=("proxy", "implied"), default=None)
        sp.add_argument("--dp-policy", dest="dp_policy", choices=("total", "total80"), default=None)
        sp.add_argument("--risk-free", dest="risk_free", type=float, default=None)
        sp.add_argument("--option-horizon", dest="option_horizon", type=float, default=None)
        if name in ("fit", "pd"):
            sp.add_argument("--window", type=int, default=None)
        if name == "pd":
            sp.add_argument("--horizon-days", dest="horizon_days", type=int, default=None)

    sub.add_parser("dtd", help="DTD columns from an existing pd table")

    sp = sub.add_parser("acf")
    sp.add_argument("--method", choices=("proxy", "implied"), default=None)
    sp.add_argument("--dp-policy", dest="dp_policy", choices=("total", "total80"), default=None)
    sp.add_argument("--transform", choices=("abs", "sq", "raw"), default="abs")
    sp.add_argument("--max-lag", dest="max_lag", type=int, default=100)

    sp = sub.add_parser("qq")
    sp.add_argument("--method", choices=("proxy", "implied"), default=None)
    sp.add_argument("--dp-policy", dest="dp_policy", choices=("total", "total80"), default=None)
    sp.add_argument("--law", choices=("qgaussian", "gaussian"), default="qgaussian")

    sp = sub.add_parser("qhist")
    sp.add_argument("--bins", type=int, default=40)

    sp = sub.add_parser("roc")
    sp.add_argument("--asof", default=None, help="valuation date (default: last common date)")
    sp.add_argument("--repeats", type=int, default=100)
    sp.add_argument("--horizon-days", dest="horizon_days", type=int, default=None)

    sp = sub.add_parser("simulate")
    sp.add_argument("--n-safe", type=int, default=360)
    sp.add_argument("--n-risky", type=int, default=40)
    sp.add_argument("--history-days", type=int, default=320)
    sp.add_argument("--outcome-days", type=int, default=250)
    sp.add_argument("--q-safe", type=float, default=1.08)
    sp.add_argument("--q-risky", type=float, default=1.85)
    sp.add_argument("--daily-vol", type=float, default=0.02)
    sp.add_argument("--x0-safe", type=float, default=1.5)
    sp.add_argument("--x0-risky", type=float, default=0.5)
    sp.add_argument("--tau", type=float, default=25.0)
    return p


_COMMANDS = {
    "ingest": cmd_ingest,
    "assets": cmd_assets,
    "fit": cmd_fit,
    "pd": cmd_pd,
    "dtd": cmd_dtd,
    "acf": cmd_acf,
    "qq": cmd_qq,
    "qhist": cmd_qhist,
    "roc": cmd_roc,
    "simulate": cmd_simulate,
}


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        cfg = _build_config(args)
    except (ValueError, OSError) as exc:
        print(f"qdefault: {exc}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](cfg, args)
    except SystemExit2 as exc:
        print(f"qdefault: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
