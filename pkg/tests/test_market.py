"""Ingestion, liability interpolation, asset construction, CSV interfaces."""

import numpy as np
import pytest

from qdefault import market
from qdefault.market import (
    AssetMethod,
    ConvergenceError,
    DefaultPointPolicy,
    FirmSeries,
)
from qdefault.specfun import normal_cdf


def dates(n, start="2020-01-06"):
    return np.busday_offset(np.datetime64(start), np.arange(n), roll="following")


def make_firm(equity, liabilities, firm_id="F1", default_date=None):
    equity = np.asarray(equity, dtype=float)
    return FirmSeries(
        firm_id=firm_id,
        dates=dates(len(equity)),
        equity=equity,
        liabilities_raw=np.asarray(liabilities, dtype=float),
        default_date=default_date,
    )


# ---------------------------------------------------------------------------
# FirmSeries validation
# ---------------------------------------------------------------------------

def test_firm_series_validation():
    with pytest.raises(ValueError):
        make_firm([1.0, -2.0, 3.0], [1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        make_firm([1.0, 2.0], [1.0, -1.0])
    with pytest.raises(ValueError):
        FirmSeries("F1", np.array(["2020-01-06", "2020-01-06"], dtype="datetime64[D]"),
                   np.array([1.0, 2.0]), np.array([1.0, 1.0]))


# ---------------------------------------------------------------------------
# Liability interpolation and default points
# ---------------------------------------------------------------------------

def test_interpolation_constant():
    f = make_firm(np.ones(10), np.full(10, 70.0))
    assert np.array_equal(market.interpolate_liabilities(f), np.full(10, 70.0))


def test_interpolation_single_report():
    liab = np.full(8, np.nan)
    liab[3] = 50.0
    f = make_firm(np.ones(8), liab)
    assert np.array_equal(market.interpolate_liabilities(f), np.full(8, 50.0))


def test_interpolation_linear_midpoint():
    # reports 100 and 200 separated by four calendar days with the midpoint on day 2
    d = np.array(["2020-01-06", "2020-01-08", "2020-01-10"], dtype="datetime64[D]")
    f = FirmSeries("F1", d, np.ones(3), np.array([100.0, np.nan, 200.0]))
    out = market.interpolate_liabilities(f)
    assert out[1] == pytest.approx(150.0)


def test_interpolation_smooths_repeated_steps():
    # step pattern: repeats between quarterly reports are smoothed away
    liab = np.array([100.0, 100.0, 100.0, 100.0, 200.0, 200.0, 200.0])
    f = make_firm(np.ones(7), liab)
    out = market.interpolate_liabilities(f)
    assert out[0] == 100.0
    assert np.all(np.diff(out[:5]) > 0.0)  # linear ramp up to the new report
    assert np.array_equal(out[4:], np.full(3, 200.0))


def test_interpolation_requires_observations():
    f = make_firm(np.ones(5), np.full(5, np.nan))
    with pytest.raises(ValueError):
        market.interpolate_liabilities(f)


def test_default_point_policies():
    assert market.default_point(100.0, DefaultPointPolicy.TOTAL_LIABILITIES) == 100.0
    assert market.default_point(100.0, DefaultPointPolicy.LIABILITIES_80) == pytest.approx(80.0)
    # the haircut moves log inverse leverage by exactly ln(1/0.8)
    v = 500.0
    shift = np.log(v / 80.0) - np.log(v / 100.0)
    assert shift == pytest.approx(np.log(1.0 / 0.8), rel=1e-14)
    with pytest.raises(ValueError):
        market.default_point(0.0, DefaultPointPolicy.TOTAL_LIABILITIES)


# ---------------------------------------------------------------------------
# Direct proxy
# ---------------------------------------------------------------------------

def test_direct_proxy_sum():
    f = make_firm([50.0, 60.0], [100.0, 100.0])
    a = market.direct_proxy_assets(f)
    assert np.array_equal(a.V, [150.0, 160.0])
    assert np.array_equal(a.D, [100.0, 100.0])
    assert a.method is AssetMethod.DIRECT_PROXY
    a80 = market.direct_proxy_assets(f, DefaultPointPolicy.LIABILITIES_80)
    assert np.array_equal(a80.V, [150.0, 160.0])  # V always uses full liabilities
    assert np.array_equal(a80.D, [80.0, 80.0])


def test_direct_proxy_equity_only_firm():
    f = make_firm([10.0, 11.0, 12.0], [0.0, 0.0, 0.0])
    a = market.direct_proxy_assets(f)
    assert np.array_equal(a.V, f.equity)
    assert np.array_equal(a.D, np.zeros(3))


def test_direct_proxy_returns_track_equity_when_debt_small():
    rng = np.random.default_rng(0)
    e = 100.0 * np.exp(np.cumsum(rng.normal(0.0, 0.02, 600)))
    f = make_firm(e, np.full(600, 0.5))
    a = market.direct_proxy_assets(f)
    rv = np.diff(np.log(a.V))
    re = np.diff(np.log(e))
    corr = np.corrcoef(rv, re)[0, 1]
    assert abs(corr - 1.0) < 1e-3


# ---------------------------------------------------------------------------
# Iterative implied
# ---------------------------------------------------------------------------

def bs_call(v, d, r, sigma, t):
    if d == 0.0:
        return v
    vol = sigma * np.sqrt(t)
    d1 = (np.log(v / d) + (r + sigma * sigma / 2.0) * t) / vol
    d2 = d1 - vol
    return v * normal_cdf(d1) - d * np.exp(-r * t) * normal_cdf(d2)


def test_implied_zero_debt_returns_equity():
    f = make_firm([10.0, 12.0, 9.0], [0.0, 0.0, 0.0])
    a = market.implied_assets(f)
    assert np.array_equal(a.V, f.equity)
    assert a.method is AssetMethod.ITERATIVE_IMPLIED


def test_implied_zero_volatility_limit():
    # constant equity and debt: sigma_V = 0 and V = E + D e^{-rT}
    f = make_firm(np.full(5, 40.0), np.full(5, 100.0))
    a = market.implied_assets(f, r=0.02, option_horizon_years=1.0)
    assert np.allclose(a.V, 40.0 + 100.0 * np.exp(-0.02), rtol=1e-12)


def test_implied_round_trip_recovers_generator():
    # GBM asset path priced to equity with the call formula, then inverted
    rng = np.random.default_rng(123)
    n = 750
    sigma_true = 0.2
    r = 0.02
    v_true = 160.0 * np.exp(
        np.cumsum(rng.normal(0.0, sigma_true / np.sqrt(250.0), n))
    )
    debt = 100.0
    equity = np.array([bs_call(v, debt, r, sigma_true, 1.0) for v in v_true])
    f = make_firm(equity, np.full(n, debt))
    a = market.implied_assets(f, r=r, option_horizon_years=1.0)
    rel_err = np.max(np.abs(a.V - v_true) / v_true)
    assert rel_err < 1e-3
    assert np.all(a.V > f.equity)  # call value below asset value when D > 0


def test_implied_idempotent_at_fixed_point():
    rng = np.random.default_rng(5)
    e = 80.0 * np.exp(np.cumsum(rng.normal(0.0, 0.015, 300)))
    f = make_firm(e, np.full(300, 60.0))
    a = market.implied_assets(f, tol=1e-8)
    rets = np.diff(np.log(a.V))
    sigma_v = np.std(rets, ddof=1) * np.sqrt(250.0)
    v_again = market._implied_sweep(f.equity, np.full(300, 60.0), 0.02, 1.0, sigma_v)
    assert np.max(np.abs(v_again - a.V) / a.V) < 1e-8


def test_implied_non_convergence_carries_last_iterate():
    rng = np.random.default_rng(9)
    e = 80.0 * np.exp(np.cumsum(rng.normal(0.0, 0.02, 120)))
    f = make_firm(e, np.full(120, 60.0))
    with pytest.raises(ConvergenceError) as exc_info:
        market.implied_assets(f, max_sweeps=1)
    assert exc_info.value.last is not None
    assert len(exc_info.value.last) == 120


# ---------------------------------------------------------------------------
# Log returns
# ---------------------------------------------------------------------------

def test_log_returns_basics():
    f = make_firm([100.0, 100.0, 200.0], [0.0, 0.0, 0.0])
    a = market.direct_proxy_assets(f)
    r = market.log_returns(a)
    assert len(r) == 2
    assert r.v[0] == 0.0
    assert r.v[1] == pytest.approx(np.log(2.0), rel=1e-15)
    assert np.array_equal(r.dates, a.dates[1:])


def test_log_returns_telescope():
    rng = np.random.default_rng(1)
    e = 50.0 * np.exp(np.cumsum(rng.normal(0.0, 0.02, 400)))
    a = market.direct_proxy_assets(make_firm(e, np.zeros(400)))
    r = market.log_returns(a)
    assert np.sum(r.v) == pytest.approx(np.log(a.V[-1] / a.V[0]), abs=1e-12)


# ---------------------------------------------------------------------------
# CSV interfaces
# ---------------------------------------------------------------------------

CSV_GOOD = """firm_id,date,market_cap,total_liabilities,defaulted_on
A,2020-01-06,50,100,
A,2020-01-07,52,,
A,2020-01-08,51,110,
B,2020-01-06,20,5,2020-06-01
B,2020-01-07,21,5,2020-06-01
"""


def test_parse_well_formed(tmp_path):
    path = tmp_path / "firms.csv"
    path.write_text(CSV_GOOD)
    firms, rejects = market.parse_firms_csv(str(path))
    assert rejects == []
    assert set(firms) == {"A", "B"}
    assert len(firms["A"]) == 3
    assert np.isnan(firms["A"].liabilities_raw[1])
    assert firms["B"].default_date == np.datetime64("2020-06-01")
    assert firms["A"].default_date is None


def test_parse_rejects_bad_rows(tmp_path):
    bad = (
        "firm_id,date,market_cap,total_liabilities\n"
        "A,2020-01-06,50,100\n"
        "A,2020-01-07,-3,100\n"      # negative market cap -> reject line 3
        "A,2020-01-07,51,100\n"
        "A,not-a-date,51,100\n"
        "A,2020-01-08,51,-4\n"
        "A,2020-01-07,51,100\n"      # duplicate (A, 2020-01-07) -> line 7
    )
    path = tmp_path / "firms.csv"
    path.write_text(bad)
    firms, rejects = market.parse_firms_csv(str(path))
    assert len(firms["A"]) == 2
    assert any(":3:" in r and "market_cap" in r for r in rejects)
    assert any("not-a-date" in r for r in rejects)
    assert any("-4" in r for r in rejects)
    assert any(":7:" in r and "duplicate" in r and "2020-01-07" in r for r in rejects)


def test_parse_missing_columns(tmp_path):
    path = tmp_path / "firms.csv"
    path.write_text("firm_id,date,market_cap\nA,2020-01-06,50\n")
    with pytest.raises(ValueError, match="missing required columns"):
        market.parse_firms_csv(str(path))


def test_write_and_reload_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    firms = {
        "X": make_firm(50.0 * np.exp(rng.normal(0, 0.02, 40).cumsum()),
                       np.full(40, 30.0), firm_id="X"),
        "Y": make_firm(80.0 * np.exp(rng.normal(0, 0.02, 40).cumsum()),
                       np.full(40, 10.0), firm_id="Y",
                       default_date=np.datetime64("2021-05-01")),
    }
    path = tmp_path / "firms.csv"
    market.write_firms_csv(firms, str(path))
    loaded = market.load_firms_csv(str(path))
    assert set(loaded) == {"X", "Y"}
    assert loaded["Y"].default_date == np.datetime64("2021-05-01")
    # 12-significant-digit serialization round-trips well within fitting tolerance
    assert np.max(np.abs(loaded["X"].equity - firms["X"].equity)
                  / firms["X"].equity) < 1e-11


def test_write_assets_formats(tmp_path):
    f = make_firm([50.0, 60.0, 55.0], [100.0, 100.0, 100.0])
    a = market.direct_proxy_assets(f)
    csv_path = tmp_path / "assets.csv"
    market.write_assets([a], str(csv_path), fmt="csv")
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "firm_id,date,V,D,v"
    assert lines[1].endswith(",")  # first row has no return
    assert len(lines) == 4
    json_path = tmp_path / "assets.json"
    market.write_assets([a], str(json_path), fmt="json")
    import json

    rows = [json.loads(line) for line in json_path.read_text().splitlines()]
    assert rows[0]["v"] is None
    assert rows[1]["V"] == pytest.approx(160.0)
