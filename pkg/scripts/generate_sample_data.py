#!/usr/bin/env python3
"""Regenerate the committed files under sample_data/.

The riverton_2021 scenario is built so its sample return correlation
hits a fixed target matrix exactly (up to float rounding): start from a
random 12x3 matrix, demean and orthonormalize the columns (QR), scale
to unit sample variance, then mix by the symmetric square root of the
target correlation. Per-column affine scaling afterwards sets means and
risks without touching the correlation. Raw observation series are then
compounded from the returns and written in canonical form, plus the
same observations in the two generic export shapes for the ingest
walkthrough.

Everything is seeded; reruns reproduce the committed bytes.
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from derfolio import (  # noqa: E402
    OptimizerConfig, RawSeries, estimate_stats, merge_to_canonical,
    min_variance, parse_canonical, prepare_scenario, to_returns,
)

OUT = REPO / "sample_data"

ASSETS = ("solar", "wind", "biodiesel")
START_VALUES = (1250.0, 870.0, 5400.0)

# off-diagonals: solar-wind, solar-biodiesel, wind-biodiesel
RHO_2021 = np.array([
    [1.0, 0.11001482, 0.46258328],
    [0.11001482, 1.0, -0.2612327],
    [0.46258328, -0.2612327, 1.0],
])
RHO_2020 = np.array([
    [1.0, 0.25, 0.10],
    [0.25, 1.0, -0.15],
    [0.10, -0.15, 1.0],
])
RHO_2022 = np.array([
    [1.0, -0.05, 0.30],
    [-0.05, 1.0, 0.20],
    [0.30, 0.20, 1.0],
])

SCENARIOS = {
    # year: (seed, target rho, mean returns, return std devs)
    2020: (20, RHO_2020, (0.010, 0.018, 0.012), (0.09, 0.14, 0.08)),
    2021: (21, RHO_2021, (0.012, 0.021, 0.015), (0.06, 0.10, 0.05)),
    2022: (22, RHO_2022, (0.014, 0.024, 0.016), (0.10, 0.15, 0.09)),
}


def month_labels(start_year: int, start_month: int, count: int) -> list[str]:
    labels = []
    year, month = start_year, start_month
    for _ in range(count):
        labels.append(f"{year:04d}-{month:02d}")
        month += 1
        if month > 12:
            month, year = 1, year + 1
    return labels


def exact_correlation_returns(rng: np.random.Generator, rho: np.ndarray,
                              means, stds, n_obs: int = 12) -> np.ndarray:
    """n_obs x k return matrix whose sample correlation equals rho."""
    k = rho.shape[0]
    raw = rng.standard_normal((n_obs, k))
    raw -= raw.mean(axis=0)
    q, r = np.linalg.qr(raw)
    assert np.min(np.abs(np.diag(r))) > 1e-10, "degenerate random draw"
    white = q * np.sqrt(n_obs - 1)
    evals, evecs = np.linalg.eigh(rho)
    assert np.min(evals) > 0, "target correlation must be positive definite"
    sqrt_rho = evecs @ np.diag(np.sqrt(evals)) @ evecs.T
    correlated = white @ sqrt_rho
    returns = np.asarray(means) + correlated * np.asarray(stds)
    assert float(np.min(returns)) > -0.6, "returns implausibly extreme"
    return returns


def compound(start: float, returns: np.ndarray) -> list[float]:
    values = [start]
    for r in returns:
        values.append(values[-1] * (1.0 + float(r)))
    return values


def build_scenario(year: int) -> list[RawSeries]:
    seed, rho, means, stds = SCENARIOS[year]
    rng = np.random.default_rng(seed)
    returns = exact_correlation_returns(rng, rho, means, stds)
    periods = month_labels(year - 1, 12, 13)
    series = []
    for i, (asset, start) in enumerate(zip(ASSETS, START_VALUES)):
        series.append(
            RawSeries(asset_name=asset, unit="", periods=tuple(periods),
                      values=compound(start, returns[:, i]))
        )
    return series


def write_csv(path: Path, rows: list[list[str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


def write_exports(series: list[RawSeries]) -> None:
    exports = OUT / "exports"
    exports.mkdir(parents=True, exist_ok=True)
    solar, wind, biodiesel = series

    rows = [["Month", "Value"]]
    rows += [[p, repr(v)] for p, v in zip(solar.periods, solar.values.tolist())]
    write_csv(exports / "solar_2021_long.csv", rows)

    rows = [["period", "kWh"]]
    rows += [[p, repr(v)] for p, v in zip(wind.periods, wind.values.tolist())]
    write_csv(exports / "wind_2021_long.csv", rows)

    # wide form needs whole years: extend biodiesel back to 2020-01 by
    # walking the December 2020 value backward with small returns
    rng = np.random.default_rng(2021)
    prefix_returns = 0.01 + 0.05 * rng.standard_normal(11)
    values_2020 = [float(biodiesel.values[0])]
    for r in prefix_returns:
        values_2020.insert(0, values_2020[0] / (1.0 + float(r)))
    values_2021 = biodiesel.values[1:].tolist()
    months = ["Jan", "Feb", "Mar", "Apr", "May", "Jun",
              "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"]
    rows = [["Year", *months],
            ["2020", *(repr(v) for v in values_2020)],
            ["2021", *(repr(v) for v in values_2021)]]
    write_csv(exports / "biodiesel_2021_wide.csv", rows)


def write_coastal(path: Path) -> None:
    """Two-asset demo with wind speeds, for the cube transform."""
    rng = np.random.default_rng(11)
    periods = month_labels(2020, 12, 13)
    speeds = np.clip(6.0 + np.cumsum(rng.normal(0.05, 0.4, 13)), 2.5, None)
    solar_returns = 0.02 + 0.07 * rng.standard_normal(12)
    solar_values = compound(980.0, solar_returns)
    series = [
        RawSeries(asset_name="solar", unit="", periods=tuple(periods),
                  values=solar_values),
        RawSeries(asset_name="wind", unit="", periods=tuple(periods),
                  values=speeds.tolist()),
    ]
    merge_to_canonical(series, path,
                       comments=["coastal demo: wind column is speed in m/s"])


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    mvp_risks = {}
    for year in sorted(SCENARIOS):
        series = build_scenario(year)
        path = OUT / f"riverton_{year}.csv"
        merge_to_canonical(series, path,
                           comments=[f"riverton demo scenario, {year}"])
        scenario = parse_canonical(path)
        prepared = prepare_scenario(scenario.name, scenario.raw)
        target_rho = SCENARIOS[year][1]
        gap = float(np.max(np.abs(prepared.stats.correlation - target_rho)))
        assert gap < 1e-9, f"{year}: correlation off target by {gap}"
        mvp = min_variance(prepared.stats, OptimizerConfig())
        mvp_risks[year] = mvp.risk
        print(f"{path.name}: correlation gap {gap:.2e}, "
              f"MVP risk {mvp.risk:.4%}")
        if year == 2021:
            write_exports(series)
    assert mvp_risks[2021] < mvp_risks[2020] < mvp_risks[2022], mvp_risks

    write_coastal(OUT / "coastal_2021.csv")
    coastal = parse_canonical(OUT / "coastal_2021.csv")
    cubed = prepare_scenario("coastal", coastal.raw, {"wind": "cube"})
    # the cube demo must support a Sharpe-optimal portfolio at r_f = 0
    assert float(np.max(cubed.stats.mean_returns)) > 0.002, \
        cubed.stats.mean_returns
    print(f"coastal_2021.csv: cube-transform wind risk "
          f"{float(np.sqrt(cubed.stats.covariance[1, 1])):.4%}")

    with open(OUT / "frontier.conf", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(
            "# example config: same keys as the long CLI flags\n"
            "points=60\n"
            "risk-free=0.0005\n"
        )
    print("wrote sample_data/frontier.conf")


if __name__ == "__main__":
    main()
