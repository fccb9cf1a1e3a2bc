"""Scenario analysis assembly and report serialization.

Takes parsed scenarios through returns, statistics, frontier, and the
two named portfolios, then renders the results as CSV, JSON, and text.
Machine outputs carry fractions; only text tables and chart axes use
percent. All serialization is deterministic: floats are written with
repr (shortest round-trip form) and JSON key order is fixed.

An optional annualization factor k scales reported returns by k, risks
by sqrt(k), and Sharpe ratios by sqrt(k); weights are unaffected.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from . import errors
from .core import (AssetStats, FrontierPoint, Portfolio, RawSeries, Scenario,
                   validate_portfolio)
from .optimizer import OptimizerConfig, max_sharpe, min_variance, sweep_frontier
from .stats import align, estimate_stats, sharpe_ratio, to_returns


def prepare_scenario(name: str, raw_series: Sequence[RawSeries],
                     transforms: Mapping[str, str] | None = None) -> Scenario:
    """Turn raw series into an analyzed-ready scenario: per-asset
    returns (with optional per-asset transforms), aligned on common
    periods, with statistics estimated."""
    if not raw_series:
        raise ValueError("no raw series")
    names = [s.asset_name for s in raw_series]
    transforms = dict(transforms or {})
    unknown = set(transforms) - set(names)
    if unknown:
        raise errors.UnknownColumn(
            f"transform names unknown asset(s) {sorted(unknown)}; "
            f"scenario has {names}"
        )
    returns = [
        to_returns(s, transforms.get(s.asset_name, "identity"))
        for s in raw_series
    ]
    aligned = align(returns)
    stats = estimate_stats(aligned)
    return Scenario(name=name, raw=tuple(raw_series), returns=aligned,
                    stats=stats)


@dataclass(frozen=True)
class ScenarioAnalysis:
    """One scenario's full optimization output."""

    scenario: Scenario
    mvp: Portfolio
    best_sharpe: Portfolio
    sharpe: float
    risk_free: float

    @property
    def name(self) -> str:
        return self.scenario.name

    @property
    def stats(self) -> AssetStats:
        stats = self.scenario.stats
        assert stats is not None
        return stats

    @property
    def frontier(self) -> tuple[FrontierPoint, ...]:
        frontier = self.scenario.frontier
        assert frontier is not None
        return frontier


def analyze_scenario(scenario: Scenario, cfg: OptimizerConfig) -> ScenarioAnalysis:
    """Compute frontier, minimum-variance, and maximum-Sharpe results
    for a prepared scenario. Every embedded portfolio is re-validated
    against the scenario statistics."""
    stats = scenario.stats
    if stats is None:
        raise ValueError(f"scenario {scenario.name!r} has no statistics")
    frontier = sweep_frontier(stats, cfg)
    mvp = min_variance(stats, cfg)
    best = max_sharpe(stats, cfg)
    ratio = sharpe_ratio(best.expected_return, cfg.risk_free, best.risk)
    validate_portfolio(mvp, stats)
    validate_portfolio(best, stats)
    for point in frontier:
        if point.portfolio is not None:
            validate_portfolio(point.portfolio, stats)
    scenario = dataclasses.replace(scenario, frontier=tuple(frontier))
    return ScenarioAnalysis(scenario=scenario, mvp=mvp, best_sharpe=best,
                            sharpe=ratio, risk_free=cfg.risk_free)


@dataclass(frozen=True)
class ComparisonReport:
    """Analyses for several scenarios; input order is preserved and a
    risk-sorted view is derived for the cross-scenario table."""

    analyses: tuple[ScenarioAnalysis, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "analyses", tuple(self.analyses))
        if len(self.analyses) < 2:
            raise ValueError("comparison needs at least 2 scenarios")
        names = [a.name for a in self.analyses]
        if len(set(names)) != len(names):
            raise errors.DataError(f"duplicate scenario names in {names}")

    def ordered_by_mvp_risk(self) -> tuple[ScenarioAnalysis, ...]:
        return tuple(sorted(self.analyses, key=lambda a: a.mvp.risk))


def _scale(annualize: float | None) -> tuple[float, float]:
    """(return multiplier, risk multiplier) for a reporting scale."""
    if annualize is None:
        return 1.0, 1.0
    return float(annualize), math.sqrt(float(annualize))


def _portfolio_dict(portfolio: Portfolio, annualize: float | None) -> dict:
    r_mul, s_mul = _scale(annualize)
    return {
        "weights": [float(w) for w in portfolio.weights],
        "expected_return": float(portfolio.expected_return) * r_mul,
        "risk": float(portfolio.risk) * s_mul,
    }


def frontier_csv_text(analysis: ScenarioAnalysis,
                      annualize: float | None = None) -> str:
    """Frontier table: target_return, risk, then one weight column per
    asset, one row per frontier point in target order."""
    r_mul, s_mul = _scale(annualize)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["target_return", "risk", *analysis.stats.asset_names])
    for point in analysis.frontier:
        assert point.portfolio is not None
        writer.writerow(
            [
                repr(float(point.target_return) * r_mul),
                repr(float(point.portfolio.risk) * s_mul),
                *(repr(float(w)) for w in point.portfolio.weights),
            ]
        )
    return buf.getvalue()


def frontier_json_dict(analysis: ScenarioAnalysis,
                       annualize: float | None = None) -> dict:
    _, s_mul = _scale(annualize)
    stats = analysis.stats
    best = _portfolio_dict(analysis.best_sharpe, annualize)
    best["sharpe"] = float(analysis.sharpe) * s_mul
    return {
        "scenario": analysis.name,
        "n_periods": stats.n_periods,
        "asset_names": list(stats.asset_names),
        "annualize": float(annualize) if annualize is not None else None,
        "mvp": _portfolio_dict(analysis.mvp, annualize),
        "max_sharpe": best,
        "correlation": [
            [float(v) for v in row] for row in stats.correlation
        ],
    }


def comparison_json_dict(report: ComparisonReport,
                         annualize: float | None = None) -> dict:
    r_mul, _ = _scale(annualize)
    scenarios = []
    for analysis in report.analyses:
        entry = frontier_json_dict(analysis, annualize)
        entry["mean_returns"] = [
            float(m) * r_mul for m in analysis.stats.mean_returns
        ]
        scenarios.append(entry)
    return {
        "scenarios": scenarios,
        "ordered_by_mvp_risk": [
            a.name for a in report.ordered_by_mvp_risk()
        ],
    }


def comparison_csv_text(report: ComparisonReport,
                        annualize: float | None = None) -> str:
    """Cross-scenario summary, one row per scenario, ordered by
    minimum-variance risk ascending."""
    r_mul, s_mul = _scale(annualize)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["scenario", "n_periods", "mvp_return", "mvp_risk",
         "max_sharpe_return", "max_sharpe_risk", "sharpe"]
    )
    for a in report.ordered_by_mvp_risk():
        writer.writerow(
            [
                a.name,
                str(a.stats.n_periods),
                repr(float(a.mvp.expected_return) * r_mul),
                repr(float(a.mvp.risk) * s_mul),
                repr(float(a.best_sharpe.expected_return) * r_mul),
                repr(float(a.best_sharpe.risk) * s_mul),
                repr(float(a.sharpe) * s_mul),
            ]
        )
    return buf.getvalue()


def comparison_text_table(report: ComparisonReport,
                          annualize: float | None = None) -> str:
    r_mul, s_mul = _scale(annualize)
    rows = [
        ("scenario", "n", "MVP return", "MVP risk",
         "best return", "best risk", "Sharpe")
    ]
    for a in report.ordered_by_mvp_risk():
        rows.append(
            (
                a.name,
                str(a.stats.n_periods),
                f"{a.mvp.expected_return * r_mul:.4%}",
                f"{a.mvp.risk * s_mul:.4%}",
                f"{a.best_sharpe.expected_return * r_mul:.4%}",
                f"{a.best_sharpe.risk * s_mul:.4%}",
                f"{a.sharpe * s_mul:.6f}",
            )
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def correlation_text(name: str, stats: AssetStats) -> str:
    """Correlation matrix as a labeled text table with 8 decimals."""
    width = max([len(a) for a in stats.asset_names] + [12])
    lines = [f"Correlation matrix: {name} ({stats.n_periods} return periods)"]
    header = " " * width + "  " + "  ".join(
        a.rjust(width) for a in stats.asset_names
    )
    lines.append(header.rstrip())
    for asset, row in zip(stats.asset_names, stats.correlation):
        cells = "  ".join(f"{v:.8f}".rjust(width) for v in row)
        lines.append(f"{asset.ljust(width)}  {cells}".rstrip())
    return "\n".join(lines) + "\n"


def correlation_json_dict(name: str, stats: AssetStats) -> dict:
    return {
        "scenario": name,
        "n_periods": stats.n_periods,
        "asset_names": list(stats.asset_names),
        "correlation": [[float(v) for v in row] for row in stats.correlation],
    }


def json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def figure_entry(analysis: ScenarioAnalysis,
                 annualize: float | None = None) -> dict:
    """Chart-ready numbers for one scenario (fractions, scaled)."""
    r_mul, s_mul = _scale(annualize)
    risks = []
    rets = []
    for point in analysis.frontier:
        assert point.portfolio is not None
        risks.append(point.portfolio.risk * s_mul)
        rets.append(point.portfolio.expected_return * r_mul)
    return {
        "name": analysis.name,
        "n_periods": analysis.stats.n_periods,
        "risks": risks,
        "returns": rets,
        "mvp_point": (analysis.mvp.risk * s_mul,
                      analysis.mvp.expected_return * r_mul),
        "sharpe_point": (analysis.best_sharpe.risk * s_mul,
                         analysis.best_sharpe.expected_return * r_mul),
    }
