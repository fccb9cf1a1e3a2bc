"""Mean-variance portfolio analytics for energy resource series.

Build raw observation series from delimited exports, convert them to
returns, estimate means/covariance/correlation, and solve the long-only
minimum-variance, maximum-Sharpe, and efficient-frontier problems
exactly. A CLI (``derfolio``) wires the pieces together and renders
deterministic CSV/JSON/SVG reports.
"""

from . import errors
from .core import (MAX_ASSETS, AssetStats, FrontierPoint, Portfolio,
                   RawSeries, ReturnSeries, Scenario, parse_period,
                   portfolio_return, portfolio_risk, validate_portfolio)
from .ingest import import_column_export, merge_to_canonical, parse_canonical
from .optimizer import (OptimizerConfig, max_sharpe, min_variance,
                        min_variance_at_target, oracle_grid_search,
                        sweep_frontier)
from .report import (ComparisonReport, ScenarioAnalysis, analyze_scenario,
                     prepare_scenario)
from .stats import align, estimate_stats, sharpe_ratio, to_returns

__version__ = "0.1.0"

__all__ = [
    "MAX_ASSETS",
    "AssetStats",
    "ComparisonReport",
    "FrontierPoint",
    "OptimizerConfig",
    "Portfolio",
    "RawSeries",
    "ReturnSeries",
    "Scenario",
    "ScenarioAnalysis",
    "align",
    "analyze_scenario",
    "errors",
    "estimate_stats",
    "import_column_export",
    "max_sharpe",
    "merge_to_canonical",
    "min_variance",
    "min_variance_at_target",
    "oracle_grid_search",
    "parse_canonical",
    "parse_period",
    "portfolio_return",
    "portfolio_risk",
    "prepare_scenario",
    "sharpe_ratio",
    "sweep_frontier",
    "to_returns",
    "validate_portfolio",
    "__version__",
]
