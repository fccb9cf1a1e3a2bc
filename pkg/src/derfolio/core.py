"""Domain types for resource-portfolio analytics.

Raw observation series, per-period return series, estimated asset
statistics, portfolios, frontier points, and named scenarios. All types
are immutable value objects validated on construction; numpy array
fields are copied and marked read-only so instances can be shared
across threads freely.

Period labels are calendar strings, either ``YYYY-MM`` (monthly) or
``YYYY-MM-DD`` (daily). Within one series labels must be unique,
strictly increasing, and of a single granularity.
"""

from __future__ import annotations

import datetime
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import errors

#: Hard bound on assets per scenario; the exact frontier solver
#: enumerates asset subsets, so cost grows as 2**n.
MAX_ASSETS = 32

_MONTHLY_RE = re.compile(r"^(\d{4})-(\d{2})$")
_DAILY_RE = re.compile(r"^(\d{4})-(\d{2})-(\d{2})$")

_WEIGHT_SUM_TOL = 1e-9
_RECOMPUTE_TOL = 1e-9
_TARGET_MATCH_TOL = 1e-7


def parse_period(label: str) -> tuple[str, tuple[int, ...]]:
    """Parse a period label into ``(granularity, sort_key)``.

    Granularity is ``"monthly"`` for ``YYYY-MM`` labels and ``"daily"``
    for ISO dates. The sort key orders labels chronologically within a
    granularity.
    """
    m = _MONTHLY_RE.match(label)
    if m:
        year, month = int(m.group(1)), int(m.group(2))
        if not 1 <= month <= 12:
            raise errors.InvalidPeriod(f"invalid month in period {label!r}")
        return "monthly", (year, month)
    m = _DAILY_RE.match(label)
    if m:
        try:
            d = datetime.date(int(m.group(1)), int(m.group(2)), int(m.group(3)))
        except ValueError as exc:
            raise errors.InvalidPeriod(f"invalid date {label!r}: {exc}") from exc
        return "daily", (d.year, d.month, d.day)
    raise errors.InvalidPeriod(
        f"period {label!r} is neither YYYY-MM nor YYYY-MM-DD"
    )


def check_period_sequence(labels: Sequence[str], context: str = "series") -> str:
    """Validate that labels are unique, strictly increasing, and of one
    granularity. Returns the granularity."""
    if not labels:
        raise errors.TooShort(f"{context}: no periods")
    gran, prev_key = parse_period(labels[0])
    prev_label = labels[0]
    for label in labels[1:]:
        g, key = parse_period(label)
        if g != gran:
            raise errors.MixedGranularity(
                f"{context}: period {label!r} is {g} but series started {gran}"
            )
        if key == prev_key:
            raise errors.DuplicatePeriod(f"{context}: duplicate period {label!r}")
        if key < prev_key:
            raise errors.OutOfOrderPeriods(
                f"{context}: period {label!r} precedes {prev_label!r}"
            )
        prev_key, prev_label = key, label
    return gran


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RawSeries:
    """One asset's raw resource observations (energy, speed, volume...).

    Values must be finite and non-negative; at least two observations
    are needed so that at least one relative return can be formed.
    """

    asset_name: str
    unit: str
    periods: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        if not self.asset_name:
            raise ValueError("asset_name must be non-empty")
        object.__setattr__(self, "periods", tuple(self.periods))
        object.__setattr__(self, "values", _frozen_array(self.values))
        if self.values.ndim != 1 or len(self.values) != len(self.periods):
            raise ValueError(
                f"{self.asset_name}: periods and values must have equal length"
            )
        if len(self.values) < 2:
            raise errors.TooShort(
                f"{self.asset_name}: need at least 2 observations, "
                f"got {len(self.values)}"
            )
        if not np.all(np.isfinite(self.values)):
            raise errors.NonNumericCell(f"{self.asset_name}: non-finite observation")
        if np.any(self.values < 0):
            idx = int(np.argmin(self.values))
            raise errors.NegativeValue(
                f"{self.asset_name}: negative observation "
                f"{self.values[idx]} at {self.periods[idx]}"
            )
        check_period_sequence(self.periods, self.asset_name)

    @property
    def granularity(self) -> str:
        return parse_period(self.periods[0])[0]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ReturnSeries:
    """Per-period relative returns; each label is the period of the
    later of the two observations that formed the return."""

    asset_name: str
    periods: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        if not self.asset_name:
            raise ValueError("asset_name must be non-empty")
        object.__setattr__(self, "periods", tuple(self.periods))
        object.__setattr__(self, "values", _frozen_array(self.values))
        if self.values.ndim != 1 or len(self.values) != len(self.periods):
            raise ValueError(
                f"{self.asset_name}: periods and values must have equal length"
            )
        if len(self.values) < 1:
            raise errors.TooShort(f"{self.asset_name}: empty return series")
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"{self.asset_name}: non-finite return")
        if np.any(self.values <= -1.0):
            idx = int(np.argmin(self.values))
            raise ValueError(
                f"{self.asset_name}: return {self.values[idx]} at "
                f"{self.periods[idx]} is not above -100%"
            )
        check_period_sequence(self.periods, self.asset_name)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class AssetStats:
    """Mean returns, covariance, and correlation for an asset set.

    ``n_periods`` is the number of aligned return observations the
    estimates were computed from.
    """

    asset_names: tuple[str, ...]
    mean_returns: np.ndarray
    covariance: np.ndarray
    correlation: np.ndarray
    n_periods: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "asset_names", tuple(self.asset_names))
        object.__setattr__(self, "mean_returns", _frozen_array(self.mean_returns))
        object.__setattr__(self, "covariance", _frozen_array(self.covariance))
        object.__setattr__(self, "correlation", _frozen_array(self.correlation))
        n = len(self.asset_names)
        if n == 0:
            raise ValueError("need at least one asset")
        if n > MAX_ASSETS:
            raise errors.AssetCountExceeded(
                f"{n} assets exceeds the supported bound of {MAX_ASSETS}"
            )
        if len(set(self.asset_names)) != n:
            raise errors.DuplicateAsset("asset names must be unique")
        if self.mean_returns.shape != (n,):
            raise ValueError("mean_returns shape mismatch")
        for name, mat in (("covariance", self.covariance),
                          ("correlation", self.correlation)):
            if mat.shape != (n, n):
                raise ValueError(f"{name} shape mismatch")
            if not np.all(np.isfinite(mat)):
                raise ValueError(f"{name} has non-finite entries")
            if np.max(np.abs(mat - mat.T)) > 1e-12:
                raise ValueError(f"{name} is not symmetric")
        if np.any(np.diag(self.covariance) < 0):
            raise ValueError("covariance has a negative diagonal entry")
        if np.any(np.diag(self.correlation) != 1.0):
            raise ValueError("correlation diagonal must be exactly 1")
        if np.max(np.abs(self.correlation)) > 1.0:
            raise ValueError("correlation entries must lie in [-1, 1]")
        if np.linalg.eigvalsh(self.correlation)[0] < -1e-9:
            raise ValueError("correlation is not positive semidefinite")
        # correlation must agree with the covariance where variances allow
        sd = np.sqrt(np.diag(self.covariance))
        pos = sd > 0
        if np.any(pos):
            denom = np.outer(sd[pos], sd[pos])
            implied = self.covariance[np.ix_(pos, pos)] / denom
            if np.max(np.abs(implied - self.correlation[np.ix_(pos, pos)])) > 1e-9:
                raise ValueError("correlation disagrees with covariance")
        if self.n_periods < 1:
            raise ValueError("n_periods must be positive")

    @property
    def n_assets(self) -> int:
        return len(self.asset_names)

    @property
    def asset_risks(self) -> np.ndarray:
        """Per-asset return standard deviations."""
        return np.sqrt(np.diag(self.covariance))


def portfolio_return(stats: AssetStats, weights: np.ndarray) -> float:
    """Expected portfolio return, the weighted mean of asset returns."""
    return float(stats.mean_returns @ np.asarray(weights, dtype=float))


def portfolio_risk(stats: AssetStats, weights: np.ndarray) -> float:
    """Portfolio return standard deviation sqrt(w' C w); the quadratic
    form is floored at zero to absorb rounding dust."""
    w = np.asarray(weights, dtype=float)
    return float(np.sqrt(max(w @ stats.covariance @ w, 0.0)))


@dataclass(frozen=True)
class Portfolio:
    """A long-only allocation with its derived return and risk."""

    asset_names: tuple[str, ...]
    weights: np.ndarray
    expected_return: float
    risk: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "asset_names", tuple(self.asset_names))
        object.__setattr__(self, "weights", _frozen_array(self.weights))
        if self.weights.shape != (len(self.asset_names),):
            raise errors.DimensionMismatch(
                f"{len(self.weights)} weights for {len(self.asset_names)} assets"
            )
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")
        if np.any(self.weights < 0):
            idx = int(np.argmin(self.weights))
            raise errors.NegativeWeight(
                f"weight {self.weights[idx]} for "
                f"{self.asset_names[idx]} is negative"
            )
        total = float(np.sum(self.weights))
        if abs(total - 1.0) > _WEIGHT_SUM_TOL:
            raise errors.WeightSumViolation(f"weights sum to {total!r}, not 1")
        if not np.isfinite(self.expected_return):
            raise ValueError("expected_return must be finite")
        if not (np.isfinite(self.risk) and self.risk >= 0):
            raise ValueError("risk must be finite and non-negative")

    @classmethod
    def from_weights(cls, stats: AssetStats, weights) -> "Portfolio":
        """Build a portfolio from weights, deriving return and risk
        from the given statistics."""
        w = np.asarray(weights, dtype=float)
        if w.shape != (stats.n_assets,):
            raise errors.DimensionMismatch(
                f"{w.shape} weights for {stats.n_assets} assets"
            )
        return cls(
            asset_names=stats.asset_names,
            weights=w,
            expected_return=portfolio_return(stats, w),
            risk=portfolio_risk(stats, w),
        )


def validate_portfolio(portfolio: Portfolio, stats: AssetStats) -> None:
    """Check a portfolio against the statistics it claims to derive from.

    Raises :class:`~derfolio.errors.NegativeWeight`,
    :class:`~derfolio.errors.WeightSumViolation`, or
    :class:`~derfolio.errors.StaleDerivedValues` when the stored expected
    return or risk disagrees with recomputation beyond 1e-9. Asset names
    must match in order.
    """
    if portfolio.asset_names != stats.asset_names:
        raise errors.DimensionMismatch(
            "portfolio asset names do not match statistics"
        )
    w = portfolio.weights
    if np.any(w < 0):
        raise errors.NegativeWeight("portfolio holds a negative weight")
    total = float(np.sum(w))
    if abs(total - 1.0) > _WEIGHT_SUM_TOL:
        raise errors.WeightSumViolation(f"weights sum to {total!r}, not 1")
    expected = portfolio_return(stats, w)
    risk = portfolio_risk(stats, w)
    if abs(expected - portfolio.expected_return) > _RECOMPUTE_TOL:
        raise errors.StaleDerivedValues(
            f"stored expected_return {portfolio.expected_return!r} vs "
            f"recomputed {expected!r}"
        )
    if abs(risk - portfolio.risk) > _RECOMPUTE_TOL:
        raise errors.StaleDerivedValues(
            f"stored risk {portfolio.risk!r} vs recomputed {risk!r}"
        )


@dataclass(frozen=True)
class FrontierPoint:
    """One point of an efficient frontier.

    ``feasible`` is false when the target return is unachievable under
    the long-only budget constraint, in which case ``portfolio`` is
    None.
    """

    target_return: float
    portfolio: Portfolio | None
    feasible: bool

    def __post_init__(self) -> None:
        if self.feasible:
            if self.portfolio is None:
                raise ValueError("feasible point must carry a portfolio")
            gap = abs(self.portfolio.expected_return - self.target_return)
            if gap > _TARGET_MATCH_TOL:
                raise ValueError(
                    f"portfolio return misses target by {gap!r}"
                )

    @property
    def risk(self) -> float:
        if self.portfolio is None:
            raise ValueError("infeasible frontier point has no risk")
        return self.portfolio.risk


@dataclass(frozen=True)
class Scenario:
    """A named bundle of series for one location/time-range, with the
    derived statistics and frontier attached as they are computed."""

    name: str
    raw: tuple[RawSeries, ...] | None = None
    returns: tuple[ReturnSeries, ...] | None = None
    stats: AssetStats | None = None
    frontier: tuple[FrontierPoint, ...] | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("scenario name must be non-empty")
        if self.raw is not None:
            object.__setattr__(self, "raw", tuple(self.raw))
        if self.frontier is not None:
            object.__setattr__(self, "frontier", tuple(self.frontier))
        if self.returns is not None:
            object.__setattr__(self, "returns", tuple(self.returns))
            first = self.returns[0].periods
            for series in self.returns[1:]:
                if series.periods != first:
                    raise ValueError(
                        f"{self.name}: return series are not aligned"
                    )

    @property
    def asset_names(self) -> tuple[str, ...]:
        if self.returns is not None:
            return tuple(s.asset_name for s in self.returns)
        if self.raw is not None:
            return tuple(s.asset_name for s in self.raw)
        return ()
