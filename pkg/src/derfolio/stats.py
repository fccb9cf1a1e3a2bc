"""Return computation and statistics estimation.

Raw observation series become per-period relative returns, multiple
return series are aligned on their common periods, and aligned returns
yield sample means, covariance, and correlation.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import errors
from .core import AssetStats, RawSeries, ReturnSeries

#: Units treated as speeds for the cube transform's sanity check.
_SPEED_UNITS = frozenset({"m/s", "mps", "km/h", "kph", "mph", "knots", "kt"})

_TRANSFORMS = ("identity", "cube")


def to_returns(raw: RawSeries, transform: str = "identity") -> ReturnSeries:
    """Convert raw observations to per-period relative returns.

    ``transform`` is applied to each observation before differencing:
    ``identity`` leaves values as-is, ``cube`` raises them to the third
    power (extractable wind power scales with the cube of speed, so
    cubing a speed series makes it track energy). The return
    for period t is (x_t - x_{t-1}) / x_{t-1}, labelled with period t.

    Raises ZeroBaseline when any observation that serves as a
    denominator is zero, and also when the final observation is zero,
    since that would imply a -100% return which downstream estimators
    reject.
    """
    if transform not in _TRANSFORMS:
        raise ValueError(
            f"unknown transform {transform!r}; expected one of {_TRANSFORMS}"
        )
    values = np.asarray(raw.values, dtype=float)
    if transform == "cube":
        if raw.unit and raw.unit not in _SPEED_UNITS:
            raise errors.DataError(
                f"{raw.asset_name}: cube transform expects a speed unit, "
                f"got {raw.unit!r}"
            )
        values = values ** 3
    if len(values) < 2:
        raise errors.TooShort(
            f"{raw.asset_name}: need at least 2 observations to form returns"
        )
    zero = np.flatnonzero(values == 0.0)
    if zero.size:
        idx = int(zero[0])
        if idx < len(values) - 1:
            raise errors.ZeroBaseline(
                f"{raw.asset_name}: zero observation at {raw.periods[idx]} "
                "cannot serve as a return baseline"
            )
        raise errors.ZeroBaseline(
            f"{raw.asset_name}: zero observation at {raw.periods[idx]} "
            "would imply a -100% return"
        )
    rets = np.diff(values) / values[:-1]
    return ReturnSeries(
        asset_name=raw.asset_name,
        periods=raw.periods[1:],
        values=rets,
    )


def align(series: Sequence[ReturnSeries]) -> tuple[ReturnSeries, ...]:
    """Restrict return series to their common periods, in chronological
    order. Input order of the series is preserved.

    Raises NoOverlap when fewer than two common periods remain; a lone
    common period could not support a covariance estimate.
    """
    if not series:
        raise ValueError("no series to align")
    names = [s.asset_name for s in series]
    if len(set(names)) != len(names):
        raise errors.DuplicateAsset(f"duplicate asset names in {names}")
    common = set(series[0].periods)
    for s in series[1:]:
        common &= set(s.periods)
    if len(common) < 2:
        raise errors.NoOverlap(
            f"series share only {len(common)} period(s); need at least 2"
        )
    aligned = []
    for s in series:
        keep = [i for i, p in enumerate(s.periods) if p in common]
        aligned.append(
            ReturnSeries(
                asset_name=s.asset_name,
                periods=tuple(s.periods[i] for i in keep),
                values=s.values[keep],
            )
        )
    return tuple(aligned)


def estimate_stats(series: Sequence[ReturnSeries]) -> AssetStats:
    """Estimate mean returns, covariance, and correlation from aligned
    return series.

    Covariance uses the n-1 divisor. Correlation entries involving a
    zero-variance asset are 0 off the diagonal and 1 on it.
    """
    if not series:
        raise ValueError("no series to estimate from")
    periods = series[0].periods
    for s in series[1:]:
        if s.periods != periods:
            raise ValueError(
                f"{s.asset_name} is not aligned; call align() first"
            )
    n_periods = len(periods)
    if n_periods < 2:
        raise errors.InsufficientData(
            f"need at least 2 return observations, got {n_periods}"
        )
    names = tuple(s.asset_name for s in series)
    matrix = np.vstack([s.values for s in series])
    means = matrix.mean(axis=1)
    cov = np.cov(matrix, ddof=1)
    cov = np.atleast_2d(cov)
    cov = (cov + cov.T) / 2.0
    sd = np.sqrt(np.diag(cov))
    corr = np.zeros_like(cov)
    pos = sd > 0
    if np.any(pos):
        denom = np.outer(sd[pos], sd[pos])
        corr[np.ix_(pos, pos)] = cov[np.ix_(pos, pos)] / denom
    np.clip(corr, -1.0, 1.0, out=corr)
    corr = (corr + corr.T) / 2.0
    np.fill_diagonal(corr, 1.0)
    return AssetStats(
        asset_names=names,
        mean_returns=means,
        covariance=cov,
        correlation=corr,
        n_periods=n_periods,
    )


def sharpe_ratio(expected_return: float, risk_free: float, risk: float) -> float:
    """Excess return per unit of risk: (E[r] - r_f) / sigma.

    Raises ZeroRisk when risk is zero or negative, where the ratio is
    undefined.
    """
    if risk <= 0:
        raise errors.ZeroRisk(
            f"sharpe ratio undefined for risk {risk!r}"
        )
    return (expected_return - risk_free) / risk
