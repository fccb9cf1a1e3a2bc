"""Shared builders for the test suite."""

from __future__ import annotations

import numpy as np

from derfolio import AssetStats, RawSeries, ReturnSeries

#: Correlation matrix realized exactly by the bundled riverton_2021
#: scenario (assets solar, wind, biodiesel).
RHO_FIXTURE = np.array([
    [1.0, 0.11001482, 0.46258328],
    [0.11001482, 1.0, -0.2612327],
    [0.46258328, -0.2612327, 1.0],
])


def monthly_labels(year: int, month: int, count: int) -> tuple[str, ...]:
    labels = []
    for _ in range(count):
        labels.append(f"{year:04d}-{month:02d}")
        month += 1
        if month > 12:
            month, year = 1, year + 1
    return tuple(labels)


def stats_from(mu, cov, n_periods: int = 12) -> AssetStats:
    """AssetStats from mean vector and positive-definite covariance."""
    mu = np.asarray(mu, dtype=float)
    cov = np.asarray(cov, dtype=float)
    cov = (cov + cov.T) / 2.0
    sd = np.sqrt(np.diag(cov))
    corr = cov / np.outer(sd, sd)
    np.clip(corr, -1.0, 1.0, out=corr)
    corr = (corr + corr.T) / 2.0
    np.fill_diagonal(corr, 1.0)
    names = tuple(f"a{i}" for i in range(len(mu)))
    return AssetStats(asset_names=names, mean_returns=mu, covariance=cov,
                      correlation=corr, n_periods=n_periods)


def random_instance(rng: np.random.Generator, n: int) -> AssetStats:
    """Random well-conditioned instance: cov = A'A + 0.01 I with A
    uniform in [-1, 1], means uniform in [0, 0.05]."""
    a = rng.uniform(-1.0, 1.0, (n, n))
    cov = a.T @ a + 0.01 * np.eye(n)
    mu = rng.uniform(0.0, 0.05, n)
    return stats_from(mu, cov)


def exact_moment_returns(rng: np.random.Generator, rho: np.ndarray,
                         means, stds, n_obs: int = 12) -> np.ndarray:
    """Return matrix (n_obs x k) whose sample correlation equals rho up
    to float rounding: orthonormalize a demeaned random basis, scale to
    unit sample variance, mix by the symmetric square root of rho, then
    shift/scale columns."""
    k = rho.shape[0]
    raw = rng.standard_normal((n_obs, k))
    raw -= raw.mean(axis=0)
    q, r = np.linalg.qr(raw)
    assert np.min(np.abs(np.diag(r))) > 1e-10
    white = q * np.sqrt(n_obs - 1)
    evals, evecs = np.linalg.eigh(rho)
    assert np.min(evals) > 0
    sqrt_rho = evecs @ np.diag(np.sqrt(evals)) @ evecs.T
    return np.asarray(means) + (white @ sqrt_rho) * np.asarray(stds)


def return_series_from_matrix(matrix: np.ndarray, names=None,
                              start=(2021, 1)) -> list[ReturnSeries]:
    """One ReturnSeries per column of an (n_obs x k) return matrix."""
    n_obs, k = matrix.shape
    if names is None:
        names = [f"a{i}" for i in range(k)]
    periods = monthly_labels(start[0], start[1], n_obs)
    return [
        ReturnSeries(asset_name=names[i], periods=periods,
                     values=matrix[:, i])
        for i in range(k)
    ]


def raw_series_from_returns(returns: np.ndarray, name: str, start_value: float,
                            periods) -> RawSeries:
    """Compound per-period returns into a raw observation series."""
    values = [start_value]
    for r in returns:
        values.append(values[-1] * (1.0 + float(r)))
    return RawSeries(asset_name=name, unit="", periods=tuple(periods),
                     values=values)
