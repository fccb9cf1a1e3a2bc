"""Long-only mean-variance optimization.

Exact solutions come from active-set enumeration: every nonempty asset
subset yields an equality-constrained quadratic subproblem (budget
constraint, plus a target-return constraint when requested) solved via
its bordered linear system. Candidates whose weights are non-negative
are ranked by variance on the true covariance, and the best candidate
over all subsets is the global optimum. Cost is O(2^n) small linear
solves, which is fine for the asset counts this package supports.

A brute-force simplex-lattice search over the same objectives is
provided as an independent cross-check oracle for small n.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import errors
from .core import AssetStats, FrontierPoint, Portfolio

_TIE_TOL = 1e-12
_SINGLETON_TARGET_TOL = 1e-9
_WEIGHT_FLOOR = -1e-11
_CONSTRAINT_TOL = 1e-9
_GOLDEN_TOL = 1e-10
_ORACLE_MAX_ASSETS = 4


@dataclass(frozen=True)
class OptimizerConfig:
    """Tunables shared by the solver entry points.

    risk_free feeds Sharpe ratios; n_frontier_points sets the sweep
    density; ridge_epsilon scales the diagonal loading used to retry a
    singular solve; grid_step is the oracle's lattice spacing.
    long_only is reserved: only True is supported.
    """

    risk_free: float = 0.0
    n_frontier_points: int = 50
    ridge_epsilon: float = 1e-10
    grid_step: float = 0.01
    long_only: bool = True

    def __post_init__(self) -> None:
        if not np.isfinite(self.risk_free):
            raise ValueError("risk_free must be finite")
        if self.n_frontier_points < 2:
            raise ValueError("n_frontier_points must be at least 2")
        if not (np.isfinite(self.ridge_epsilon) and self.ridge_epsilon >= 0):
            raise ValueError("ridge_epsilon must be non-negative")
        if not (0 < self.grid_step <= 0.5):
            raise ValueError("grid_step must lie in (0, 0.5]")
        if not self.long_only:
            raise ValueError("short selling is not supported")


def _solve_bordered(cov_ss: np.ndarray, constraints: np.ndarray,
                    rhs: np.ndarray) -> np.ndarray | None:
    """Solve min w' cov_ss w subject to constraints @ w = rhs via the
    KKT system. Returns the weight block, or None when the system is
    singular or the solution fails to satisfy the constraints."""
    m = cov_ss.shape[0]
    k = constraints.shape[0]
    system = np.zeros((m + k, m + k))
    system[:m, :m] = 2.0 * cov_ss
    system[:m, m:] = constraints.T
    system[m:, :m] = constraints
    vec = np.zeros(m + k)
    vec[m:] = rhs
    try:
        sol = np.linalg.solve(system, vec)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(sol)):
        return None
    w = sol[:m]
    scale = max(1.0, float(np.max(np.abs(rhs))))
    if np.max(np.abs(constraints @ w - rhs)) > _CONSTRAINT_TOL * scale:
        # backward-stable solve of a near-singular system: the huge
        # solution no longer satisfies the constraints
        return None
    return w


def _subset_solution(cov: np.ndarray, mu: np.ndarray, idx: tuple[int, ...],
                     target: float | None, ridged: dict,
                     cfg: OptimizerConfig) -> np.ndarray | None:
    """Optimal weights restricted to the assets in idx, or None when
    this subset cannot satisfy the constraints."""
    m = len(idx)
    if m == 1:
        if target is not None and abs(mu[idx[0]] - target) > _SINGLETON_TARGET_TOL:
            return None
        return np.ones(1)
    mu_s = mu[list(idx)]
    use_target = target is not None
    if use_target and float(np.ptp(mu_s)) <= 1e-12:
        # constant means make the target row dependent on the budget row
        if abs(target - float(mu_s[0])) > _SINGLETON_TARGET_TOL:
            return None
        use_target = False
    if use_target:
        constraints = np.vstack([np.ones(m), mu_s])
        rhs = np.array([1.0, target])
    else:
        constraints = np.ones((1, m))
        rhs = np.array([1.0])
    cov_ss = cov[np.ix_(idx, idx)]
    w = _solve_bordered(cov_ss, constraints, rhs)
    if w is None:
        if "cov" not in ridged:
            load = cfg.ridge_epsilon * float(np.mean(np.diag(cov)))
            ridged["cov"] = cov + load * np.eye(len(mu))
        cov_ss = ridged["cov"][np.ix_(idx, idx)]
        w = _solve_bordered(cov_ss, constraints, rhs)
        if w is None:
            raise errors.SingularAfterRidge(
                f"bordered system for assets {idx} is singular even after "
                "diagonal loading"
            )
    return w


def _enumerate_optimum(cov: np.ndarray, mu: np.ndarray, cfg: OptimizerConfig,
                       target: float | None = None
                       ) -> tuple[np.ndarray, float] | None:
    """Best long-only weights over all asset subsets, with the achieved
    variance, or None when no subset is feasible."""
    n = len(mu)
    ridged: dict = {}
    best_var = math.inf
    best_w: np.ndarray | None = None
    for mask in range(1, 1 << n):
        idx = tuple(i for i in range(n) if mask >> i & 1)
        w_s = _subset_solution(cov, mu, idx, target, ridged, cfg)
        if w_s is None or float(np.min(w_s)) < _WEIGHT_FLOOR:
            continue
        w = np.zeros(n)
        w[list(idx)] = np.clip(w_s, 0.0, None)
        w /= w.sum()
        var = float(w @ cov @ w)
        if best_w is None or var < best_var - _TIE_TOL:
            best_var, best_w = var, w
        elif var <= best_var + _TIE_TOL:
            best_var = min(best_var, var)
            if tuple(w) < tuple(best_w):
                best_w = w
    if best_w is None:
        return None
    return best_w, max(best_var, 0.0)


def min_variance(stats: AssetStats, cfg: OptimizerConfig) -> Portfolio:
    """Long-only portfolio of minimal variance."""
    result = _enumerate_optimum(stats.covariance, stats.mean_returns, cfg)
    assert result is not None  # budget-only problem always has a solution
    return Portfolio.from_weights(stats, result[0])


def min_variance_at_target(stats: AssetStats, target: float,
                           cfg: OptimizerConfig) -> FrontierPoint:
    """Minimal-variance long-only portfolio with expected return pinned
    to target. Targets outside the achievable return range yield an
    infeasible point instead of an error."""
    mu = stats.mean_returns
    if target < float(np.min(mu)) or target > float(np.max(mu)):
        return FrontierPoint(target_return=float(target), portfolio=None,
                             feasible=False)
    result = _enumerate_optimum(stats.covariance, mu, cfg, target=float(target))
    if result is None:
        return FrontierPoint(target_return=float(target), portfolio=None,
                             feasible=False)
    return FrontierPoint(
        target_return=float(target),
        portfolio=Portfolio.from_weights(stats, result[0]),
        feasible=True,
    )


def sweep_frontier(stats: AssetStats, cfg: OptimizerConfig) -> list[FrontierPoint]:
    """Efficient frontier from the minimum-variance return up to the
    highest single-asset mean, at cfg.n_frontier_points even targets."""
    mvp = min_variance(stats, cfg)
    r_max = float(np.max(stats.mean_returns))
    targets = np.linspace(mvp.expected_return, r_max, cfg.n_frontier_points)
    return [min_variance_at_target(stats, float(t), cfg) for t in targets]


def _golden_section_max(fn, lo: float, hi: float, tol: float) -> float:
    """Argmax of a unimodal function on [lo, hi] to within tol."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    return (a + b) / 2.0


def _tangency_candidates(cov: np.ndarray, mu: np.ndarray, risk_free: float):
    """Yield the Sharpe-stationary long-only portfolio of every asset
    support: weights proportional to inv(cov_SS) @ (mu_S - risk_free).
    Supports whose stationary point is infeasible (negative weights,
    non-positive normalizer, singular block) are skipped."""
    n = len(mu)
    excess = mu - risk_free
    scale = max(1.0, float(np.max(np.abs(excess))))
    for mask in range(1, 1 << n):
        idx = [i for i in range(n) if mask >> i & 1]
        if len(idx) == 1:
            w = np.zeros(n)
            w[idx[0]] = 1.0
            yield w
            continue
        cov_ss = cov[np.ix_(idx, idx)]
        e_s = excess[idx]
        try:
            y = np.linalg.solve(cov_ss, e_s)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(y)):
            continue
        if np.max(np.abs(cov_ss @ y - e_s)) > _CONSTRAINT_TOL * scale:
            continue
        denom = float(y.sum())
        if denom <= 0.0:
            continue
        w_s = y / denom
        if float(np.min(w_s)) < _WEIGHT_FLOOR:
            continue
        w = np.zeros(n)
        w[idx] = np.clip(w_s, 0.0, None)
        w /= w.sum()
        yield w


def max_sharpe(stats: AssetStats, cfg: OptimizerConfig) -> Portfolio:
    """Long-only portfolio maximizing (E[r] - risk_free) / risk.

    The Sharpe ratio is unimodal in target return along the efficient
    frontier, so a dense sweep of targets refined with golden-section
    search localizes the maximizer. The returned weights come from the
    exact stationary portfolio on each asset support (the optimum is
    the tangency portfolio of its own support), which pins the answer
    to machine precision instead of the sweep's step size.
    """
    mu = stats.mean_returns
    cov = stats.covariance
    if float(np.max(mu)) <= cfg.risk_free:
        raise errors.NoExcessReturn(
            f"no asset mean exceeds the risk-free return {cfg.risk_free!r}"
        )
    variances = np.diag(cov)
    if np.any(variances == 0):
        idx = int(np.argmin(variances))
        raise errors.ZeroRisk(
            f"asset {stats.asset_names[idx]!r} has zero variance; its "
            "Sharpe ratio is unbounded"
        )

    def evaluate(target: float) -> tuple[float, np.ndarray]:
        result = _enumerate_optimum(cov, mu, cfg, target=target)
        assert result is not None  # targets stay inside the mean range
        w, var = result
        excess = float(mu @ w) - cfg.risk_free
        risk = math.sqrt(var)
        if risk <= 0.0:
            if excess > 0.0:
                raise errors.ZeroRisk(
                    "riskless portfolio with positive excess return has "
                    "unbounded Sharpe ratio"
                )
            return -math.inf, w
        return excess / risk, w

    mvp_result = _enumerate_optimum(cov, mu, cfg)
    assert mvp_result is not None
    mvp_w, mvp_var = mvp_result
    lo = float(mu @ mvp_w)
    hi = float(np.max(mu))
    if hi - lo <= 0.0:
        risk = math.sqrt(mvp_var)
        if risk <= 0.0:
            raise errors.ZeroRisk(
                "riskless portfolio with positive excess return has "
                "unbounded Sharpe ratio"
            )
        return Portfolio.from_weights(stats, mvp_w)

    targets = np.linspace(lo, hi, cfg.n_frontier_points)
    scored = [evaluate(float(t)) for t in targets]
    best_i = max(range(len(scored)), key=lambda i: scored[i][0])
    bracket_lo = float(targets[max(best_i - 1, 0)])
    bracket_hi = float(targets[min(best_i + 1, len(targets) - 1)])
    refined_t = _golden_section_max(lambda t: evaluate(t)[0],
                                    bracket_lo, bracket_hi, _GOLDEN_TOL)
    candidates = [scored[best_i], evaluate(refined_t)]
    scan_sharpe, scan_w = max(candidates, key=lambda pair: pair[0])

    best_sharpe = -math.inf
    best_w: np.ndarray | None = None
    for w in _tangency_candidates(cov, mu, cfg.risk_free):
        excess = float(mu @ w) - cfg.risk_free
        risk = math.sqrt(max(float(w @ cov @ w), 0.0))
        if risk <= 0.0:
            if excess > 0.0:
                raise errors.ZeroRisk(
                    "riskless portfolio with positive excess return has "
                    "unbounded Sharpe ratio"
                )
            continue
        sharpe = excess / risk
        if best_w is None or sharpe > best_sharpe + _TIE_TOL:
            best_sharpe, best_w = sharpe, w
        elif sharpe >= best_sharpe - _TIE_TOL:
            best_sharpe = max(best_sharpe, sharpe)
            if tuple(w) < tuple(best_w):
                best_w = w
    if best_w is None or scan_sharpe > best_sharpe + 1e-9:
        # every support was numerically degenerate; the sweep's best
        # point is still a valid long-only portfolio
        return Portfolio.from_weights(stats, scan_w)
    return Portfolio.from_weights(stats, best_w)


@lru_cache(maxsize=8)
def _simplex_lattice(n: int, k: int) -> np.ndarray:
    """All length-n tuples of non-negative integers summing to k, as an
    integer array (stars-and-bars enumeration)."""
    if n == 1:
        counts = np.array([[k]], dtype=np.int64)
    else:
        bars = np.fromiter(
            itertools.chain.from_iterable(
                itertools.combinations(range(k + n - 1), n - 1)
            ),
            dtype=np.int64,
        ).reshape(-1, n - 1)
        padded = np.hstack(
            [
                np.full((len(bars), 1), -1, dtype=np.int64),
                bars,
                np.full((len(bars), 1), k + n - 1, dtype=np.int64),
            ]
        )
        counts = np.diff(padded, axis=1) - 1
    counts.setflags(write=False)
    return counts


def oracle_grid_search(stats: AssetStats, cfg: OptimizerConfig,
                       objective: str = "min_variance", *,
                       target: float | None = None,
                       band: float | None = None) -> Portfolio:
    """Brute-force reference optimizer over the simplex lattice.

    Enumerates every weight vector whose components are non-negative
    multiples of cfg.grid_step summing to one, evaluates the requested
    objective ("min_variance", "max_sharpe", or "min_variance_at_target"
    with a return band of +/- band, defaulting to grid_step/2), and
    returns the best lattice portfolio, breaking ties toward the
    lexicographically smallest weight vector. Intended as an independent
    cross-check; cost grows combinatorially, hence the small asset cap.
    """
    n = stats.n_assets
    if n > _ORACLE_MAX_ASSETS:
        raise errors.TooManyAssets(
            f"oracle supports at most {_ORACLE_MAX_ASSETS} assets, got {n}"
        )
    k = round(1.0 / cfg.grid_step)
    if abs(k * cfg.grid_step - 1.0) > 1e-9:
        raise ValueError(
            f"grid_step {cfg.grid_step!r} must divide 1 evenly"
        )
    weights = _simplex_lattice(n, k) / k
    returns = weights @ stats.mean_returns
    variances = np.einsum("ij,ij->i", weights @ stats.covariance, weights)
    np.clip(variances, 0.0, None, out=variances)

    if objective == "min_variance":
        scores = variances
        pick_min = True
    elif objective == "max_sharpe":
        risks = np.sqrt(variances)
        excess = returns - cfg.risk_free
        with np.errstate(divide="ignore", invalid="ignore"):
            scores = np.where(risks > 0, excess / risks, -np.inf)
        if np.any((risks == 0) & (excess > 0)):
            raise errors.ZeroRisk(
                "lattice contains a riskless portfolio with positive excess"
            )
        pick_min = False
    elif objective == "min_variance_at_target":
        if target is None:
            raise ValueError("target objective requires a target return")
        half_band = cfg.grid_step / 2.0 if band is None else band
        in_band = np.abs(returns - target) <= half_band
        if not np.any(in_band):
            raise ValueError(
                f"no lattice portfolio within {half_band!r} of target {target!r}"
            )
        scores = np.where(in_band, variances, np.inf)
        pick_min = True
    else:
        raise ValueError(f"unknown objective {objective!r}")

    best = float(np.min(scores)) if pick_min else float(np.max(scores))
    if pick_min:
        tied = np.flatnonzero(scores <= best + _TIE_TOL)
    else:
        tied = np.flatnonzero(scores >= best - _TIE_TOL)
    rows = weights[tied]
    order = np.lexsort(rows.T[::-1])
    return Portfolio.from_weights(stats, rows[order[0]])
