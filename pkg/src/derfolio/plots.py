"""Deterministic SVG charts for frontier and comparison reports.

Figures are built directly (no pyplot) so no global backend state is
touched, and they are saved with a fixed hash salt, text kept as text,
and no embedded creation date, which makes the SVG output byte-stable
across runs and processes. The canvas is 800x600 SVG units.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib
from matplotlib.figure import Figure
from matplotlib.ticker import MaxNLocator, PercentFormatter

from . import errors

# the SVG backend renders at 72 units per inch
_FIG_SIZE = (800 / 72, 600 / 72)
_SVG_RC = {"svg.hashsalt": "derfolio", "svg.fonttype": "none"}

_MVP_MARKER = "s"
_SHARPE_MARKER = "^"


def _new_axes() -> tuple[Figure, object]:
    fig = Figure(figsize=_FIG_SIZE)
    ax = fig.add_subplot()
    ax.xaxis.set_major_locator(MaxNLocator(nbins=10))
    ax.yaxis.set_major_locator(MaxNLocator(nbins=10))
    ax.xaxis.set_major_formatter(PercentFormatter(xmax=1.0, decimals=2))
    ax.yaxis.set_major_formatter(PercentFormatter(xmax=1.0, decimals=2))
    ax.grid(True, linewidth=0.4, alpha=0.5)
    return fig, ax


def _axis_labels(ax, annualize: float | None) -> None:
    basis = "annualized" if annualize else "per period"
    ax.set_xlabel(f"Risk (standard deviation, {basis})")
    ax.set_ylabel(f"Expected return ({basis})")


def frontier_figure(name: str, n_periods: int,
                    risks: Sequence[float], returns: Sequence[float],
                    mvp_point: tuple[float, float],
                    sharpe_point: tuple[float, float],
                    annualize: float | None = None) -> Figure:
    """Efficient-frontier chart for one scenario: the frontier polyline
    with the minimum-variance and maximum-Sharpe portfolios marked."""
    fig, ax = _new_axes()
    ax.plot(risks, returns, marker=".", markersize=4, linewidth=1.5,
            label="efficient frontier", zorder=2)
    ax.plot([mvp_point[0]], [mvp_point[1]], _MVP_MARKER, markersize=9,
            color="tab:red", label="minimum variance", zorder=3)
    ax.plot([sharpe_point[0]], [sharpe_point[1]], _SHARPE_MARKER,
            markersize=10, color="tab:green", label="maximum Sharpe",
            zorder=3)
    _axis_labels(ax, annualize)
    subtitle = f"{n_periods} return periods"
    if annualize:
        subtitle += f", annualized with factor {annualize:g}"
    ax.set_title(f"Efficient frontier: {name}\n{subtitle}")
    ax.legend(loc="lower right")
    fig.tight_layout()
    return fig


def comparison_figure(entries: Sequence[dict],
                      annualize: float | None = None) -> Figure:
    """Overlay chart for several scenarios.

    Each entry is a dict with keys name, n_periods, risks, returns,
    mvp_point, sharpe_point. Legend order follows input order.
    """
    fig, ax = _new_axes()
    for i, entry in enumerate(entries):
        color = f"C{i % 10}"
        ax.plot(entry["risks"], entry["returns"], color=color,
                linewidth=1.5,
                label=f"{entry['name']} (n={entry['n_periods']})", zorder=2)
        ax.plot([entry["mvp_point"][0]], [entry["mvp_point"][1]],
                _MVP_MARKER, color=color, markersize=8, zorder=3)
        ax.plot([entry["sharpe_point"][0]], [entry["sharpe_point"][1]],
                _SHARPE_MARKER, color=color, markersize=9, zorder=3)
    ax.plot([], [], _MVP_MARKER, color="black", markersize=8,
            label="minimum variance")
    ax.plot([], [], _SHARPE_MARKER, color="black", markersize=9,
            label="maximum Sharpe")
    _axis_labels(ax, annualize)
    subtitle = "scenario frontiers overlaid"
    if annualize:
        subtitle += f", annualized with factor {annualize:g}"
    ax.set_title(f"Efficient frontier comparison\n{subtitle}")
    ax.legend(loc="lower right")
    fig.tight_layout()
    return fig


def save_svg(fig: Figure, path) -> None:
    """Write a figure as byte-stable SVG."""
    with matplotlib.rc_context(_SVG_RC):
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise errors.WriteFailure(f"cannot write {path}: {exc}") from exc
