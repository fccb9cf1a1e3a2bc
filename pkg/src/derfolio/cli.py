"""Command-line interface.

Subcommands: ingest (normalize downloaded exports into a canonical
scenario file), frontier (efficient frontier for one scenario),
compare (overlay several scenarios), correlate (correlation matrix).

Exit codes: 0 success, 2 input or data error, 3 optimizer failure.
Options may also be given in a config file of key=value lines (same
keys as the long flag names, without the leading dashes); flags
override the config file. No environment variables are consulted.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import errors, plots, report
from .ingest import import_column_export, merge_to_canonical, parse_canonical
from .optimizer import OptimizerConfig
from .report import (ComparisonReport, analyze_scenario, comparison_csv_text,
                     comparison_json_dict, comparison_text_table,
                     correlation_json_dict, correlation_text, figure_entry,
                     frontier_csv_text, frontier_json_dict, json_text,
                     prepare_scenario)

#: Above this many assets the exact solver's 2^n subset enumeration
#: gets noticeably slow, so the CLI warns (it still runs, up to 32).
_WARN_ASSETS = 16

_CONFIG_KEYS = {
    "input", "points", "risk-free", "annualize", "transform", "out-csv",
    "out-svg", "out-json", "scenario", "source", "out", "name",
}

_TRANSFORM_KINDS = ("identity", "cube")


def _load_config(path: str) -> dict[str, list[str]]:
    """key=value lines; repeated keys accumulate; '#' comments and
    blank lines are skipped."""
    config: dict[str, list[str]] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise errors.EncodingError(f"{path}: not valid UTF-8: {exc}")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise errors.DataError(
                f"{path}:{lineno}: expected key=value, got {stripped!r}"
            )
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise errors.DataError(
                f"{path}:{lineno}: unknown config key {key!r}"
            )
        config.setdefault(key, []).append(value.strip())
    return config


class _Options:
    """Flag values merged over config-file values."""

    def __init__(self, args: argparse.Namespace) -> None:
        self.args = args
        self.config: dict[str, list[str]] = {}
        if getattr(args, "config", None):
            self.config = _load_config(args.config)

    def scalar(self, key: str) -> str | None:
        flag = getattr(self.args, key.replace("-", "_"), None)
        if flag is not None:
            return flag
        values = self.config.get(key)
        return values[-1] if values else None

    def repeated(self, key: str) -> list[str]:
        flag = getattr(self.args, key.replace("-", "_"), None)
        if flag:
            return list(flag)
        return list(self.config.get(key, []))

    def number(self, key: str, convert, default=None):
        raw = self.scalar(key)
        if raw is None:
            return default
        try:
            return convert(raw)
        except ValueError:
            raise errors.DataError(
                f"invalid value for {key}: {raw!r}"
            ) from None


def _parse_transforms(pairs: list[str]) -> dict[str, str]:
    transforms: dict[str, str] = {}
    for pair in pairs:
        asset, sep, kind = pair.partition("=")
        if not sep or not asset or not kind:
            raise errors.DataError(
                f"--transform expects asset=kind, got {pair!r}"
            )
        if kind not in _TRANSFORM_KINDS:
            raise errors.DataError(
                f"unknown transform {kind!r} for asset {asset!r}; "
                f"expected one of {_TRANSFORM_KINDS}"
            )
        if asset in transforms:
            raise errors.DataError(f"transform for {asset!r} given twice")
        transforms[asset] = kind
    return transforms


def _optimizer_config(opts: _Options) -> OptimizerConfig:
    points = opts.number("points", int, 50)
    risk_free = opts.number("risk-free", float, 0.0)
    if points < 2:
        raise errors.DataError(f"--points must be at least 2, got {points}")
    return OptimizerConfig(risk_free=risk_free, n_frontier_points=points)


def _annualize(opts: _Options) -> float | None:
    factor = opts.number("annualize", float)
    if factor is None:
        return None
    if not factor > 0:
        raise errors.DataError(
            f"--annualize must be positive, got {factor!r}"
        )
    return factor


def _warn_if_large(n_assets: int, name: str) -> None:
    if n_assets > _WARN_ASSETS:
        print(
            f"warning: scenario {name!r} has {n_assets} assets; the exact "
            "solver enumerates asset subsets and will be slow",
            file=sys.stderr,
        )


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise errors.WriteFailure(f"cannot write {path}: {exc}") from exc


def _parse_source_spec(spec: str) -> dict[str, str]:
    fields: dict[str, str] = {}
    for item in spec.split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise errors.DataError(
                f"--source expects comma-separated key=value pairs, "
                f"got {item!r} in {spec!r}"
            )
        if key in fields:
            raise errors.DataError(f"--source key {key!r} given twice")
        fields[key] = value.strip()
    allowed = {"path", "kind", "asset", "period", "value", "year", "months",
               "unit"}
    unknown = set(fields) - allowed
    if unknown:
        raise errors.DataError(
            f"unknown --source key(s) {sorted(unknown)}; allowed: "
            f"{sorted(allowed)}"
        )
    for required in ("path", "kind", "asset"):
        if required not in fields:
            raise errors.DataError(
                f"--source spec {spec!r} is missing {required!r}"
            )
    return fields


def _import_from_spec(fields: dict[str, str]):
    kind = fields["kind"]
    if kind not in ("generic-long", "generic-wide"):
        raise errors.DataError(
            f"unknown source kind {kind!r}; expected 'generic-long' or "
            "'generic-wide'"
        )
    if kind == "generic-long":
        for required in ("period", "value"):
            if required not in fields:
                raise errors.DataError(
                    f"generic-long source needs {required!r}"
                )
        return import_column_export(
            fields["path"], kind, fields["asset"],
            period_column=fields["period"], value_column=fields["value"],
            unit=fields.get("unit", ""),
        )
    if "year" not in fields:
        raise errors.DataError("generic-wide source needs 'year'")
    months = fields.get("months")
    return import_column_export(
        fields["path"], kind, fields["asset"],
        year_column=fields["year"],
        month_columns=months.split("|") if months else None,
        unit=fields.get("unit", ""),
    )


def cmd_ingest(args: argparse.Namespace) -> int:
    opts = _Options(args)
    specs = opts.repeated("source")
    if not specs:
        raise errors.DataError("ingest needs at least one --source spec")
    out = opts.scalar("out")
    if out is None:
        raise errors.DataError("ingest needs --out for the canonical file")
    series = [_import_from_spec(_parse_source_spec(spec)) for spec in specs]
    merge_to_canonical(series, out)
    merged = parse_canonical(out)
    assert merged.raw is not None
    n_common = len(merged.raw[0])
    for s in series:
        print(f"{s.asset_name}: {len(s)} observations ({s.granularity})")
    print(f"wrote {out}: {len(series)} assets, {n_common} common periods")
    return 0


def _prepare_from_file(path: str, name: str | None,
                       transforms: dict[str, str]):
    parsed = parse_canonical(path, name=name)
    assert parsed.raw is not None
    present = {s.asset_name for s in parsed.raw}
    applicable = {a: t for a, t in transforms.items() if a in present}
    scenario = prepare_scenario(parsed.name, parsed.raw, applicable)
    assert scenario.stats is not None
    _warn_if_large(scenario.stats.n_assets, scenario.name)
    return scenario


def cmd_frontier(args: argparse.Namespace) -> int:
    opts = _Options(args)
    path = opts.scalar("input")
    if path is None:
        raise errors.DataError("frontier needs --input")
    transforms = _parse_transforms(opts.repeated("transform"))
    parsed = parse_canonical(path, name=opts.scalar("name"))
    assert parsed.raw is not None
    scenario = prepare_scenario(parsed.name, parsed.raw, transforms)
    assert scenario.stats is not None
    _warn_if_large(scenario.stats.n_assets, scenario.name)
    cfg = _optimizer_config(opts)
    annualize = _annualize(opts)
    analysis = analyze_scenario(scenario, cfg)

    r_mul = annualize if annualize else 1.0
    s_mul = r_mul ** 0.5
    print(
        f"scenario {analysis.name}: {scenario.stats.n_assets} assets, "
        f"{scenario.stats.n_periods} return periods"
    )
    print(
        f"minimum variance: return {analysis.mvp.expected_return * r_mul:.4%}, "
        f"risk {analysis.mvp.risk * s_mul:.4%}"
    )
    print(
        f"maximum Sharpe: return "
        f"{analysis.best_sharpe.expected_return * r_mul:.4%}, "
        f"risk {analysis.best_sharpe.risk * s_mul:.4%}, "
        f"sharpe {analysis.sharpe * s_mul:.6f}"
    )

    out_csv = opts.scalar("out-csv")
    if out_csv:
        _write_text(out_csv, frontier_csv_text(analysis, annualize))
        print(f"wrote frontier CSV: {out_csv}")
    out_json = opts.scalar("out-json")
    if out_json:
        _write_text(out_json, json_text(frontier_json_dict(analysis, annualize)))
        print(f"wrote JSON summary: {out_json}")
    out_svg = opts.scalar("out-svg")
    if out_svg:
        entry = figure_entry(analysis, annualize)
        fig = plots.frontier_figure(
            analysis.name, analysis.stats.n_periods, entry["risks"],
            entry["returns"], entry["mvp_point"], entry["sharpe_point"],
            annualize,
        )
        plots.save_svg(fig, out_svg)
        print(f"wrote SVG chart: {out_svg}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    opts = _Options(args)
    specs = opts.repeated("scenario")
    if len(specs) < 2:
        raise errors.DataError(
            "compare needs at least two --scenario name=path entries"
        )
    named: list[tuple[str, str]] = []
    for spec in specs:
        name, sep, path = spec.partition("=")
        if not sep or not name or not path:
            raise errors.DataError(
                f"--scenario expects name=path, got {spec!r}"
            )
        named.append((name, path))
    transforms = _parse_transforms(opts.repeated("transform"))
    cfg = _optimizer_config(opts)
    annualize = _annualize(opts)

    parsed = [parse_canonical(path, name=name) for name, path in named]
    all_assets = {s.asset_name for p in parsed if p.raw for s in p.raw}
    missing = set(transforms) - all_assets
    if missing:
        raise errors.UnknownColumn(
            f"transform names unknown asset(s) {sorted(missing)}"
        )
    analyses = []
    for scenario_in in parsed:
        assert scenario_in.raw is not None
        present = {s.asset_name for s in scenario_in.raw}
        applicable = {a: t for a, t in transforms.items() if a in present}
        scenario = prepare_scenario(scenario_in.name, scenario_in.raw,
                                    applicable)
        assert scenario.stats is not None
        _warn_if_large(scenario.stats.n_assets, scenario.name)
        analyses.append(analyze_scenario(scenario, cfg))
    comparison = ComparisonReport(tuple(analyses))

    print(comparison_text_table(comparison, annualize), end="")
    out_csv = opts.scalar("out-csv")
    if out_csv:
        _write_text(out_csv, comparison_csv_text(comparison, annualize))
        print(f"wrote comparison CSV: {out_csv}")
    out_json = opts.scalar("out-json")
    if out_json:
        _write_text(out_json,
                    json_text(comparison_json_dict(comparison, annualize)))
        print(f"wrote JSON report: {out_json}")
    out_svg = opts.scalar("out-svg")
    if out_svg:
        entries = [figure_entry(a, annualize) for a in comparison.analyses]
        fig = plots.comparison_figure(entries, annualize)
        plots.save_svg(fig, out_svg)
        print(f"wrote SVG chart: {out_svg}")
    return 0


def cmd_correlate(args: argparse.Namespace) -> int:
    opts = _Options(args)
    path = opts.scalar("input")
    if path is None:
        raise errors.DataError("correlate needs --input")
    transforms = _parse_transforms(opts.repeated("transform"))
    scenario = _prepare_from_file(path, opts.scalar("name"), transforms)
    assert scenario.stats is not None
    print(correlation_text(scenario.name, scenario.stats), end="")
    out_json = opts.scalar("out-json")
    if out_json:
        _write_text(
            out_json,
            json_text(correlation_json_dict(scenario.name, scenario.stats)),
        )
        print(f"wrote JSON correlation: {out_json}")
    return 0


def _add_common(sub: argparse.ArgumentParser, *, optimizer: bool) -> None:
    sub.add_argument("--config", help="key=value config file; flags override")
    sub.add_argument("--transform", action="append", default=None,
                     metavar="ASSET=KIND",
                     help="per-asset transform: identity or cube (repeatable)")
    if optimizer:
        sub.add_argument("--points", default=None,
                         help="number of frontier points (default 50)")
        sub.add_argument("--risk-free", default=None,
                         help="per-period risk-free return (default 0)")
        sub.add_argument("--annualize", default=None, metavar="K",
                         help="scale reported returns by K and risks by "
                              "sqrt(K)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="derfolio",
        description="Mean-variance portfolio analytics for energy "
                    "resource series",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    ingest = commands.add_parser(
        "ingest", help="normalize downloaded exports into a canonical "
                       "scenario file")
    ingest.add_argument("--source", action="append", default=None,
                        metavar="SPEC",
                        help="path=FILE,kind=generic-long|generic-wide,"
                             "asset=NAME[,period=COL,value=COL]"
                             "[,year=COL,months=A|B|..][,unit=U] (repeatable)")
    ingest.add_argument("--out", default=None,
                        help="canonical scenario file to write")
    ingest.add_argument("--config", help="key=value config file")
    ingest.set_defaults(func=cmd_ingest)

    frontier = commands.add_parser(
        "frontier", help="efficient frontier for one scenario file")
    frontier.add_argument("--input", "-i", default=None,
                          help="canonical scenario file")
    frontier.add_argument("--name", default=None,
                          help="scenario name (default: file stem)")
    frontier.add_argument("--out-csv", default=None,
                          help="frontier table output path")
    frontier.add_argument("--out-svg", default=None,
                          help="frontier chart output path")
    frontier.add_argument("--out-json", default=None,
                          help="JSON summary output path")
    _add_common(frontier, optimizer=True)
    frontier.set_defaults(func=cmd_frontier)

    compare = commands.add_parser(
        "compare", help="compare the frontiers of several scenarios")
    compare.add_argument("--scenario", action="append", default=None,
                         metavar="NAME=PATH",
                         help="scenario file with display name (repeatable, "
                              "at least two)")
    compare.add_argument("--out-csv", default=None,
                         help="cross-scenario summary table output path")
    compare.add_argument("--out-svg", default=None,
                         help="overlay chart output path")
    compare.add_argument("--out-json", default=None,
                         help="JSON report output path")
    _add_common(compare, optimizer=True)
    compare.set_defaults(func=cmd_compare)

    correlate = commands.add_parser(
        "correlate", help="correlation matrix for one scenario file")
    correlate.add_argument("--input", "-i", default=None,
                           help="canonical scenario file")
    correlate.add_argument("--name", default=None,
                           help="scenario name (default: file stem)")
    correlate.add_argument("--out-json", default=None,
                           help="JSON correlation output path")
    _add_common(correlate, optimizer=False)
    correlate.set_defaults(func=cmd_correlate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except errors.OptimizerError as exc:
        print(f"error: optimization failed: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 3
    except errors.DerfolioError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())
