"""File ingestion: canonical scenario files and generic column exports.

The canonical scenario file is a UTF-8 comma-delimited table. The
header row is ``period`` followed by one asset name per column; each
data row is a period label and one raw observation per asset. Lines
whose first non-blank character is ``#`` are comments. Values are
plain decimal numbers with ``.`` as the decimal point.

Downloaded exports arrive in two generic shapes: ``generic-long``
(one row per period, named period and value columns) and
``generic-wide`` (one row per year, one column per month). Both are
normalized to RawSeries and can then be merged into a canonical file.

All parse errors carry the file name and, where it exists, the line
number of the offending content.
"""

from __future__ import annotations

import csv
import math
import os
from pathlib import Path
from typing import Iterable, Sequence

from . import errors
from .core import MAX_ASSETS, RawSeries, Scenario, parse_period

_MONTH_NUMBERS = {
    "jan": 1, "feb": 2, "mar": 3, "apr": 4, "may": 5, "jun": 6,
    "jul": 7, "aug": 8, "sep": 9, "oct": 10, "nov": 11, "dec": 12,
    "january": 1, "february": 2, "march": 3, "april": 4,
    "june": 6, "july": 7, "august": 8, "september": 9,
    "october": 10, "november": 11, "december": 12,
}


def _read_text(source, display: str) -> str:
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            try:
                data = data.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise errors.EncodingError(f"{display}: not valid UTF-8: {exc}")
        return data
    try:
        return Path(source).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise errors.EncodingError(f"{display}: not valid UTF-8: {exc}")


def _display_name(source, name: str | None = None) -> str:
    if isinstance(source, (str, os.PathLike)):
        return str(source)
    return name or getattr(source, "name", "<stream>")


def _content_rows(text: str, display: str) -> list[tuple[int, list[str]]]:
    """Split text into (line number, cells) rows, skipping blank lines
    and '#' comments."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            cells = next(csv.reader([line]))
        except csv.Error as exc:
            raise errors.MalformedRow(f"{display}:{lineno}: {exc}")
        rows.append((lineno, [c.strip() for c in cells]))
    return rows


def _parse_cell(cell: str, display: str, lineno: int, column: str) -> float:
    if not cell:
        raise errors.NonNumericCell(
            f"{display}:{lineno}: column {column!r} is empty"
        )
    try:
        value = float(cell)
    except ValueError:
        raise errors.NonNumericCell(
            f"{display}:{lineno}: column {column!r} value {cell!r} "
            "is not numeric"
        ) from None
    if not math.isfinite(value):
        raise errors.NonNumericCell(
            f"{display}:{lineno}: column {column!r} value {cell!r} "
            "is not finite"
        )
    return value


def _parse_period_at(label: str, display: str, lineno: int) -> tuple[str, tuple]:
    try:
        return parse_period(label)
    except errors.InvalidPeriod as exc:
        raise errors.InvalidPeriod(f"{display}:{lineno}: {exc}") from None


def parse_canonical(source, name: str | None = None) -> Scenario:
    """Parse a canonical scenario file into a Scenario with raw series
    attached (statistics and frontier unset).

    ``source`` is a path or an open text stream. ``name`` overrides the
    scenario name, which otherwise defaults to the file stem.
    """
    display = _display_name(source, name)
    text = _read_text(source, display)
    rows = _content_rows(text, display)
    if not rows:
        raise errors.MalformedHeader(f"{display}: no header row found")
    header_line, header = rows[0]
    if not header or header[0] != "period":
        raise errors.MalformedHeader(
            f"{display}:{header_line}: header must start with 'period', "
            f"got {header[0] if header else ''!r}"
        )
    asset_names = header[1:]
    if not asset_names:
        raise errors.MalformedHeader(
            f"{display}:{header_line}: header names no asset columns"
        )
    if any(not a for a in asset_names):
        raise errors.MalformedHeader(
            f"{display}:{header_line}: empty asset name in header"
        )
    if len(set(asset_names)) != len(asset_names):
        raise errors.MalformedHeader(
            f"{display}:{header_line}: duplicate asset name in header"
        )
    if len(asset_names) > MAX_ASSETS:
        raise errors.AssetCountExceeded(
            f"{display}:{header_line}: {len(asset_names)} asset columns "
            f"exceeds the supported bound of {MAX_ASSETS}"
        )

    data_rows = rows[1:]
    if len(data_rows) < 2:
        raise errors.TooFewRows(
            f"{display}: need at least 2 data rows, got {len(data_rows)}"
        )

    periods: list[str] = []
    columns: list[list[float]] = [[] for _ in asset_names]
    granularity: str | None = None
    prev_key: tuple | None = None
    seen: set[str] = set()
    for lineno, cells in data_rows:
        if len(cells) != len(header):
            raise errors.MalformedRow(
                f"{display}:{lineno}: expected {len(header)} cells, "
                f"got {len(cells)}"
            )
        label = cells[0]
        gran, key = _parse_period_at(label, display, lineno)
        if granularity is None:
            granularity = gran
        elif gran != granularity:
            raise errors.MixedGranularity(
                f"{display}:{lineno}: period {label!r} is {gran} but the "
                f"file started {granularity}"
            )
        if label in seen:
            raise errors.DuplicatePeriod(
                f"{display}:{lineno}: duplicate period {label!r}"
            )
        if prev_key is not None and key < prev_key:
            raise errors.OutOfOrderPeriods(
                f"{display}:{lineno}: period {label!r} is out of "
                "chronological order"
            )
        seen.add(label)
        prev_key = key
        periods.append(label)
        for col, (asset, cell) in enumerate(zip(asset_names, cells[1:])):
            columns[col].append(_parse_cell(cell, display, lineno, asset))

    series = []
    for asset, values in zip(asset_names, columns):
        try:
            series.append(
                RawSeries(asset_name=asset, unit="", periods=tuple(periods),
                          values=values)
            )
        except errors.DataError as exc:
            raise type(exc)(f"{display}: {exc}") from None
    scenario_name = name
    if scenario_name is None:
        if isinstance(source, (str, os.PathLike)):
            scenario_name = Path(source).stem
        else:
            scenario_name = "scenario"
    return Scenario(name=scenario_name, raw=tuple(series))


def _find_column(header: Sequence[str], wanted: str, display: str) -> int:
    for i, cell in enumerate(header):
        if cell == wanted:
            return i
    raise errors.UnknownColumn(
        f"{display}: no column named {wanted!r}; available: "
        f"{', '.join(repr(h) for h in header)}"
    )


def _import_long(rows, display, period_column, value_column):
    _, header = rows[0]
    p_idx = _find_column(header, period_column, display)
    v_idx = _find_column(header, value_column, display)
    entries = []
    seen = set()
    granularity = None
    for lineno, cells in rows[1:]:
        if len(cells) != len(header):
            raise errors.MalformedRow(
                f"{display}:{lineno}: expected {len(header)} cells, "
                f"got {len(cells)}"
            )
        label = cells[p_idx]
        gran, key = _parse_period_at(label, display, lineno)
        if granularity is None:
            granularity = gran
        elif gran != granularity:
            raise errors.MixedGranularity(
                f"{display}:{lineno}: period {label!r} is {gran} but the "
                f"file started {granularity}"
            )
        if label in seen:
            raise errors.DuplicatePeriod(
                f"{display}:{lineno}: duplicate period {label!r}"
            )
        seen.add(label)
        value = _parse_cell(cells[v_idx], display, lineno, value_column)
        entries.append((key, label, value))
    entries.sort(key=lambda e: e[0])
    return entries


def _import_wide(rows, display, year_column, month_columns):
    _, header = rows[0]
    y_idx = _find_column(header, year_column, display)
    if month_columns:
        if len(month_columns) == 12:
            # a full list is read positionally as Jan..Dec
            month_map = [
                (_find_column(header, column, display), month)
                for month, column in enumerate(month_columns, start=1)
            ]
        else:
            month_map = [
                (_find_column(header, column, display),
                 _month_number(column, display))
                for column in month_columns
            ]
    else:
        month_map = [
            (i, _MONTH_NUMBERS[cell.lower()])
            for i, cell in enumerate(header)
            if cell.lower() in _MONTH_NUMBERS
        ]
        if not month_map:
            raise errors.UnknownColumn(
                f"{display}: no month columns recognized in header "
                f"{', '.join(repr(h) for h in header)}"
            )
        month_map.sort(key=lambda pair: pair[1])
    entries = []
    seen_years = set()
    for lineno, cells in rows[1:]:
        if len(cells) != len(header):
            raise errors.MalformedRow(
                f"{display}:{lineno}: expected {len(header)} cells, "
                f"got {len(cells)}"
            )
        year_cell = cells[y_idx]
        try:
            year = int(year_cell)
        except ValueError:
            raise errors.NonNumericCell(
                f"{display}:{lineno}: column {year_column!r} value "
                f"{year_cell!r} is not a year"
            ) from None
        if not 1 <= year <= 9999:
            raise errors.InvalidPeriod(
                f"{display}:{lineno}: year {year} out of range"
            )
        if year in seen_years:
            raise errors.DuplicatePeriod(
                f"{display}:{lineno}: duplicate year {year}"
            )
        seen_years.add(year)
        for col, month in month_map:
            label = f"{year:04d}-{month:02d}"
            value = _parse_cell(cells[col], display, lineno, header[col])
            entries.append(((year, month), label, value))
    entries.sort(key=lambda e: e[0])
    return entries


def _month_number(column: str, display: str) -> int:
    number = _MONTH_NUMBERS.get(column.lower())
    if number is None:
        raise errors.UnknownColumn(
            f"{display}: {column!r} is not a recognizable month column"
        )
    return number


def import_column_export(source, source_kind: str, asset_name: str, *,
                         period_column: str | None = None,
                         value_column: str | None = None,
                         year_column: str | None = None,
                         month_columns: Sequence[str] | None = None,
                         unit: str = "") -> RawSeries:
    """Import one downloaded export file as a RawSeries.

    ``generic-long`` needs period_column and value_column; rows may be
    in any order and are sorted chronologically. ``generic-wide`` needs
    year_column and takes one column per month (auto-detected from
    month names when month_columns is not given); rows are unpivoted to
    monthly periods.
    """
    display = _display_name(source)
    text = _read_text(source, display)
    rows = _content_rows(text, display)
    if not rows:
        raise errors.MalformedHeader(f"{display}: no header row found")
    if source_kind == "generic-long":
        if period_column is None or value_column is None:
            raise ValueError(
                "generic-long import needs period_column and value_column"
            )
        entries = _import_long(rows, display, period_column, value_column)
    elif source_kind == "generic-wide":
        if year_column is None:
            raise ValueError("generic-wide import needs year_column")
        entries = _import_wide(rows, display, year_column, month_columns)
    else:
        raise ValueError(
            f"unknown source kind {source_kind!r}; expected "
            "'generic-long' or 'generic-wide'"
        )
    if len(entries) < 2:
        raise errors.TooFewRows(
            f"{display}: need at least 2 observations, got {len(entries)}"
        )
    try:
        return RawSeries(
            asset_name=asset_name,
            unit=unit,
            periods=tuple(label for _, label, _ in entries),
            values=[value for _, _, value in entries],
        )
    except errors.DataError as exc:
        raise type(exc)(f"{display}: {exc}") from None


def merge_to_canonical(series: Sequence[RawSeries], out_path,
                       comments: Iterable[str] = ()) -> Path:
    """Merge raw series onto their common periods and write a canonical
    scenario file. Column order follows input order; units are recorded
    as comment lines. Returns the output path."""
    if not series:
        raise ValueError("no series to merge")
    names = [s.asset_name for s in series]
    if len(set(names)) != len(names):
        raise errors.DuplicateAsset(f"duplicate asset names in {names}")
    if len(names) > MAX_ASSETS:
        raise errors.AssetCountExceeded(
            f"{len(names)} assets exceeds the supported bound of {MAX_ASSETS}"
        )
    for name in names:
        if "\n" in name or "\r" in name:
            raise ValueError(f"asset name {name!r} contains a line break")
    granularities = {s.granularity for s in series}
    if len(granularities) > 1:
        raise errors.MixedGranularity(
            f"cannot merge mixed period granularities {sorted(granularities)}"
        )
    common = set(series[0].periods)
    for s in series[1:]:
        common &= set(s.periods)
    if len(common) < 2:
        raise errors.NoOverlap(
            f"series share only {len(common)} period(s); need at least 2"
        )
    ordered = sorted(common, key=lambda p: parse_period(p)[1])
    lookups = [dict(zip(s.periods, s.values.tolist())) for s in series]

    out_path = Path(out_path)
    try:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            for comment in comments:
                fh.write(f"# {comment}\n")
            for s in series:
                if s.unit:
                    fh.write(f"# unit {s.asset_name}: {s.unit}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["period", *names])
            for period in ordered:
                writer.writerow(
                    [period, *(repr(lookup[period]) for lookup in lookups)]
                )
    except OSError as exc:
        raise errors.WriteFailure(f"cannot write {out_path}: {exc}") from exc
    return out_path
