"""Canonical scenario parsing, export imports, and merge round trips."""

import io

import numpy as np
import pytest

from derfolio import (errors, import_column_export, merge_to_canonical,
                      parse_canonical)
from derfolio.core import RawSeries
from helpers import monthly_labels

CANONICAL = """\
# Riverton monthly capacity observations
# unit wind: kWh

period,solar,wind
2021-01,100.0,80.0
2021-02,110.0,76.0
2021-03,121.0,95.0
"""


def write(tmp_path, text, name="scenario.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def make_raw(name, values, unit="", start=(2021, 1)):
    periods = monthly_labels(start[0], start[1], len(values))
    return RawSeries(asset_name=name, unit=unit, periods=periods,
                     values=values)


class TestParseCanonical:
    def test_happy_path(self, tmp_path):
        path = write(tmp_path, CANONICAL, "riverton_2021.csv")
        scenario = parse_canonical(path)
        assert scenario.name == "riverton_2021"
        assert scenario.asset_names == ("solar", "wind")
        solar, wind = scenario.raw
        assert solar.periods == ("2021-01", "2021-02", "2021-03")
        assert solar.values.tolist() == [100.0, 110.0, 121.0]
        assert wind.values.tolist() == [80.0, 76.0, 95.0]
        assert solar.granularity == "monthly"
        assert scenario.stats is None and scenario.frontier is None

    def test_name_override(self, tmp_path):
        path = write(tmp_path, CANONICAL)
        assert parse_canonical(path, name="jan-run").name == "jan-run"

    def test_stream_input(self):
        scenario = parse_canonical(io.StringIO(CANONICAL))
        assert scenario.name == "scenario"
        assert scenario.asset_names == ("solar", "wind")

    def test_stream_with_name(self):
        scenario = parse_canonical(io.StringIO(CANONICAL), name="piped")
        assert scenario.name == "piped"

    def test_comments_and_blanks_anywhere(self, tmp_path):
        text = ("\n# leading comment\nperiod,a\n\n2021-01,1.0\n"
                "  # indented comment\n2021-02,2.0\n\n")
        scenario = parse_canonical(write(tmp_path, text))
        assert scenario.raw[0].values.tolist() == [1.0, 2.0]

    def test_cell_whitespace_tolerated(self, tmp_path):
        text = "period, a , b\n2021-01, 1.0 ,2.0\n2021-02,3.0, 4.0\n"
        scenario = parse_canonical(write(tmp_path, text))
        assert scenario.asset_names == ("a", "b")
        assert scenario.raw[1].values.tolist() == [2.0, 4.0]

    def test_daily_periods(self, tmp_path):
        text = "period,a\n2021-03-01,5.0\n2021-03-02,6.0\n"
        scenario = parse_canonical(write(tmp_path, text))
        assert scenario.raw[0].granularity == "daily"

    def test_values_preserved_exactly(self, tmp_path):
        rng = np.random.default_rng(5)
        values = rng.uniform(0.1, 5000.0, 12)
        lines = ["period,x"]
        for label, value in zip(monthly_labels(2020, 1, 12), values):
            lines.append(f"{label},{float(value)!r}")
        path = write(tmp_path, "\n".join(lines) + "\n")
        parsed = parse_canonical(path).raw[0].values
        assert parsed.tolist() == [float(v) for v in values]

    def test_empty_file(self, tmp_path):
        with pytest.raises(errors.MalformedHeader, match="no header row"):
            parse_canonical(write(tmp_path, "# only a comment\n\n"))

    def test_header_must_start_with_period(self, tmp_path):
        text = "date,a\n2021-01,1.0\n2021-02,2.0\n"
        with pytest.raises(errors.MalformedHeader, match="period"):
            parse_canonical(write(tmp_path, text))

    def test_header_needs_assets(self, tmp_path):
        with pytest.raises(errors.MalformedHeader, match="no asset columns"):
            parse_canonical(write(tmp_path, "period\n2021-01\n2021-02\n"))

    def test_header_empty_asset_name(self, tmp_path):
        text = "period,a,,c\n2021-01,1,2,3\n2021-02,4,5,6\n"
        with pytest.raises(errors.MalformedHeader, match="empty asset name"):
            parse_canonical(write(tmp_path, text))

    def test_header_duplicate_asset(self, tmp_path):
        text = "period,a,a\n2021-01,1,2\n2021-02,3,4\n"
        with pytest.raises(errors.MalformedHeader, match="duplicate"):
            parse_canonical(write(tmp_path, text))

    def test_header_too_many_assets(self, tmp_path):
        names = ",".join(f"a{i}" for i in range(33))
        ones = ",".join("1.0" for _ in range(33))
        text = f"period,{names}\n2021-01,{ones}\n2021-02,{ones}\n"
        with pytest.raises(errors.AssetCountExceeded, match="33"):
            parse_canonical(write(tmp_path, text))

    def test_too_few_rows(self, tmp_path):
        with pytest.raises(errors.TooFewRows, match="got 1"):
            parse_canonical(write(tmp_path, "period,a\n2021-01,1.0\n"))

    def test_row_width_mismatch_carries_line(self, tmp_path):
        text = "period,a,b\n2021-01,1.0,2.0\n2021-02,3.0\n"
        with pytest.raises(errors.MalformedRow, match=r":3:"):
            parse_canonical(write(tmp_path, text))

    def test_nul_byte_is_malformed(self):
        stream = io.StringIO("period,a\n2021-01,1\x000\n2021-02,2.0\n")
        with pytest.raises(errors.MalformedRow, match=r":2:"):
            parse_canonical(stream, name="piped")

    def test_bad_period_carries_location(self, tmp_path):
        text = "period,a\n2021-01,1.0\n2021/02,2.0\n"
        path = write(tmp_path, text, "bad.csv")
        with pytest.raises(errors.InvalidPeriod, match=r"bad\.csv:3"):
            parse_canonical(path)

    def test_invalid_month_number(self, tmp_path):
        text = "period,a\n2021-01,1.0\n2021-13,2.0\n"
        with pytest.raises(errors.InvalidPeriod, match=r":3:"):
            parse_canonical(write(tmp_path, text))

    def test_mixed_granularity(self, tmp_path):
        text = "period,a\n2021-01,1.0\n2021-02-15,2.0\n"
        with pytest.raises(errors.MixedGranularity, match=r":3:"):
            parse_canonical(write(tmp_path, text))

    def test_duplicate_period(self, tmp_path):
        text = "period,a\n2021-01,1.0\n2021-02,2.0\n2021-01,3.0\n"
        with pytest.raises(errors.DuplicatePeriod, match=r":4:.*2021-01"):
            parse_canonical(write(tmp_path, text))

    def test_out_of_order_periods(self, tmp_path):
        text = "period,a\n2021-03,1.0\n2021-02,2.0\n"
        with pytest.raises(errors.OutOfOrderPeriods, match=r":3:"):
            parse_canonical(write(tmp_path, text))

    def test_empty_cell(self, tmp_path):
        text = "period,a,b\n2021-01,1.0,\n2021-02,2.0,3.0\n"
        with pytest.raises(errors.NonNumericCell, match=r":2:.*'b'.*empty"):
            parse_canonical(write(tmp_path, text))

    def test_text_cell(self, tmp_path):
        text = "period,a\n2021-01,1.0\n2021-02,n/a\n"
        with pytest.raises(errors.NonNumericCell, match=r":3:.*'n/a'"):
            parse_canonical(write(tmp_path, text))

    def test_non_finite_cell(self, tmp_path):
        text = "period,a\n2021-01,1.0\n2021-02,inf\n"
        with pytest.raises(errors.NonNumericCell, match="not finite"):
            parse_canonical(write(tmp_path, text))

    def test_negative_value_names_file(self, tmp_path):
        text = "period,a\n2021-01,1.0\n2021-02,-3.0\n"
        path = write(tmp_path, text, "neg.csv")
        with pytest.raises(errors.NegativeValue, match=r"neg\.csv.*2021-02"):
            parse_canonical(path)

    def test_not_utf8(self, tmp_path):
        path = tmp_path / "latin.csv"
        path.write_bytes("period,caf\xe9\n".encode("latin-1"))
        with pytest.raises(errors.EncodingError, match="UTF-8"):
            parse_canonical(path)


LONG = """\
Month,Station,Value
2021-02,riverton,110.5
2021-01,riverton,100.25
2021-03,riverton,121.0
"""


class TestImportLong:
    def test_rows_sorted_chronologically(self, tmp_path):
        path = write(tmp_path, LONG, "long.csv")
        series = import_column_export(path, "generic-long", "solar",
                                      period_column="Month",
                                      value_column="Value", unit="kWh")
        assert series.asset_name == "solar"
        assert series.unit == "kWh"
        assert series.periods == ("2021-01", "2021-02", "2021-03")
        assert series.values.tolist() == [100.25, 110.5, 121.0]

    def test_unknown_column_lists_available(self, tmp_path):
        path = write(tmp_path, LONG)
        with pytest.raises(errors.UnknownColumn, match="'Month'.*'Value'"):
            import_column_export(path, "generic-long", "solar",
                                 period_column="period",
                                 value_column="Value")

    def test_duplicate_period(self, tmp_path):
        text = "period,v\n2021-01,1.0\n2021-02,2.0\n2021-01,3.0\n"
        path = write(tmp_path, text)
        with pytest.raises(errors.DuplicatePeriod, match=r":4:"):
            import_column_export(path, "generic-long", "x",
                                 period_column="period", value_column="v")

    def test_mixed_granularity(self, tmp_path):
        text = "period,v\n2021-01,1.0\n2021-02-01,2.0\n"
        path = write(tmp_path, text)
        with pytest.raises(errors.MixedGranularity, match=r":3:"):
            import_column_export(path, "generic-long", "x",
                                 period_column="period", value_column="v")

    def test_row_width(self, tmp_path):
        text = "period,v\n2021-01,1.0\n2021-02\n"
        path = write(tmp_path, text)
        with pytest.raises(errors.MalformedRow, match=r":3:"):
            import_column_export(path, "generic-long", "x",
                                 period_column="period", value_column="v")

    def test_too_few_rows(self, tmp_path):
        path = write(tmp_path, "period,v\n2021-01,1.0\n")
        with pytest.raises(errors.TooFewRows, match="got 1"):
            import_column_export(path, "generic-long", "x",
                                 period_column="period", value_column="v")

    def test_bad_value_names_column(self, tmp_path):
        text = "period,v\n2021-01,ok?\n2021-02,2.0\n"
        path = write(tmp_path, text)
        with pytest.raises(errors.NonNumericCell, match=r":2:.*'v'"):
            import_column_export(path, "generic-long", "x",
                                 period_column="period", value_column="v")

    def test_missing_column_arguments(self, tmp_path):
        path = write(tmp_path, LONG)
        with pytest.raises(ValueError, match="period_column"):
            import_column_export(path, "generic-long", "x")

    def test_unknown_kind(self, tmp_path):
        path = write(tmp_path, LONG)
        with pytest.raises(ValueError, match="source kind"):
            import_column_export(path, "generic-tall", "x",
                                 period_column="Month",
                                 value_column="Value")


WIDE = """\
Year,Jan,Feb,Mar,Apr,May,Jun,Jul,Aug,Sep,Oct,Nov,Dec
2021,1,2,3,4,5,6,7,8,9,10,11,12
2020,13,14,15,16,17,18,19,20,21,22,23,24
"""


class TestImportWide:
    def test_autodetected_months(self, tmp_path):
        path = write(tmp_path, WIDE)
        series = import_column_export(path, "generic-wide", "bio",
                                      year_column="Year")
        assert len(series) == 24
        assert series.periods[0] == "2020-01"
        assert series.periods[-1] == "2021-12"
        # rows unpivot and sort chronologically even when years are
        # listed newest-first
        assert series.values.tolist() == [float(v) for v in
                                          list(range(13, 25)) +
                                          list(range(1, 13))]

    def test_autodetect_ignores_header_order(self, tmp_path):
        text = "Year,Mar,Jan,Feb\n2021,3,1,2\n2022,6,4,5\n"
        path = write(tmp_path, text)
        series = import_column_export(path, "generic-wide", "bio",
                                      year_column="Year")
        assert series.periods == ("2021-01", "2021-02", "2021-03",
                                  "2022-01", "2022-02", "2022-03")
        assert series.values.tolist() == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]

    def test_explicit_twelve_columns_are_positional(self, tmp_path):
        cols = ",".join(f"M{i}" for i in range(1, 13))
        vals = ",".join(str(i) for i in range(1, 13))
        path = write(tmp_path, f"Year,{cols}\n2021,{vals}\n")
        series = import_column_export(
            path, "generic-wide", "bio", year_column="Year",
            month_columns=[f"M{i}" for i in range(1, 13)])
        assert series.periods[:2] == ("2021-01", "2021-02")
        assert series.values.tolist() == [float(v) for v in range(1, 13)]

    def test_named_month_subset(self, tmp_path):
        text = "Year,January,February,March\n2021,1,2,3\n"
        path = write(tmp_path, text)
        series = import_column_export(
            path, "generic-wide", "bio", year_column="Year",
            month_columns=["February", "March"])
        assert series.periods == ("2021-02", "2021-03")
        assert series.values.tolist() == [2.0, 3.0]

    def test_unrecognized_month_name(self, tmp_path):
        text = "Year,Q1,Q2\n2021,1,2\n"
        path = write(tmp_path, text)
        with pytest.raises(errors.UnknownColumn, match="'Q1'"):
            import_column_export(path, "generic-wide", "bio",
                                 year_column="Year",
                                 month_columns=["Q1", "Q2"])

    def test_no_month_columns_found(self, tmp_path):
        text = "Year,Total\n2021,12\n2022,13\n"
        path = write(tmp_path, text)
        with pytest.raises(errors.UnknownColumn, match="no month columns"):
            import_column_export(path, "generic-wide", "bio",
                                 year_column="Year")

    def test_bad_year(self, tmp_path):
        text = "Year,Jan,Feb\n20x1,1,2\n"
        path = write(tmp_path, text)
        with pytest.raises(errors.NonNumericCell, match="'20x1'"):
            import_column_export(path, "generic-wide", "bio",
                                 year_column="Year")

    def test_year_out_of_range(self, tmp_path):
        text = "Year,Jan,Feb\n0,1,2\n"
        path = write(tmp_path, text)
        with pytest.raises(errors.InvalidPeriod, match="out of range"):
            import_column_export(path, "generic-wide", "bio",
                                 year_column="Year")

    def test_duplicate_year(self, tmp_path):
        text = "Year,Jan,Feb\n2021,1,2\n2021,3,4\n"
        path = write(tmp_path, text)
        with pytest.raises(errors.DuplicatePeriod, match=r":3:.*2021"):
            import_column_export(path, "generic-wide", "bio",
                                 year_column="Year")

    def test_missing_cell_is_an_error(self, tmp_path):
        text = "Year,Jan,Feb\n2021,1,\n"
        path = write(tmp_path, text)
        with pytest.raises(errors.NonNumericCell, match="'Feb'.*empty"):
            import_column_export(path, "generic-wide", "bio",
                                 year_column="Year")

    def test_missing_year_column_argument(self, tmp_path):
        path = write(tmp_path, WIDE)
        with pytest.raises(ValueError, match="year_column"):
            import_column_export(path, "generic-wide", "bio")


class TestMergeToCanonical:
    def test_merge_intersects_and_orders(self, tmp_path):
        a = make_raw("solar", [1.0, 2.0, 3.0, 4.0], start=(2021, 1))
        b = make_raw("wind", [5.0, 6.0, 7.0, 8.0], start=(2021, 2),
                     unit="kWh")
        out = tmp_path / "merged.csv"
        result = merge_to_canonical([a, b], out, comments=["station run"])
        assert result == out
        text = out.read_text(encoding="utf-8")
        assert text.startswith("# station run\n# unit wind: kWh\n")
        scenario = parse_canonical(out)
        assert scenario.asset_names == ("solar", "wind")
        solar, wind = scenario.raw
        assert solar.periods == ("2021-02", "2021-03", "2021-04")
        assert solar.values.tolist() == [2.0, 3.0, 4.0]
        assert wind.values.tolist() == [5.0, 6.0, 7.0]

    def test_round_trip_is_exact(self, tmp_path):
        rng = np.random.default_rng(17)
        for trial in range(20):
            n_common = int(rng.integers(3, 15))
            periods = monthly_labels(2018, 1, n_common + 4)
            series = []
            for i in range(3):
                lo = int(rng.integers(0, 3))
                span = periods[lo:lo + n_common + 1]
                values = rng.uniform(1e-6, 1e6, len(span))
                series.append(RawSeries(asset_name=f"a{i}", unit="",
                                        periods=span, values=values))
            out = tmp_path / f"trial{trial}.csv"
            merge_to_canonical(series, out)
            parsed = parse_canonical(out)
            common = set(series[0].periods)
            for s in series[1:]:
                common &= set(s.periods)
            expect = sorted(common)
            for original, back in zip(series, parsed.raw):
                lookup = dict(zip(original.periods,
                                  original.values.tolist()))
                assert back.periods == tuple(expect)
                assert back.values.tolist() == [lookup[p] for p in expect]

    def test_duplicate_asset(self, tmp_path):
        a = make_raw("solar", [1.0, 2.0])
        b = make_raw("solar", [3.0, 4.0])
        with pytest.raises(errors.DuplicateAsset):
            merge_to_canonical([a, b], tmp_path / "x.csv")

    def test_too_many_assets(self, tmp_path):
        series = [make_raw(f"a{i}", [1.0, 2.0]) for i in range(33)]
        with pytest.raises(errors.AssetCountExceeded, match="33"):
            merge_to_canonical(series, tmp_path / "x.csv")

    def test_mixed_granularity(self, tmp_path):
        a = make_raw("solar", [1.0, 2.0])
        b = RawSeries(asset_name="wind", unit="",
                      periods=("2021-01-01", "2021-01-02"),
                      values=[1.0, 2.0])
        with pytest.raises(errors.MixedGranularity):
            merge_to_canonical([a, b], tmp_path / "x.csv")

    def test_no_overlap(self, tmp_path):
        a = make_raw("solar", [1.0, 2.0], start=(2021, 1))
        b = make_raw("wind", [1.0, 2.0], start=(2021, 2))
        with pytest.raises(errors.NoOverlap, match="1 period"):
            merge_to_canonical([a, b], tmp_path / "x.csv")

    def test_newline_in_name(self, tmp_path):
        a = make_raw("so\nlar", [1.0, 2.0])
        with pytest.raises(ValueError, match="line break"):
            merge_to_canonical([a], tmp_path / "x.csv")

    def test_empty_input(self, tmp_path):
        with pytest.raises(ValueError, match="no series"):
            merge_to_canonical([], tmp_path / "x.csv")

    def test_write_failure(self, tmp_path):
        a = make_raw("solar", [1.0, 2.0])
        b = make_raw("wind", [3.0, 4.0])
        target = tmp_path / "missing" / "out.csv"
        with pytest.raises(errors.WriteFailure, match="cannot write"):
            merge_to_canonical([a, b], target)
