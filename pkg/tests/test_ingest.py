"""CSV intake, clock alignment, and normalization."""

import numpy as np
import pytest

from toplag.errors import (
    ColumnMissingError,
    EmptyIntersectionError,
    EmptySeriesError,
    IngestError,
    MalformedRowError,
    NonMonotoneTimestampsError,
    ZeroVarianceError,
)
from toplag.ingest import (
    AlignedPair,
    RawSeries,
    parse_csv,
    slice_pair,
    standardize,
    synchronize,
)


class TestParseCsv:
    def test_three_rows(self, tmp_csv):
        p = tmp_csv("a.csv", ["1,6.0488", "2,6.0500", "3,6.0600"])
        s = parse_csv(p, "time", "value")
        assert s.timestamps.tolist() == [1, 2, 3]
        assert s.values.tolist() == [6.0488, 6.05, 6.06]
        assert s.n == 3

    def test_duplicate_timestamp_names_offending_row(self, tmp_csv):
        rows = [f"{t},1.0" for t in [1, 2, 3, 4]] + ["4,2.0", "5,1.0"]
        p = tmp_csv("a.csv", rows)
        with pytest.raises(NonMonotoneTimestampsError) as e:
            parse_csv(p, "time", "value")
        assert e.value.row == 5

    def test_bad_value_fails_with_row_number(self, tmp_csv):
        p = tmp_csv("a.csv", ["1,1.0", "2,NA", "3,3.0"])
        with pytest.raises(MalformedRowError) as e:
            parse_csv(p, "time", "value")
        assert e.value.row == 2

    def test_skip_bad_rows_drops_and_counts(self, tmp_csv):
        p = tmp_csv("a.csv", ["1,1.0", "2,NA", "3,3.0"])
        s = parse_csv(p, "time", "value", skip_bad_rows=True)
        assert s.n == 2
        assert s.skipped_rows == 1
        assert s.timestamps.tolist() == [1, 3]

    def test_non_finite_value_rejected(self, tmp_csv):
        p = tmp_csv("a.csv", ["1,1.0", "2,inf"])
        with pytest.raises(MalformedRowError):
            parse_csv(p, "time", "value")

    def test_missing_column(self, tmp_csv):
        p = tmp_csv("a.csv", ["1,1.0"], header="time,price")
        with pytest.raises(ColumnMissingError):
            parse_csv(p, "time", "value")

    def test_single_row_rejected(self, tmp_csv):
        p = tmp_csv("a.csv", ["1,1.0"])
        with pytest.raises(EmptySeriesError):
            parse_csv(p, "time", "value")

    def test_iso_timestamps(self, tmp_csv):
        p = tmp_csv(
            "a.csv",
            ["2017-01-03T09:30:00,6.1", "2017-01-03T09:31:00,6.2"],
        )
        s = parse_csv(p, "time", "value")
        assert s.time_kind == "datetime"
        assert s.n == 2

    def test_mixed_timestamp_kinds_rejected(self, tmp_csv):
        p = tmp_csv("a.csv", ["1,6.1", "2017-01-03,6.2"])
        with pytest.raises(MalformedRowError):
            parse_csv(p, "time", "value")

    def test_explicit_time_format(self, tmp_csv):
        p = tmp_csv("a.csv", ["03/01/2017,6.1", "04/01/2017,6.2"])
        s = parse_csv(p, "time", "value", time_format="%d/%m/%Y")
        assert s.n == 2


class TestSynchronize:
    def _series(self, times, values, label="s"):
        return RawSeries(
            timestamps=np.asarray(times),
            values=np.asarray(values, dtype=np.float64),
            label=label,
        )

    def test_intersection_keeps_common_instants(self):
        a = self._series([1, 2, 3, 4], [10, 20, 30, 40])
        b = self._series([2, 3, 5], [2, 3, 5])
        pair = synchronize(a, b)
        assert pair.grid.tolist() == [2, 3]
        assert pair.x.tolist() == [20, 30]
        assert pair.y.tolist() == [2, 3]

    def test_identical_grids_pass_values_through(self):
        a = self._series([1, 2, 3], [1.0, 2.0, 3.0])
        b = self._series([1, 2, 3], [9.0, 8.0, 7.0])
        pair = synchronize(a, b)
        assert pair.n == 3
        assert np.array_equal(pair.x, a.values)
        assert np.array_equal(pair.y, b.values)

    def test_no_overlap_rejected(self):
        a = self._series([1, 2], [1.0, 2.0])
        b = self._series([3, 4], [3.0, 4.0])
        with pytest.raises(EmptyIntersectionError):
            synchronize(a, b)

    def test_sample_at_grid_takes_last_at_or_before(self):
        # minute-resolution series sampled at one instant per day
        a = self._series([100, 101, 102, 200, 201, 300], [1, 2, 3, 4, 5, 6])
        b = self._series([100, 150, 250, 299], [10, 20, 30, 40])
        pair = synchronize(a, b, policy="sample", grid=[102, 202, 301])
        assert pair.grid.tolist() == [102, 202, 301]
        assert pair.x.tolist() == [3, 5, 6]
        assert pair.y.tolist() == [10, 20, 40]

    def test_sample_grid_before_first_observation_dropped(self):
        a = self._series([10, 20], [1.0, 2.0])
        b = self._series([5, 20, 30], [0.5, 2.5, 3.5])
        pair = synchronize(a, b, policy="sample", grid=[1, 10, 25])
        assert pair.grid.tolist() == [10, 25]

    def test_sample_requires_grid(self):
        a = self._series([1, 2], [1.0, 2.0])
        with pytest.raises(IngestError):
            synchronize(a, a, policy="sample")

    def test_unknown_policy(self):
        a = self._series([1, 2], [1.0, 2.0])
        with pytest.raises(IngestError):
            synchronize(a, a, policy="outer")

    def test_idempotent_on_aligned_pair(self):
        a = self._series([1, 3, 5, 9], [1.0, 2.0, 3.0, 4.0])
        b = self._series([1, 3, 5, 9], [5.0, 6.0, 7.0, 8.0])
        once = synchronize(a, b)
        again = synchronize(
            self._series(once.grid, once.x), self._series(once.grid, once.y)
        )
        assert np.array_equal(once.grid, again.grid)
        assert np.array_equal(once.x, again.x)
        assert np.array_equal(once.y, again.y)

    def test_grid_is_subsequence_of_inputs(self):
        rng = np.random.default_rng(0)
        ta = np.unique(rng.integers(0, 60, size=30))
        tb = np.unique(rng.integers(0, 60, size=30))
        a = self._series(ta, rng.normal(size=ta.size))
        b = self._series(tb, rng.normal(size=tb.size))
        pair = synchronize(a, b)
        assert np.all(np.isin(pair.grid, ta))
        assert np.all(np.isin(pair.grid, tb))

    def test_mixed_time_kinds_rejected(self):
        a = self._series([1, 2], [1.0, 2.0])
        b = RawSeries(
            timestamps=np.array(["2017-01-01", "2017-01-02"], dtype="datetime64[s]"),
            values=np.array([1.0, 2.0]),
            label="b",
        )
        with pytest.raises(IngestError):
            synchronize(a, b)


class TestStandardize:
    def test_three_point_analytic(self):
        pair = AlignedPair(x=np.array([1.0, 2.0, 3.0]), y=np.array([4.0, 5.0, 6.0]))
        out = standardize(pair)
        assert np.allclose(out.x, [-1.0, 0.0, 1.0])
        assert np.allclose(out.y, [-1.0, 0.0, 1.0])
        assert out.normalization == "standardized"
        assert float(np.std(out.x, ddof=1)) == pytest.approx(1.0)

    def test_idempotent(self):
        rng = np.random.default_rng(3)
        pair = AlignedPair(x=rng.normal(2, 7, 50), y=rng.normal(-4, 0.1, 50))
        once = standardize(pair)
        twice = standardize(once)
        assert np.allclose(once.x, twice.x, atol=1e-12)
        assert np.allclose(once.y, twice.y, atol=1e-12)

    def test_constant_series_rejected(self):
        pair = AlignedPair(x=np.ones(10), y=np.arange(10.0))
        with pytest.raises(ZeroVarianceError):
            standardize(pair)


class TestAlignedPair:
    def test_length_mismatch_rejected(self):
        with pytest.raises(IngestError):
            AlignedPair(x=np.arange(3.0), y=np.arange(4.0))

    def test_non_finite_rejected(self):
        with pytest.raises(IngestError):
            AlignedPair(x=np.array([1.0, np.nan]), y=np.arange(2.0))

    def test_default_grid_is_index(self):
        pair = AlignedPair(x=np.arange(5.0), y=np.arange(5.0))
        assert pair.grid.tolist() == [0, 1, 2, 3, 4]

    def test_slice_by_grid_value(self):
        pair = AlignedPair(
            x=np.arange(10.0), y=np.arange(10.0), grid=np.arange(100, 110)
        )
        cut = slice_pair(pair, start=103, end=106)
        assert cut.grid.tolist() == [103, 104, 105, 106]
        assert cut.x.tolist() == [3.0, 4.0, 5.0, 6.0]

    def test_slice_to_nothing_rejected(self):
        pair = AlignedPair(x=np.arange(5.0), y=np.arange(5.0))
        with pytest.raises(EmptyIntersectionError):
            slice_pair(pair, start=100)
