# -*- coding: utf-8 -*-
import math
from types import SimpleNamespace

import numpy as np
import pandas as pd
import pytest

from analysis import (
    CorpusSummary,
    compare_locations,
    correlation_table,
    infectious_fraction,
    load_summaries,
    r_histogram,
    scatter_table,
    split_by_model,
    trace_table,
)
from config import HISTOGRAM_COLS, SCATTER_COLS, SUMMARY_COLS, TRACE_COLS
from conftest import SIR_TRUTH, make_summary_frame
from dynamics import SIR, SIRI
from synth import SynthScenario, mixture_scenarios, truth_frame
from reporter import HashtagReporter
from validators import EmptyInput, FormatError


def corpus(r_values, **kwargs):
    return CorpusSummary.from_frame(make_summary_frame(r_values, **kwargs))


class TestCorpusSummary:
    def test_empty_rows_rejected(self):
        with pytest.raises(EmptyInput):
            CorpusSummary(rows=make_summary_frame([]), model=SIR)

    def test_mixed_models_rejected(self):
        frame = pd.concat([make_summary_frame([1.0]), make_summary_frame([2.0], model="siri")])
        with pytest.raises(ValueError):
            CorpusSummary(rows=frame, model=SIR)
        with pytest.raises(ValueError):
            CorpusSummary.from_frame(frame)

    def test_model_selection(self):
        frame = pd.concat([make_summary_frame([1.0, 3.0]), make_summary_frame([2.0], model="SIRI")])
        assert CorpusSummary.from_frame(frame, "siri").r_values.tolist() == [2.0]
        assert sorted(split_by_model(frame)) == ["sir", "siri"]
        assert len(split_by_model(frame)["sir"]) == 2

    def test_selecting_absent_model_raises(self):
        with pytest.raises(EmptyInput):
            CorpusSummary.from_frame(make_summary_frame([1.0]), SIRI)

    def test_by_location(self):
        summary = corpus([1.0, 2.0, 3.0], locations=["nyc", "", "nyc"])
        split = summary.by_location()
        assert sorted(split) == ["", "nyc"]
        assert split["nyc"].r_values.tolist() == [1.0, 3.0]


def test_scatter_table():
    table = scatter_table(corpus([1.0, 1.0], beta=[2.0, 1.0], decay=[1.0, 2.0]))
    assert table.columns.tolist() == SCATTER_COLS
    assert table["above_line"].tolist() == [True, False]
    np.testing.assert_allclose(table["distance"], [1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0)])


def test_scatter_table_classifies_synthetic_truths():
    base = SynthScenario(spec=SIR, truth=SIR_TRUTH, duration=24.0)
    scenarios = mixture_scenarios([(20, 0.4, 0.8), (20, 1.5, 4.0)], base, seed=9)
    truths = truth_frame(scenarios)
    noise = np.random.default_rng(9).lognormal(0.0, 0.02, (2, len(truths)))
    beta, decay = truths["beta"].to_numpy() * noise[0], truths["decay"].to_numpy() * noise[1]
    table = scatter_table(corpus(truths["R_true"].tolist(), beta=beta.tolist(), decay=decay.tolist()))
    expected = (truths["beta"] > truths["decay"]).tolist()
    assert table["above_line"].tolist() == expected
    assert 0 < sum(expected) < len(expected)


class TestHistogram:
    def test_right_closed_bins(self):
        hist = r_histogram(corpus([1.0, 2.0, 4.0, 8.0]), bins=3)
        assert hist.columns.tolist() == HISTOGRAM_COLS
        assert hist["count"].tolist() == [2, 1, 1]
        assert (hist["bin_lo"].iloc[0], hist["bin_hi"].iloc[-1]) == (1.0, 8.0)

    def test_value_on_inner_edge_goes_left(self):
        hist = r_histogram(corpus([0.0, 1.0, 2.0]), bins=2)
        assert hist["count"].tolist() == [2, 1]

    def test_log_scale_edges(self):
        hist = r_histogram(corpus([1.0, 10.0, 100.0]), bins=2, log_scale=True)
        np.testing.assert_allclose(hist["bin_hi"], [10.0, 100.0])
        assert hist["count"].tolist() == [2, 1]

    def test_log_scale_needs_positive_values(self):
        with pytest.raises(ValueError):
            r_histogram(corpus([0.0, 1.0]), bins=2, log_scale=True)

    def test_single_row(self):
        summary = corpus([1.5])
        assert len(scatter_table(summary)) == 1
        hist = r_histogram(summary, bins=20)
        assert hist["count"].sum() == 1
        assert (hist["count"] > 0).sum() == 1
        assert (hist["bin_lo"].iloc[0], hist["bin_hi"].iloc[-1]) == (1.0, 2.0)

    def test_counts_partition_rows(self):
        values = np.random.default_rng(4).lognormal(0.0, 1.0, 137)
        for log_scale in (False, True):
            hist = r_histogram(corpus(values.tolist()), bins=13, log_scale=log_scale)
            assert hist["count"].sum() == 137
            assert len(hist) == 13

    def test_invalid_bin_count(self):
        with pytest.raises(ValueError):
            r_histogram(corpus([1.0, 2.0]), bins=0)


class TestInfectiousFraction:
    def test_strictly_above_threshold(self):
        assert infectious_fraction(corpus([0.5, 1.5, 2.0, 1.0]), 1.0) == 0.5

    def test_extremes(self):
        summary = corpus([0.5, 1.5, 2.0])
        assert infectious_fraction(summary, 0.0) == 1.0
        assert infectious_fraction(summary, 10.0) == 0.0

    def test_non_increasing_in_threshold(self):
        summary = corpus(np.random.default_rng(7).uniform(0.0, 4.0, 50).tolist())
        fractions = [infectious_fraction(summary, t) for t in np.linspace(0.0, 4.0, 41)]
        assert all(a >= b for a, b in zip(fractions, fractions[1:]))


class TestCompareLocations:
    def test_identical_samples(self):
        values = [0.5, 1.0, 1.5, 2.0, 3.0]
        comparison = compare_locations(corpus(values), corpus(values), "nyc", "sf")
        assert comparison.u_statistic == pytest.approx(12.5)
        assert comparison.z_score == pytest.approx(0.0)
        assert comparison.median_a == comparison.median_b == 1.5

    def test_fully_separated_samples(self):
        low = np.arange(20, dtype=float)
        comparison = compare_locations(corpus((low + 100.0).tolist()), corpus(low.tolist()))
        assert comparison.u_statistic == 400.0
        expected_z = 200.0 / math.sqrt(20 * 20 * 41 / 12.0)
        assert comparison.z_score == pytest.approx(expected_z)

    def test_same_generator_is_rarely_significant(self):
        rng = np.random.default_rng(13)
        calm = 0
        for _ in range(100):
            a, b = rng.lognormal(0.3, 0.8, (2, 30))
            comparison = compare_locations(corpus(a.tolist()), corpus(b.tolist()))
            calm += abs(comparison.z_score) < 3.0
        assert calm >= 95

    def test_frame_columns(self):
        frame = compare_locations(corpus([1.0, 2.0]), corpus([3.0, 4.0]), "a", "b").to_frame()
        assert frame.columns.tolist() == [
            "location_a", "location_b", "n_a", "n_b", "median_a", "median_b", "iqr_a", "iqr_b", "U", "z",
        ]
        assert frame["iqr_a"].iloc[0] == pytest.approx(0.5)


class TestLoadSummaries:
    def test_round_trip_through_reporter(self, tmp_path):
        frame = make_summary_frame([1.25, 0.75], locations=["nyc", ""])
        frame.loc[0, "hashtag"] = "null"
        path = HashtagReporter.export_summary(frame.to_dict("records"), tmp_path / "summary.csv")
        loaded = load_summaries([path])
        assert loaded.columns.tolist() == SUMMARY_COLS
        assert loaded["hashtag"].tolist() == ["null", "tag01"]
        assert loaded["location"].tolist() == ["nyc", ""]
        assert loaded["R_med"].tolist() == [1.25, 0.75]

    def test_concatenates_files(self, tmp_path):
        paths = [
            HashtagReporter.export_summary(make_summary_frame([1.0]).to_dict("records"), tmp_path / "a.csv"),
            HashtagReporter.export_summary(make_summary_frame([2.0], model="siri").to_dict("records"), tmp_path / "b.csv"),
        ]
        assert len(load_summaries(paths)) == 2

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("hashtag,R_med\na,1.0\n", encoding="utf-8")
        with pytest.raises(FormatError):
            load_summaries([path])

    def test_header_only_is_empty(self, tmp_path):
        path = HashtagReporter.export_summary([], tmp_path / "empty.csv")
        with pytest.raises(EmptyInput):
            load_summaries([path])

    def test_zero_byte_file_is_empty(self, tmp_path):
        path = tmp_path / "blank.csv"
        path.write_bytes(b"")
        with pytest.raises(EmptyInput):
            load_summaries([path])

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_summaries([tmp_path / "absent.csv"])


def test_correlation_table_lists_each_pair_once():
    matrix = np.eye(5)
    matrix[0, 1] = matrix[1, 0] = -0.8
    table = correlation_table(SimpleNamespace(correlations=matrix))
    assert len(table) == 10
    first = table.iloc[0]
    assert (first["param_a"], first["param_b"], first["correlation"]) == ("beta", "decay", -0.8)


def test_trace_table_uses_best_fit_curve(sir_occurrence):
    result = SimpleNamespace(spec=SIR, map_params=SIR_TRUTH)
    table = trace_table(sir_occurrence, result)
    assert table.columns.tolist() == TRACE_COLS
    np.testing.assert_allclose(table["model_I"], table["observed"])
