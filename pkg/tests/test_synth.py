# -*- coding: utf-8 -*-
import math
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from config import TRUTH_COLS
from conftest import SIR_TRUTH
from dynamics import SIR, SIRI, ParamVector, reproduction_number
from inference import FitConfig
from synth import (
    SynthScenario,
    beta_for_r,
    expected_counts,
    generate_events,
    mixture_scenarios,
    parse_mixture,
    recovery_trial,
    to_records,
    truth_frame,
)
from validators import ConfigValidationError

ORIGIN = pd.Timestamp("2024-03-01T00:00:00Z")


@pytest.fixture
def scenario():
    return SynthScenario(spec=SIR, truth=SIR_TRUTH, duration=48.0, seed=7, hashtag="synth")


class TestScenario:
    def test_from_dict(self):
        parsed = SynthScenario.from_dict({
            "model": "SIRI", "beta": 0.001, "decay": 0.5, "s0": 2000, "i0": 5, "duration": 24,
            "emission": "gaussian_counts", "hashtag": "slow",
        })
        assert parsed.spec == SIRI
        assert parsed.truth.sigma == 1.0
        assert parsed.seed == 42 and parsed.window == 1.0

    def test_missing_key(self):
        with pytest.raises(ConfigValidationError):
            SynthScenario.from_dict({"beta": 0.5, "decay": 0.2, "s0": 100, "i0": 1})

    @pytest.mark.parametrize("raw", [
        {"beta": 0.5, "decay": 0.2, "s0": 100, "i0": 1, "duration": 0},
        {"beta": 0.5, "decay": 0.2, "s0": 100, "i0": 1, "duration": 5, "emission": "binomial"},
        {"beta": "x", "decay": 0.2, "s0": 100, "i0": 1, "duration": 5},
    ])
    def test_invalid_values(self, raw):
        with pytest.raises(ConfigValidationError):
            SynthScenario.from_dict(raw)

    def test_truth_r(self, scenario):
        assert scenario.truth_r == pytest.approx(reproduction_number(SIR, SIR_TRUTH))


class TestGenerateEvents:
    def test_same_seed_same_events(self, scenario):
        assert generate_events(scenario).times.tolist() == generate_events(scenario).times.tolist()

    def test_different_seed_different_events(self, scenario):
        other = replace(scenario, seed=8)
        assert generate_events(scenario).times.tolist() != generate_events(other).times.tolist()

    def test_poisson_total_matches_expectation(self, scenario):
        _, means = expected_counts(scenario, 0.25)
        total = len(generate_events(scenario, 0.25))
        expected = means.sum()
        assert abs(total - expected) <= 3.0 * math.sqrt(expected)

    def test_expected_counts_scale_with_cell_width(self, scenario):
        starts, means = expected_counts(scenario, 0.5)
        assert len(starts) == 96
        assert starts[1] == 0.5
        coarse = expected_counts(replace(scenario, window=2.0), 0.5)[1]
        np.testing.assert_allclose(coarse, means / 2.0)

    def test_gaussian_emission(self, scenario):
        series = generate_events(replace(scenario, emission="gaussian_counts"))
        assert len(series) > 0
        assert series.times[0] == 0.0
        assert np.all(np.diff(series.times) >= 0)

    def test_events_stay_inside_duration(self, scenario):
        series = generate_events(replace(scenario, duration=10.1), step=0.25)
        assert series.times[-1] <= 10.1


class TestMixture:
    def test_groups_draw_r_in_their_range(self):
        base = SynthScenario(spec=SIR, truth=SIR_TRUTH, duration=24.0, hashtag="mix")
        scenarios = mixture_scenarios([(3, 0.5, 0.9), (4, 2.0, 3.0)], base, seed=1)
        assert [s.hashtag for s in scenarios] == [f"mix{i:03d}" for i in range(7)]
        assert all(0.5 <= s.truth_r <= 0.9 for s in scenarios[:3])
        assert all(2.0 <= s.truth_r <= 3.0 for s in scenarios[3:])
        assert len({s.seed for s in scenarios}) == 7

    def test_mixture_is_reproducible(self):
        base = SynthScenario(spec=SIRI, truth=SIR_TRUTH, duration=24.0)
        first = mixture_scenarios([(5, 1.0, 4.0)], base, seed=3)
        second = mixture_scenarios([(5, 1.0, 4.0)], base, seed=3)
        assert first == second

    def test_invalid_group(self):
        base = SynthScenario(spec=SIR, truth=SIR_TRUTH, duration=24.0)
        with pytest.raises(ValueError):
            mixture_scenarios([(2, 3.0, 1.0)], base)

    @pytest.mark.parametrize("spec", [SIR, SIRI])
    def test_beta_for_r_inverts_reproduction_number(self, spec):
        beta = beta_for_r(spec, 2.5, 0.3, 4000.0, 20.0)
        truth = ParamVector(beta=beta, decay=0.3, s0=4000.0, i0=20.0, sigma=1.0)
        assert reproduction_number(spec, truth) == pytest.approx(2.5)

    def test_parse_mixture(self):
        assert parse_mixture("50:0.5:0.9, 50:1.2:3") == [(50, 0.5, 0.9), (50, 1.2, 3.0)]

    @pytest.mark.parametrize("text", ["", "5:1", "a:1:2"])
    def test_parse_mixture_rejects_malformed(self, text):
        with pytest.raises(ConfigValidationError):
            parse_mixture(text)


def test_to_records_preserves_hours(scenario):
    series = generate_events(scenario)
    records = to_records(series, ORIGIN)
    assert len(records) == len(series)
    assert records[0].timestamp == ORIGIN
    hours = np.array([(r.timestamp - ORIGIN) / pd.Timedelta(hours=1) for r in records])
    np.testing.assert_allclose(hours, series.times, atol=1e-6)
    assert all(r.hashtag == "synth" for r in records)


def test_to_records_localizes_naive_origin(scenario):
    records = to_records(generate_events(scenario), pd.Timestamp("2024-03-01 00:00:00"))
    assert str(records[0].timestamp.tzinfo) == "UTC"


def test_truth_frame(scenario):
    frame = truth_frame([scenario, replace(scenario, spec=SIRI, hashtag="other", location="nyc")])
    assert frame.columns.tolist() == TRUTH_COLS
    assert frame["location"].tolist() == ["", "nyc"]
    assert frame["R_true"].iloc[1] == pytest.approx(reproduction_number(SIRI, SIR_TRUTH))


def test_short_duration_occurrence_is_clamped():
    growing = SynthScenario(spec=SIR, truth=SIR_TRUTH, duration=6.0, seed=2)
    trial = recovery_trial(growing, FitConfig(total_samples=1000, walkers=50, seed=2))
    assert trial.occurrence.clamped_end
    assert trial.result.low_information


def test_recovery_trial_reports_coverage(scenario):
    trial = recovery_trial(scenario, FitConfig(total_samples=2000, walkers=50, seed=4))
    low, high = trial.result.r_interval
    assert trial.covered == (low <= trial.truth_r <= high)
    assert trial.truth_r == pytest.approx(scenario.truth_r)


@pytest.mark.slow
def test_default_recovery_covers_truth(scenario):
    trial = recovery_trial(scenario, FitConfig(seed=4))
    assert trial.covered


@pytest.mark.slow
def test_smoothed_counts_converge_to_expectation():
    heavy = SynthScenario(spec=SIR, truth=replace(SIR_TRUTH, s0=500_000.0, i0=1000.0), duration=24.0, seed=5)
    starts, means = expected_counts(heavy, 1.0)
    observed = np.histogram(generate_events(heavy, 1.0).times, bins=np.append(starts, 24.0))[0]
    busy = means > 1000
    np.testing.assert_allclose(observed[busy], means[busy], rtol=0.1)


@pytest.mark.slow
def test_repeated_recovery_coverage():
    trials = []
    for seed in range(20):
        scenario = SynthScenario(spec=SIR, truth=SIR_TRUTH, duration=48.0, seed=100 + seed,
                                 emission="gaussian_counts")
        trials.append(recovery_trial(scenario, FitConfig(seed=seed)))
    assert sum(trial.covered for trial in trials) >= 18
    pooled = np.median([trial.result.r_number for trial in trials])
    assert pooled == pytest.approx(reproduction_number(SIR, SIR_TRUTH), rel=0.15)


@pytest.mark.slow
def test_near_threshold_truth_gives_wider_interval():
    widths = {}
    for target_r in (1.05, 3.0):
        beta = beta_for_r(SIR, target_r, SIR_TRUTH.decay, SIR_TRUTH.s0, SIR_TRUTH.i0)
        truth = replace(SIR_TRUTH, beta=beta)
        scenario = SynthScenario(spec=SIR, truth=truth, duration=48.0, seed=21, hashtag=f"r{target_r}")
        low, high = recovery_trial(scenario, FitConfig(seed=21)).result.r_interval
        widths[target_r] = high - low
    assert widths[1.05] > widths[3.0]
