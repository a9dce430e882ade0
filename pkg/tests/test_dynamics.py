# -*- coding: utf-8 -*-
import math
from types import SimpleNamespace

import numpy as np
import pytest
from scipy.optimize import brentq

import dynamics
from dynamics import (
    SIR,
    SIRI,
    ModelSpec,
    ParamVector,
    integrate,
    reproduction_number,
    reproduction_numbers,
    rhs_sir,
    rhs_siri,
)
from validators import IntegrationFailure


def params(beta=0.5, decay=0.25, s0=990.0, i0=10.0, sigma=1.0):
    return ParamVector(beta=beta, decay=decay, s0=s0, i0=i0, sigma=sigma)


def final_size(p):
    """Root of ln(S/s0) = (beta/gamma)(S/N - 1) below s0."""
    N, ratio = p.s0 + p.i0, p.beta / p.decay
    return brentq(lambda s: math.log(s / p.s0) - ratio * (s / N - 1.0), 1e-9 * p.s0, p.s0 * (1.0 - 1e-12))


class TestModelSpec:
    def test_parse_is_case_insensitive(self):
        assert ModelSpec.parse(" SIRI ") == SIRI
        assert SIR.decay_name == "gamma" and SIRI.decay_name == "nu"

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            ModelSpec.parse("seir")


class TestParamVector:
    @pytest.mark.parametrize("field", ["beta", "decay", "s0", "sigma"])
    def test_non_positive_rejected(self, field):
        values = dict(beta=0.5, decay=0.25, s0=990.0, i0=10.0, sigma=1.0)
        values[field] = 0.0
        with pytest.raises(ValueError):
            ParamVector(**values)

    def test_i0_below_one_rejected(self):
        with pytest.raises(ValueError):
            params(i0=0.5)

    def test_array_round_trip(self):
        p = params()
        assert ParamVector.from_array(p.as_array()) == p


class TestVectorFields:
    def test_sir_no_infected_no_dynamics(self):
        assert rhs_sir((1000.0, 0.0, 0.0), params(), 1000.0) == (0.0, 0.0, 0.0)

    def test_sir_hand_evaluation(self):
        dS, dI, dR = rhs_sir((1000.0, 1.0, 0.0), params(beta=0.5, decay=0.25), 1000.0)
        assert dI == pytest.approx(0.25)
        assert dS + dI + dR == pytest.approx(0.0, abs=1e-15)

    def test_siri_without_recovered_is_pure_growth(self):
        p = params(beta=0.5, decay=2.0)
        dS, dI, dR = rhs_siri((990.0, 10.0, 0.0), p, 1000.0)
        assert dI == pytest.approx(0.5 * 990.0 * 10.0 / 1000.0)
        assert dR == 0.0

    def test_siri_hand_evaluation(self):
        dS, dI, dR = rhs_siri((990.0, 9.0, 1.0), params(beta=0.5, decay=2.0), 1000.0)
        assert (dS, dI, dR) == pytest.approx((-4.4550, 4.4370, 0.0180))

    def test_siri_no_infected_no_dynamics(self):
        assert rhs_siri((990.0, 0.0, 10.0), params(), 1000.0) == (0.0, 0.0, 0.0)

    def test_negative_states_are_clamped(self):
        assert rhs_sir((1000.0, -1e-6, 0.0), params(), 1000.0) == (0.0, 0.0, 0.0)

    def test_evaluations_are_pure(self):
        state = (700.0, 200.0, 100.0)
        assert rhs_siri(state, params(), 1000.0) == rhs_siri(state, params(), 1000.0)


class TestIntegrate:
    def test_pure_decay_matches_closed_form(self):
        times = [0.0, 0.5, 1.0, 2.0]
        trajectory = integrate(SIR, params(beta=1e-12, decay=1.0, s0=990.0, i0=10.0), times)
        expected = 10.0 * np.exp(-np.asarray(times))
        np.testing.assert_allclose(trajectory.I, expected, rtol=0.0, atol=1e-5)
        assert trajectory.I[0] == 10.0

    def test_tighter_tolerance_reduces_error(self, monkeypatch):
        p = params(beta=1e-12, decay=1.0, s0=990.0, i0=10.0)
        times = np.linspace(0.0, 5.0, 11)
        expected = 10.0 * np.exp(-times)
        errors = []
        for rtol, atol in ((1e-4, 1e-6), (5e-5, 5e-7)):
            monkeypatch.setattr(dynamics, "ODE_RTOL", rtol)
            monkeypatch.setattr(dynamics, "ODE_ATOL", atol)
            errors.append(np.abs(integrate(SIR, p, times).I - expected).max())
        assert errors[1] < errors[0]

    @pytest.mark.parametrize("spec", [SIR, SIRI])
    def test_population_is_conserved(self, spec):
        rng = np.random.default_rng(2)
        for _ in range(100):
            p = params(beta=rng.uniform(0.1, 3.0), decay=rng.uniform(0.05, 2.0),
                       s0=rng.uniform(100.0, 1e4), i0=rng.uniform(1.0, 50.0))
            trajectory = integrate(spec, p, np.linspace(0.0, 60.0, 121))
            total = trajectory.S + trajectory.I + trajectory.R
            assert np.all(np.abs(total - trajectory.N) <= 1e-6 * trajectory.N)
            assert np.all(np.diff(trajectory.S) <= 1e-9 * trajectory.N)
            assert np.all(np.diff(trajectory.R) >= -1e-9 * trajectory.N)

    def test_initial_state_and_population(self):
        sir = integrate(SIR, params(), [0.0, 1.0])
        siri = integrate(SIRI, params(), [0.0, 1.0])
        assert (sir.R[0], sir.N) == (0.0, 1000.0)
        assert (siri.R[0], siri.N) == (1.0, 1001.0)

    def test_final_size_relation(self):
        p = params(beta=0.5, decay=0.25, s0=990.0, i0=10.0)
        trajectory = integrate(SIR, p, np.linspace(0.0, 400.0, 401))
        assert trajectory.I.max() > p.i0
        assert trajectory.S[-1] == pytest.approx(final_size(p), rel=0.005)

    def test_final_size_relation_on_random_outbreaks(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            decay, s0 = rng.uniform(0.1, 1.0), rng.uniform(500.0, 1e4)
            i0 = s0 * rng.uniform(0.005, 0.02)
            target_r = rng.uniform(1.2, 5.0)
            p = params(beta=target_r * decay * (s0 + i0) / s0, decay=decay, s0=s0, i0=i0)
            assert reproduction_number(SIR, p) == pytest.approx(target_r)
            trajectory = integrate(SIR, p, [0.0, 50.0 / decay])
            assert trajectory.S[-1] == pytest.approx(final_size(p), rel=0.005)

    def test_subcritical_outbreak_never_grows(self):
        p = params(beta=0.2, decay=0.4)
        assert reproduction_number(SIR, p) < 1
        trajectory = integrate(SIR, p, np.linspace(0.0, 50.0, 201))
        assert trajectory.I.max() <= p.i0 + 1e-9

    def test_siri_grows_exactly_when_reproduction_number_exceeds_one(self):
        rng = np.random.default_rng(8)
        for k in range(10):
            target_r = rng.uniform(0.3, 0.8) if k % 2 else rng.uniform(1.2, 4.0)
            decay, s0 = rng.uniform(0.5, 2.0), rng.uniform(200.0, 2000.0)
            p = params(beta=target_r * decay / s0, decay=decay, s0=s0, i0=rng.uniform(1.0, 20.0))
            trajectory = integrate(SIRI, p, np.linspace(0.0, 200.0, 401))
            assert (trajectory.I.max() > p.i0) == (reproduction_number(SIRI, p) > 1)

    def test_single_time_at_origin(self):
        trajectory = integrate(SIR, params(), [0.0])
        assert trajectory.I.tolist() == [10.0]

    def test_unsorted_times_rejected(self):
        with pytest.raises(ValueError):
            integrate(SIR, params(), [0.0, 2.0, 1.0])

    def test_solver_failure_raises(self, monkeypatch):
        def failing(*args, **kwargs):
            return SimpleNamespace(success=False, message="step size underflow", y=np.empty((3, 0)))

        monkeypatch.setattr(dynamics, "solve_ivp", failing)
        with pytest.raises(IntegrationFailure) as excinfo:
            integrate(SIR, params(), [0.0, 1.0])
        assert excinfo.value.params == params()

    def test_trajectory_frame_columns(self):
        frame = integrate(SIR, params(), [0.0, 1.0, 2.0]).to_frame()
        assert frame.columns.tolist() == ["t_hours", "S", "I", "R"]
        assert len(frame) == 3


class TestReproductionNumber:
    def test_sir_formula(self):
        assert reproduction_number(SIR, params(beta=0.5, decay=0.25, s0=990.0, i0=10.0)) == pytest.approx(1.98)

    def test_sir_threshold_boundary(self):
        assert reproduction_number(SIR, params(beta=0.3, decay=0.3, s0=1e9, i0=1.0)) == pytest.approx(1.0)

    def test_siri_formula(self):
        assert reproduction_number(SIRI, params(beta=0.01, decay=2.0, s0=990.0)) == pytest.approx(4.95)

    def test_chain_mapping_is_elementwise(self):
        chain = np.array([[0.5, 0.25, 990.0, 10.0, 1.0], [0.6, 0.2, 5000.0, 10.0, 20.0]])
        expected = [reproduction_number(SIR, ParamVector.from_array(row)) for row in chain]
        assert reproduction_numbers(SIR, chain).tolist() == expected
