# -*- coding: utf-8 -*-
"""Shared fixtures for the pipeline tests."""

import numpy as np
import pandas as pd
import pytest

from config import SUMMARY_COLS
from dynamics import SIR, ParamVector, integrate
from series import IntensitySeries, Occurrence

SIR_TRUTH = ParamVector(beta=0.6, decay=0.2, s0=5000.0, i0=10.0, sigma=20.0)


def make_intensity(values, step=1.0, window=1.0, hashtag="tag", location=None):
    return IntensitySeries(
        hashtag=hashtag, location=location, start=0.0, step=step, values=np.asarray(values, float), window=window
    )


def make_summary_frame(r_values, model="sir", locations=None, beta=None, decay=None):
    n = len(r_values)
    locations = locations or [""] * n
    beta = beta if beta is not None else [1.0] * n
    decay = decay if decay is not None else [0.5] * n
    rows = []
    for i, r in enumerate(r_values):
        rows.append({
            "hashtag": f"tag{i:02d}",
            "location": locations[i],
            "model": model,
            "beta_med": beta[i],
            "beta_lo": beta[i] * 0.9,
            "beta_hi": beta[i] * 1.1,
            "decay_med": decay[i],
            "decay_lo": decay[i] * 0.9,
            "decay_hi": decay[i] * 1.1,
            "s0_med": 1000.0,
            "i0_med": 5.0,
            "sigma_med": 2.0,
            "R_med": r,
            "R_lo": r * 0.8,
            "R_hi": r * 1.2,
            "accept_frac": 0.4,
            "n_samples": 1000,
        })
    return pd.DataFrame(rows, columns=SUMMARY_COLS)


@pytest.fixture
def sir_occurrence():
    """Noiseless SIR occurrence whose grid starts at t1 = 0, counts equal I(t)."""
    times = np.arange(0.0, 40.0, 1.0)
    trajectory = integrate(SIR, SIR_TRUTH, times)
    parent = make_intensity(trajectory.I, step=1.0, window=1.0, hashtag="sirtag")
    peak = int(np.argmax(parent.values))
    return Occurrence(parent=parent, start_index=0, peak_index=peak, end_index=len(times) - 1)


@pytest.fixture
def noisy_occurrence():
    """SIR occurrence with Gaussian count noise (sd 20), grid starting at t1 = 0."""
    times = np.arange(0.0, 40.0, 1.0)
    trajectory = integrate(SIR, SIR_TRUTH, times)
    rng = np.random.default_rng(11)
    counts = np.clip(trajectory.I + rng.normal(0.0, SIR_TRUTH.sigma, len(times)), 0.0, None)
    parent = make_intensity(counts, step=1.0, window=1.0, hashtag="noisy")
    peak = int(np.argmax(parent.values))
    return Occurrence(parent=parent, start_index=0, peak_index=peak, end_index=len(times) - 1)
