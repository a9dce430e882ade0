# -*- coding: utf-8 -*-
"""
Dynamics Module
SIR and SIRI compartmental models, their integration on an observation grid,
and the reproduction number of each.
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

from config import (
    NEGATIVE_SLACK,
    ODE_ATOL,
    ODE_METHOD,
    ODE_RTOL,
    PARAM_NAMES,
    SIR_INITIAL_RECOVERED,
    SIRI_INITIAL_RECOVERED,
    TRAJECTORY_COLS,
)
from validators import IntegrationFailure

logger = logging.getLogger(__name__)

_KINDS = ("sir", "siri")


@dataclass(frozen=True)
class ModelSpec:
    """Which compartmental model to use: 'sir' or 'siri'."""

    kind: str

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"model kind must be one of {_KINDS}, got {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "ModelSpec":
        return cls(str(text).strip().lower())

    @property
    def decay_name(self) -> str:
        """Name of the second rate: gamma (SIR recovery) or nu (SIRI feedback)."""
        return "gamma" if self.kind == "sir" else "nu"

    @property
    def initial_recovered(self) -> float:
        return SIR_INITIAL_RECOVERED if self.kind == "sir" else SIRI_INITIAL_RECOVERED

    def __str__(self) -> str:
        return self.kind


SIR = ModelSpec("sir")
SIRI = ModelSpec("siri")


@dataclass(frozen=True)
class ParamVector:
    """
    One point in parameter space.

    beta and decay are rates in 1/hour, s0 and i0 are persons,
    sigma is the observation noise scale in counts.
    """

    beta: float
    decay: float
    s0: float
    i0: float
    sigma: float

    def __post_init__(self):
        for name in PARAM_NAMES:
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be positive, got {value!r}")
        if self.i0 < 1:
            raise ValueError(f"i0 must be at least 1, got {self.i0!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.beta, self.decay, self.s0, self.i0, self.sigma], dtype=float)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "ParamVector":
        beta, decay, s0, i0, sigma = (float(v) for v in values)
        return cls(beta=beta, decay=decay, s0=s0, i0=i0, sigma=sigma)


@dataclass
class Trajectory:
    """Compartment counts sampled at the requested times."""

    times: np.ndarray
    S: np.ndarray
    I: np.ndarray
    R: np.ndarray
    N: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(dict(zip(TRAJECTORY_COLS, (self.times, self.S, self.I, self.R))))


def _clamp(value: float) -> float:
    return 0.0 if value < -NEGATIVE_SLACK else value


def rhs_sir(state: Tuple[float, float, float], params: ParamVector, N: float) -> Tuple[float, float, float]:
    """
    SIR vector field.

    dS/dt = -beta S I / N
    dI/dt = +beta S I / N - gamma I
    dR/dt = +gamma I
    """
    S, I = _clamp(state[0]), _clamp(state[1])
    infection = params.beta * S * I / N
    recovery = params.decay * I
    return (-infection, infection - recovery, recovery)


def rhs_siri(state: Tuple[float, float, float], params: ParamVector, N: float) -> Tuple[float, float, float]:
    """
    SIRI vector field; recovery is driven by contact with the recovered.

    dS/dt = -beta S I / N
    dI/dt = +beta S I / N - nu I R / N
    dR/dt = +nu I R / N
    """
    S, I, R = _clamp(state[0]), _clamp(state[1]), _clamp(state[2])
    infection = params.beta * S * I / N
    recovery = params.decay * I * R / N
    return (-infection, infection - recovery, recovery)


_RHS = {"sir": rhs_sir, "siri": rhs_siri}


def integrate(spec: ModelSpec, params: ParamVector, times: Sequence[float]) -> Trajectory:
    """
    Integrate a model from t=0 and sample it at `times`.

    Uses the adaptive Dormand-Prince 4(5) pair with rtol 1e-6 / atol 1e-8.
    Initial state is (s0, i0, r0) with r0 = 0 for SIR and 1 for SIRI.

    Args:
        spec (ModelSpec): Model kind
        params (ParamVector): Parameter point
        times (Sequence[float]): Sorted output times in hours, times[0] >= 0

    Returns:
        Trajectory: S, I, R at every output time

    Raises:
        IntegrationFailure: If the solver does not reach the last output time
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0:
        raise ValueError("times must be a non-empty 1-D sequence")
    if times[0] < 0 or np.any(np.diff(times) < 0):
        raise ValueError("times must be sorted and non-negative")

    r0 = spec.initial_recovered
    N = params.s0 + params.i0 + r0
    y0 = np.array([params.s0, params.i0, r0], dtype=float)

    if times[-1] == 0.0:
        states = np.repeat(y0[:, None], len(times), axis=1)
        return Trajectory(times=times, S=states[0], I=states[1], R=states[2], N=N)

    field = _RHS[spec.kind]

    def fun(t, y):
        return field(y, params, N)

    with np.errstate(all="ignore"):
        try:
            solution = solve_ivp(
                fun,
                (0.0, float(times[-1])),
                y0,
                method=ODE_METHOD,
                t_eval=times,
                rtol=ODE_RTOL,
                atol=ODE_ATOL,
            )
        except (ValueError, OverflowError, ZeroDivisionError) as exc:
            raise IntegrationFailure(f"integration error for {params}: {exc}", params)

    if not solution.success or solution.y.shape[1] != len(times) or not np.all(np.isfinite(solution.y)):
        raise IntegrationFailure(f"integration failed for {params}: {solution.message}", params)

    return Trajectory(times=times, S=solution.y[0], I=solution.y[1], R=solution.y[2], N=N)


def reproduction_number(spec: ModelSpec, params: ParamVector) -> float:
    """
    Threshold quantity for initial growth.

    SIR:  beta s0 / (gamma N), N = s0 + i0
    SIRI: beta s0 / nu        (R = 1 at the start)
    """
    if spec.kind == "sir":
        return params.beta * params.s0 / (params.decay * (params.s0 + params.i0))
    return params.beta * params.s0 / params.decay


def reproduction_numbers(spec: ModelSpec, chain: np.ndarray) -> np.ndarray:
    """Map reproduction_number over the rows of a parameter chain."""
    chain = np.atleast_2d(np.asarray(chain, dtype=float))
    return np.array([reproduction_number(spec, ParamVector.from_array(row)) for row in chain])
