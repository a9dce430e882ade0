# -*- coding: utf-8 -*-
"""
Synthetic Event Generator Module
Generates hashtag event streams from known SIR/SIRI dynamics, used to check
that the fitting pipeline recovers the parameters it was given.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config import DEFAULT_FRACTION, DEFAULT_SEED, DEFAULT_STEP_HOURS, DEFAULT_WINDOW_HOURS, TRUTH_COLS
from dynamics import ModelSpec, ParamVector, integrate, reproduction_number
from inference import FitConfig, FitResult, fit
from ingest import EventRecord, EventSeries
from series import Occurrence, extract_occurrence, smooth
from validators import ConfigValidationError, check_positive

logger = logging.getLogger(__name__)

EMISSIONS = ("poisson_counts", "gaussian_counts")


@dataclass(frozen=True)
class SynthScenario:
    """
    Ground truth for one synthetic hashtag.

    `window` is the count normalization: a cell of width `step` receives on
    average I(t) x step / window events, so a smoothing window of that width
    sees about I(t) events.
    """

    spec: ModelSpec
    truth: ParamVector
    duration: float
    seed: int = DEFAULT_SEED
    emission: str = "poisson_counts"
    hashtag: str = "synthetic"
    location: Optional[str] = None
    window: float = DEFAULT_WINDOW_HOURS

    def __post_init__(self):
        check_positive(self.duration, "duration")
        check_positive(self.window, "window")
        if self.emission not in EMISSIONS:
            raise ValueError(f"emission must be one of {EMISSIONS}, got {self.emission!r}")

    @property
    def truth_r(self) -> float:
        return reproduction_number(self.spec, self.truth)

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "SynthScenario":
        """
        Build a scenario from a config-file mapping.

        Keys: model, beta, decay, s0, i0, sigma, duration and optionally
        seed, emission, hashtag, location, window.

        Raises:
            ConfigValidationError: If a key is missing or a value is invalid
        """
        try:
            truth = ParamVector(
                beta=float(raw["beta"]),
                decay=float(raw["decay"]),
                s0=float(raw["s0"]),
                i0=float(raw["i0"]),
                sigma=float(raw.get("sigma", 1.0)),
            )
            return cls(
                spec=ModelSpec.parse(raw.get("model", "sir")),
                truth=truth,
                duration=float(raw["duration"]),
                seed=int(raw.get("seed", DEFAULT_SEED)),
                emission=str(raw.get("emission", "poisson_counts")),
                hashtag=str(raw.get("hashtag", "synthetic")),
                location=raw.get("location"),
                window=float(raw.get("window", DEFAULT_WINDOW_HOURS)),
            )
        except KeyError as exc:
            raise ConfigValidationError(f"scenario missing key {exc}")
        except (TypeError, ValueError) as exc:
            raise ConfigValidationError(f"invalid scenario {raw!r}: {exc}")


@dataclass
class RecoveryTrial:
    """Outcome of one generate-and-fit round trip."""

    truth_r: float
    result: FitResult
    covered: bool
    occurrence: Occurrence


def expected_counts(scenario: SynthScenario, step: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Mean event count per generation cell.

    Returns:
        tuple: (cell start times, mean counts I(mid) x step / window)
    """
    step = check_positive(step, "step")
    n_cells = int(math.ceil(scenario.duration / step))
    starts = step * np.arange(n_cells)
    trajectory = integrate(scenario.spec, scenario.truth, starts + step / 2.0)
    return starts, np.clip(trajectory.I, 0.0, None) * step / scenario.window


def generate_events(scenario: SynthScenario, step: float = DEFAULT_STEP_HOURS) -> EventSeries:
    """
    Draw an event series from the scenario's ground truth.

    Each cell of width `step` gets a count drawn around I(cell midpoint) x step / window
    (Poisson, or Gaussian with sd sigma x sqrt(step / window) rounded and floored at 0),
    and that many events are placed uniformly inside the cell.

    Args:
        scenario (SynthScenario): Ground truth
        step (float): Generation cell width in hours

    Returns:
        EventSeries: Events rebased so the first one is at 0

    Raises:
        EmptyInput: If no event was drawn at all
    """
    starts, means = expected_counts(scenario, step)
    rng = np.random.default_rng(scenario.seed)

    if scenario.emission == "poisson_counts":
        counts = rng.poisson(means)
    else:
        scale = scenario.truth.sigma * math.sqrt(step / scenario.window)
        counts = np.maximum(np.rint(rng.normal(means, scale)), 0).astype(int)

    hours = []
    for start, count in zip(starts, counts):
        if count:
            end = min(start + step, scenario.duration)
            hours.append(rng.uniform(start, end, int(count)))

    total = int(counts.sum())
    logger.debug("scenario %s: %d events over %.2f h", scenario.hashtag, total, scenario.duration)
    return EventSeries.from_hours(scenario.hashtag, scenario.location, np.concatenate(hours) if hours else [])


def recovery_trial(
    scenario: SynthScenario,
    fit_config: Optional[FitConfig] = None,
    window: Optional[float] = None,
    step: float = DEFAULT_STEP_HOURS,
    fraction: float = DEFAULT_FRACTION,
    generation_step: Optional[float] = None,
) -> RecoveryTrial:
    """
    Generate events, run smoothing, extraction and the fit, and check ℛ coverage.

    Args:
        scenario (SynthScenario): Ground truth
        fit_config (Optional[FitConfig]): Sampler settings
        window (Optional[float]): Smoothing window (default: the scenario's window)
        step (float): Smoothing grid step
        fraction (float): Extraction threshold fraction
        generation_step (Optional[float]): Generation cell width (default: `step`)

    Returns:
        RecoveryTrial: Truth ℛ, fit result and whether the 95% interval covers the truth
    """
    window = scenario.window if window is None else window
    events = generate_events(scenario, generation_step or step)
    occ = extract_occurrence(smooth(events, window=window, step=step), fraction)
    result = fit(occ, scenario.spec, fit_config)

    truth_r = scenario.truth_r
    low, high = result.r_interval
    covered = low <= truth_r <= high
    logger.info(
        "recovery %s: truth R=%.3f interval=[%.3f, %.3f] %s",
        scenario.hashtag, truth_r, low, high, "covered" if covered else "missed",
    )
    return RecoveryTrial(truth_r=truth_r, result=result, covered=covered, occurrence=occ)


def beta_for_r(spec: ModelSpec, target_r: float, decay: float, s0: float, i0: float) -> float:
    """Infection rate that gives reproduction number `target_r` with the other parameters fixed."""
    if spec.kind == "sir":
        return target_r * decay * (s0 + i0) / s0
    return target_r * decay / s0


def mixture_scenarios(
    groups: Sequence[Tuple[int, float, float]],
    base: SynthScenario,
    seed: int = DEFAULT_SEED,
) -> List[SynthScenario]:
    """
    Build a corpus of scenarios whose true ℛ is drawn per group.

    Each group (count, r_low, r_high) contributes `count` scenarios with ℛ drawn
    uniformly in [r_low, r_high]; beta is solved for, the rest is copied from `base`.

    Args:
        groups (Sequence[Tuple[int, float, float]]): Group definitions
        base (SynthScenario): Template scenario
        seed (int): Corpus seed (per-scenario seeds are derived from it)

    Returns:
        List[SynthScenario]: Scenarios named `<base hashtag><index>`
    """
    total = 0
    for count, r_low, r_high in groups:
        if int(count) < 0 or not 0 < r_low <= r_high:
            raise ValueError(f"invalid mixture group ({count}, {r_low}, {r_high})")
        total += int(count)

    root = np.random.SeedSequence(seed)
    draw_rng, *children = [np.random.default_rng(child) for child in root.spawn(total + 1)]

    truth = base.truth
    scenarios = []
    index = 0
    for count, r_low, r_high in groups:
        for _ in range(int(count)):
            target_r = float(draw_rng.uniform(r_low, r_high))
            beta = beta_for_r(base.spec, target_r, truth.decay, truth.s0, truth.i0)
            scenarios.append(replace(
                base,
                truth=replace(truth, beta=beta),
                seed=int(children[index].integers(2 ** 31)),
                hashtag=f"{base.hashtag}{index:03d}",
            ))
            index += 1
    return scenarios


def parse_mixture(text: str) -> List[Tuple[int, float, float]]:
    """
    Parse `count:r_lo:r_hi,...` group definitions.

    Raises:
        ConfigValidationError: If a group is malformed
    """
    groups = []
    for chunk in str(text).split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) != 3:
            raise ConfigValidationError(f"mixture group must be count:r_lo:r_hi, got '{chunk}'")
        try:
            groups.append((int(parts[0]), float(parts[1]), float(parts[2])))
        except ValueError:
            raise ConfigValidationError(f"mixture group has non-numeric fields: '{chunk}'")
    if not groups:
        raise ConfigValidationError("mixture needs at least one group")
    return groups


def to_records(series: EventSeries, origin: pd.Timestamp) -> List[EventRecord]:
    """
    Place a series on absolute UTC time.

    Args:
        series (EventSeries): Events in hours
        origin (pd.Timestamp): Timestamp of the first event

    Returns:
        List[EventRecord]: Records at millisecond resolution
    """
    origin = pd.Timestamp(origin)
    origin = origin.tz_localize("UTC") if origin.tzinfo is None else origin.tz_convert("UTC")
    stamps = (origin + pd.to_timedelta(series.times, unit="h")).floor("ms")
    return [EventRecord(timestamp=ts, hashtag=series.hashtag, location=series.location) for ts in stamps]


def truth_frame(scenarios: Sequence[SynthScenario]) -> pd.DataFrame:
    """Ground-truth table, one row per scenario."""
    rows = []
    for scenario in scenarios:
        truth = scenario.truth
        rows.append({
            "hashtag": scenario.hashtag,
            "location": scenario.location or "",
            "model": scenario.spec.kind,
            "beta": truth.beta,
            "decay": truth.decay,
            "s0": truth.s0,
            "i0": truth.i0,
            "sigma": truth.sigma,
            "R_true": scenario.truth_r,
        })
    return pd.DataFrame(rows, columns=TRUTH_COLS)
