# -*- coding: utf-8 -*-
"""
Series Module
Turns discrete event series into smoothed intensity series and extracts the
infectious occurrence around the activity peak.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from config import CSV_FLOAT_FORMAT, DEFAULT_FRACTION, DEFAULT_STEP_HOURS, DEFAULT_WINDOW_HOURS, SERIES_COLS
from ingest import EventSeries
from validators import AllZero, check_fraction, check_positive, check_window

logger = logging.getLogger(__name__)

# grid end may overshoot the last event by at most this share of a step
_GRID_TOLERANCE = 1e-9


@dataclass
class IntensitySeries:
    """Event rate (events/hour) on a uniform grid."""

    hashtag: str
    location: Optional[str]
    start: float
    step: float
    values: np.ndarray
    window: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        check_positive(self.step, "step")
        check_positive(self.window, "window")
        if len(self.values) < 2:
            raise ValueError("intensity series needs at least 2 grid points")
        if np.any(self.values < 0):
            raise ValueError("intensity values must be non-negative")

    @property
    def count(self) -> int:
        return len(self.values)

    @property
    def times(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({SERIES_COLS[0]: self.times, SERIES_COLS[1]: self.values})


@dataclass
class Occurrence:
    """The [t1, t2] slice of an intensity series around its global maximum."""

    parent: IntensitySeries
    start_index: int
    peak_index: int
    end_index: int
    clamped_start: bool = False
    clamped_end: bool = False

    @property
    def t1(self) -> float:
        return float(self.parent.times[self.start_index])

    @property
    def t2(self) -> float:
        return float(self.parent.times[self.end_index])

    @property
    def peak_time(self) -> float:
        return float(self.parent.times[self.peak_index])

    @property
    def peak_value(self) -> float:
        return float(self.parent.values[self.peak_index])

    @property
    def values(self) -> np.ndarray:
        return self.parent.values[self.start_index:self.end_index + 1]

    @property
    def times(self) -> np.ndarray:
        return self.parent.times[self.start_index:self.end_index + 1]

    @property
    def window(self) -> float:
        return self.parent.window

    @property
    def counts(self) -> np.ndarray:
        """Expected events per window at each grid time (rate x window)."""
        return self.values * self.parent.window

    @property
    def low_information(self) -> bool:
        return self.clamped_start or self.clamped_end

    def as_series(self) -> IntensitySeries:
        """The occurrence slice as a standalone series (padded to 2 points if needed)."""
        values = self.values
        if len(values) < 2:
            values = np.append(values, 0.0)
        return IntensitySeries(
            hashtag=self.parent.hashtag,
            location=self.parent.location,
            start=self.t1,
            step=self.parent.step,
            values=values,
            window=self.parent.window,
        )


def smooth(
    series: EventSeries,
    window: float = DEFAULT_WINDOW_HOURS,
    step: float = DEFAULT_STEP_HOURS,
) -> IntensitySeries:
    """
    Centered boxcar rate estimate on a uniform grid.

    value(t) = #events in [t - window/2, t + window/2] / window

    Args:
        series (EventSeries): Events in hours, first event at 0
        window (float): Boxcar width in hours
        step (float): Grid spacing in hours

    Returns:
        IntensitySeries: Grid covering [0, last event]

    Raises:
        InvalidWindow: If window <= 0, step <= 0 or step > window
    """
    check_window(window, step)

    times = np.sort(series.times)
    last = float(times[-1])
    count = int(math.ceil(last / step - _GRID_TOLERANCE)) + 1
    grid = step * np.arange(max(count, 1))

    half = window / 2.0
    lo = np.searchsorted(times, grid - half, side="left")
    hi = np.searchsorted(times, grid + half, side="right")
    values = (hi - lo) / window

    # degenerate single-point grid: pad with a zero-valued point
    if len(values) < 2:
        values = np.append(values, 0.0)

    return IntensitySeries(
        hashtag=series.hashtag,
        location=series.location,
        start=0.0,
        step=step,
        values=values,
        window=window,
    )


def window_sweep(
    series: EventSeries,
    windows: Sequence[float],
    step: Optional[float] = None,
) -> Dict[float, IntensitySeries]:
    """
    Smooth one event series with several window widths.

    Args:
        series (EventSeries): Events to smooth
        windows (Sequence[float]): Window widths in hours
        step (Optional[float]): Grid spacing; defaults to a quarter of each window

    Returns:
        Dict[float, IntensitySeries]: One smoothed series per window
    """
    swept = {}
    for window in windows:
        grid_step = step if step is not None else window / 4.0
        swept[float(window)] = smooth(series, window=window, step=min(grid_step, window))
    return swept


def window_sweep_table(swept: Dict[float, IntensitySeries]) -> pd.DataFrame:
    """Tabulate peak rate and peak time per smoothing window."""
    rows = []
    for window, intensity in sorted(swept.items()):
        peak = int(np.argmax(intensity.values))
        rows.append({
            "window": window,
            "peak_time": float(intensity.times[peak]),
            "peak_value": float(intensity.values[peak]),
            "grid_points": intensity.count,
        })
    return pd.DataFrame(rows, columns=["window", "peak_time", "peak_value", "grid_points"])


def extract_occurrence(series: IntensitySeries, fraction: float = DEFAULT_FRACTION) -> Occurrence:
    """
    Extract the occurrence around the global maximum.

    1. find the maximum (earliest index on ties)
    2. backwards from it, the latest point <= fraction x max is t1 (else grid start)
    3. forwards from it, the earliest point <= fraction x max is t2 (else grid end)

    Args:
        series (IntensitySeries): Smoothed series
        fraction (float): Threshold as a share of the peak value, in (0, 1)

    Returns:
        Occurrence: Slice on [t1, t2]

    Raises:
        AllZero: If every value is 0
    """
    check_fraction(fraction, "fraction")
    values = series.values
    if not np.any(values > 0):
        raise AllZero(f"series '{series.hashtag}' has no positive value")

    peak = int(np.argmax(values))
    threshold = fraction * values[peak]

    below = np.flatnonzero(values <= threshold)
    before = below[below < peak]
    after = below[below > peak]

    start = int(before[-1]) if len(before) else 0
    end = int(after[0]) if len(after) else len(values) - 1

    occ = Occurrence(
        parent=series,
        start_index=start,
        peak_index=peak,
        end_index=end,
        clamped_start=len(before) == 0,
        clamped_end=len(after) == 0,
    )
    logger.debug(
        "occurrence %s: t1=%.3f peak=%.3f t2=%.3f", series.hashtag, occ.t1, occ.peak_time, occ.t2
    )
    return occ


def occurrence_counts(occ: Occurrence) -> List[Tuple[float, float]]:
    """
    Convert an occurrence to (grid time, expected events per window) pairs.

    Args:
        occ (Occurrence): Extracted occurrence

    Returns:
        List[Tuple[float, float]]: (t_hours, rate x window)
    """
    return [(float(t), float(c)) for t, c in zip(occ.times, occ.counts)]


def write_series_csv(series: IntensitySeries, path: Union[str, Path]) -> None:
    """Write an intensity series as `t_hours,value` CSV."""
    series.to_frame().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)


def write_occurrence_csv(occ: Occurrence, path: Union[str, Path]) -> None:
    """Write an occurrence as CSV with a `# hashtag=... t1=... t2=... window=...` header line."""
    frame = pd.DataFrame({SERIES_COLS[0]: occ.times, SERIES_COLS[1]: occ.values})
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(
            f"# hashtag={occ.parent.hashtag} t1={occ.t1:.10g} t2={occ.t2:.10g} window={occ.window:.10g}\n"
        )
        frame.to_csv(handle, index=False, float_format=CSV_FLOAT_FORMAT)
