# -*- coding: utf-8 -*-
"""
Corpus Analysis Module
Aggregates per-hashtag fit summaries: beta-vs-decay scatter, reproduction number
histograms, infectiousness classification and location comparisons.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

import numpy as np
import pandas as pd
from scipy.stats import mannwhitneyu, rankdata, tiecorrect

from config import (
    DEFAULT_BINS,
    DEFAULT_THRESHOLD,
    EDGE_SNAP_RTOL,
    HISTOGRAM_COLS,
    PARAM_NAMES,
    SCATTER_COLS,
    SUMMARY_COLS,
    TRACE_COLS,
)
from dynamics import ModelSpec
from inference import FitResult, best_fit_trajectory
from series import Occurrence
from validators import EmptyInput, FormatError, check_positive

logger = logging.getLogger(__name__)


@dataclass
class CorpusSummary:
    """Summary rows of one model across a corpus of hashtags."""

    rows: pd.DataFrame
    model: ModelSpec

    def __post_init__(self):
        if self.rows.empty:
            raise EmptyInput("corpus summary has no rows")
        models = set(self.rows["model"].astype(str).str.lower())
        if models != {self.model.kind}:
            raise ValueError(f"all rows must share model '{self.model.kind}', found {sorted(models)}")

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def r_values(self) -> np.ndarray:
        return self.rows["R_med"].to_numpy(dtype=float)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, model: Optional[Union[str, ModelSpec]] = None) -> "CorpusSummary":
        """
        Build a summary from summary-CSV rows, optionally selecting one model.

        Raises:
            EmptyInput: If no row matches
        """
        frame = frame.copy()
        frame["model"] = frame["model"].astype(str).str.lower()
        if model is None:
            kinds = frame["model"].unique()
            if len(kinds) != 1:
                raise ValueError(f"frame mixes models {sorted(kinds)}; pass one explicitly")
            spec = ModelSpec.parse(kinds[0])
        else:
            spec = model if isinstance(model, ModelSpec) else ModelSpec.parse(model)
            frame = frame[frame["model"] == spec.kind]
        return cls(rows=frame.reset_index(drop=True), model=spec)

    def by_location(self) -> Dict[str, "CorpusSummary"]:
        """Split the corpus per location label ('' for rows without one)."""
        locations = self.rows["location"].fillna("").astype(str)
        return {
            location: CorpusSummary(rows=group.reset_index(drop=True), model=self.model)
            for location, group in self.rows.groupby(locations, sort=True)
        }


def load_summaries(paths: Iterable[Union[str, Path]]) -> pd.DataFrame:
    """
    Read and concatenate summary CSVs.

    Raises:
        FileNotFoundError: If a path does not exist
        FormatError: If a file lacks summary columns
        EmptyInput: If every file is empty
    """
    frames = []
    for path in paths:
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"File not found: {path}")
        try:
            frame = pd.read_csv(path, dtype={"hashtag": str, "location": str}, keep_default_na=False)
        except pd.errors.EmptyDataError:
            logger.warning("%s is empty, skipping", path)
            continue
        missing = [col for col in SUMMARY_COLS if col not in frame.columns]
        if missing:
            raise FormatError(f"{path} is missing summary columns: {missing}")
        frames.append(frame)

    combined = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=SUMMARY_COLS)
    if combined.empty:
        raise EmptyInput("no summary rows found")
    logger.debug("loaded %d summary rows from %d files", len(combined), len(frames))
    return combined


def split_by_model(frame: pd.DataFrame) -> Dict[str, CorpusSummary]:
    """One CorpusSummary per model kind present in the frame."""
    kinds = sorted(frame["model"].astype(str).str.lower().unique())
    return {kind: CorpusSummary.from_frame(frame, kind) for kind in kinds}


def scatter_table(summary: CorpusSummary) -> pd.DataFrame:
    """
    Position of each hashtag relative to the 45° line in the (beta, decay) plane.

    above_line = beta_med > decay_med
    distance   = (beta_med - decay_med) / sqrt(2)   (signed perpendicular distance)
    """
    rows = summary.rows
    beta = rows["beta_med"].astype(float)
    decay = rows["decay_med"].astype(float)
    table = pd.DataFrame({
        "hashtag": rows["hashtag"],
        "location": rows["location"],
        "beta_med": beta,
        "decay_med": decay,
        "above_line": beta > decay,
        "distance": (beta - decay) / math.sqrt(2.0),
    })
    return table[SCATTER_COLS]


def histogram_edges(values: np.ndarray, bins: int, log_scale: bool) -> np.ndarray:
    """
    Bin edges spanning the data range, linear or geometric.

    A zero-width range is widened (±0.5 linear, x/2..2x geometric) so one bin holds the data.
    """
    low, high = float(np.min(values)), float(np.max(values))
    if log_scale:
        if low <= 0:
            raise ValueError("log-scale histogram needs positive values")
        if low == high:
            low, high = low / 2.0, high * 2.0
        edges = np.geomspace(low, high, bins + 1)
    else:
        if low == high:
            low, high = low - 0.5, high + 0.5
        edges = np.linspace(low, high, bins + 1)
    edges[0], edges[-1] = low, high
    return edges


def _snap_to_edges(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    nearest = np.clip(np.searchsorted(edges, values), 1, len(edges) - 1)
    snapped = values.copy()
    for candidate in (edges[nearest - 1], edges[nearest]):
        close = np.abs(values - candidate) <= EDGE_SNAP_RTOL * np.maximum(np.abs(candidate), 1e-300)
        snapped[close] = candidate[close]
    return snapped


def r_histogram(summary: CorpusSummary, bins: int = DEFAULT_BINS, log_scale: bool = False) -> pd.DataFrame:
    """
    Histogram of median reproduction numbers.

    Bins are right-closed, (lo, hi], except the first which also includes its
    lower edge; values within a 1e-9 relative tolerance of an edge count as on it.

    Args:
        summary (CorpusSummary): Corpus rows
        bins (int): Number of bins
        log_scale (bool): Geometric instead of linear bins

    Returns:
        pd.DataFrame: bin_lo, bin_hi, count (counts sum to the row count)
    """
    bins = int(check_positive(bins, "bins"))
    values = summary.r_values
    edges = histogram_edges(values, bins, log_scale)
    snapped = _snap_to_edges(values, edges)
    index = np.clip(np.searchsorted(edges, snapped, side="left") - 1, 0, bins - 1)
    counts = np.bincount(index, minlength=bins)
    return pd.DataFrame({"bin_lo": edges[:-1], "bin_hi": edges[1:], "count": counts}, columns=HISTOGRAM_COLS)


def infectious_fraction(summary: CorpusSummary, threshold: float = DEFAULT_THRESHOLD) -> float:
    """Share of hashtags (rows, not event volume) whose median ℛ exceeds the threshold."""
    return float(np.mean(summary.r_values > threshold))


@dataclass
class LocationComparison:
    """Descriptive two-sample summary of ℛ between two locations."""

    label_a: str
    label_b: str
    n_a: int
    n_b: int
    median_a: float
    median_b: float
    iqr_a: float
    iqr_b: float
    u_statistic: float
    z_score: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{
            "location_a": self.label_a,
            "location_b": self.label_b,
            "n_a": self.n_a,
            "n_b": self.n_b,
            "median_a": self.median_a,
            "median_b": self.median_b,
            "iqr_a": self.iqr_a,
            "iqr_b": self.iqr_b,
            "U": self.u_statistic,
            "z": self.z_score,
        }])


def _iqr(values: np.ndarray) -> float:
    q1, q3 = np.quantile(values, [0.25, 0.75])
    return float(q3 - q1)


def compare_locations(
    a: CorpusSummary,
    b: CorpusSummary,
    label_a: str = "a",
    label_b: str = "b",
) -> LocationComparison:
    """
    Compare the ℛ distributions of two corpora.

    U is the Mann-Whitney statistic of `a`; its normal approximation
    z = (U - n_a n_b / 2) / sqrt(T n_a n_b (n + 1) / 12) uses the tie correction T.

    Args:
        a (CorpusSummary): First group
        b (CorpusSummary): Second group
        label_a (str): Name of the first group
        label_b (str): Name of the second group

    Returns:
        LocationComparison: Medians, IQRs, U and z
    """
    x, y = a.r_values, b.r_values
    n_a, n_b = len(x), len(y)

    u_statistic = float(mannwhitneyu(x, y, alternative="two-sided").statistic)
    tie_factor = tiecorrect(rankdata(np.concatenate([x, y])))
    spread = math.sqrt(tie_factor * n_a * n_b * (n_a + n_b + 1) / 12.0)
    z_score = (u_statistic - n_a * n_b / 2.0) / spread if spread > 0 else 0.0

    return LocationComparison(
        label_a=label_a,
        label_b=label_b,
        n_a=n_a,
        n_b=n_b,
        median_a=float(np.median(x)),
        median_b=float(np.median(y)),
        iqr_a=_iqr(x),
        iqr_b=_iqr(y),
        u_statistic=u_statistic,
        z_score=float(z_score),
    )


def trace_table(occ: Occurrence, result: FitResult) -> pd.DataFrame:
    """Observed occurrence counts next to the best-fit model curve I(t)."""
    trajectory = best_fit_trajectory(result, occ)
    return pd.DataFrame({
        TRACE_COLS[0]: occ.times,
        TRACE_COLS[1]: occ.counts,
        TRACE_COLS[2]: trajectory.I,
    })


def correlation_table(result: FitResult) -> pd.DataFrame:
    """Pairwise posterior correlations in long form."""
    matrix = result.correlations
    rows: List[dict] = []
    for i, first in enumerate(PARAM_NAMES):
        for j in range(i + 1, len(PARAM_NAMES)):
            rows.append({"param_a": first, "param_b": PARAM_NAMES[j], "correlation": float(matrix[i, j])})
    return pd.DataFrame(rows, columns=["param_a", "param_b", "correlation"])
