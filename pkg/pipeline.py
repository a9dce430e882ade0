# -*- coding: utf-8 -*-
"""
Fit Engine Module
Orchestrates smoothing, occurrence extraction and model fitting over every
(hashtag, location, model) of a corpus, optionally on a process pool.
"""

import logging
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from analysis import correlation_table, trace_table
from config_loader import PipelineConfig
from dynamics import ModelSpec
from inference import FitConfig, FitResult, fit
from ingest import EventSeries
from reporter import HashtagReporter
from config import SWEEP_WINDOWS_HOURS
from series import (
    Occurrence,
    extract_occurrence,
    smooth,
    window_sweep,
    window_sweep_table,
    write_occurrence_csv,
    write_series_csv,
)
from validators import PipelineError

logger = logging.getLogger(__name__)


def derive_seed(seed: int, hashtag: str, location: Optional[str], model: str) -> int:
    """Per-fit seed that depends only on the run seed and the fit's identity."""
    key = zlib.crc32(f"{hashtag}|{location or ''}|{model}".encode("utf-8"))
    return int(np.random.SeedSequence([int(seed), key]).generate_state(1)[0])


@dataclass(frozen=True)
class FitTask:
    """Everything a worker needs to fit one (hashtag, location, model)."""

    series: EventSeries
    spec: ModelSpec
    window: float
    step: float
    fraction: float
    fit_config: FitConfig


@dataclass
class FitOutcome:
    """Result of one task: a FitResult or the reason it was skipped."""

    hashtag: str
    location: Optional[str]
    model: str
    result: Optional[FitResult] = None
    occurrence: Optional[Occurrence] = None
    reason: Optional[str] = None

    @property
    def succeeded(self) -> bool:
        return self.result is not None


def fit_one(task: FitTask) -> FitOutcome:
    """
    Smooth, extract and fit one event series.

    Domain errors become a skip reason; anything else propagates.
    """
    series = task.series
    outcome = FitOutcome(hashtag=series.hashtag, location=series.location, model=task.spec.kind)
    try:
        intensity = smooth(series, window=task.window, step=task.step)
        outcome.occurrence = extract_occurrence(intensity, task.fraction)
        outcome.result = fit(outcome.occurrence, task.spec, task.fit_config)
    except PipelineError as exc:
        outcome.reason = f"{type(exc).__name__}: {exc}"
    return outcome


class FitEngine:
    """Runs the per-hashtag fits of a corpus."""

    def __init__(self, config: PipelineConfig):
        """
        Initialize the fit engine.

        Args:
            config (PipelineConfig): Resolved pipeline settings
        """
        self.config = config
        self.outcomes: List[FitOutcome] = []
        self.series_by_key: Dict[Tuple[str, Optional[str]], EventSeries] = {}

    def plan(self, series_list: List[EventSeries]) -> List[FitTask]:
        """One task per (hashtag, location, model), ordered by that key."""
        ordered = sorted(series_list, key=lambda s: (s.hashtag, s.location or ""))
        tasks = []
        for series in ordered:
            for spec in self.config.models:
                seed = derive_seed(self.config.fit.seed, series.hashtag, series.location, spec.kind)
                tasks.append(FitTask(
                    series=series,
                    spec=spec,
                    window=self.config.window,
                    step=self.config.step,
                    fraction=self.config.fraction,
                    fit_config=replace(self.config.fit, seed=seed),
                ))
        return tasks

    def run(self, series_list: List[EventSeries]) -> List[FitOutcome]:
        """
        Fit every task, in parallel when jobs > 1.

        Returns:
            List[FitOutcome]: Outcomes in task order, independent of `jobs`
        """
        tasks = self.plan(series_list)
        self.series_by_key = {(s.hashtag, s.location): s for s in series_list}
        logger.info("fitting %d task(s) with %d job(s)", len(tasks), self.config.jobs)

        if self.config.jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=self.config.jobs) as pool:
                outcomes = list(pool.map(fit_one, tasks))
        else:
            outcomes = [fit_one(task) for task in tasks]

        for outcome in outcomes:
            label = f"{outcome.hashtag}/{outcome.location or '-'}/{outcome.model}"
            if outcome.succeeded:
                logger.info(
                    "  ✓ %s: R=%.4f accept=%.3f", label,
                    outcome.result.r_number, outcome.result.acceptance_fraction,
                )
            else:
                logger.warning("  ✗ %s skipped (%s)", label, outcome.reason)

        self.outcomes = outcomes
        return outcomes

    def summary_rows(self) -> List[Dict]:
        return [o.result.summary_row() for o in self.outcomes if o.succeeded]

    def skip_rows(self) -> List[Dict]:
        return [
            {"hashtag": o.hashtag, "location": o.location or "", "model": o.model, "reason": o.reason}
            for o in self.outcomes if not o.succeeded
        ]

    def write_outputs(self, out_dir: Path, chains: bool = False, traces: bool = False) -> Dict[str, Path]:
        """
        Write summary.csv and skipped.csv, plus per-fit chain and trace files on request.

        Args:
            out_dir (Path): Output directory
            chains (bool): Write full post-burn-in chains
            traces (bool): Write occurrence, trace and correlation tables per fit, plus the
                smoothed series and a smoothing-window sweep per (hashtag, location)

        Returns:
            Dict[str, Path]: Paths of the summary and skip files
        """
        out_dir = Path(out_dir)
        written = {
            "summary": HashtagReporter.export_summary(self.summary_rows(), out_dir / "summary.csv"),
            "skipped": HashtagReporter.export_skips(self.skip_rows(), out_dir / "skipped.csv"),
        }

        artifact = HashtagReporter.artifact_name
        for outcome in self.outcomes:
            if not outcome.succeeded:
                continue
            key = (outcome.hashtag, outcome.location, outcome.model)
            if chains:
                chain_path = out_dir / "chains" / artifact("chain", *key)
                HashtagReporter.write_csv(outcome.result.chain_frame(), chain_path)
            if traces:
                trace_dir = out_dir / "traces"
                trace_dir.mkdir(parents=True, exist_ok=True)
                write_occurrence_csv(outcome.occurrence, trace_dir / artifact("occurrence", *key))
                trace = trace_table(outcome.occurrence, outcome.result)
                HashtagReporter.write_csv(trace, trace_dir / artifact("trace", *key))
                HashtagReporter.write_csv(correlation_table(outcome.result), trace_dir / artifact("corr", *key))

        if traces:
            self.write_window_sweeps(out_dir / "traces")

        return written

    def write_window_sweeps(self, trace_dir: Path) -> None:
        """Smoothed series and peak-per-window table for every fitted (hashtag, location)."""
        artifact = HashtagReporter.artifact_name
        windows = sorted(set(SWEEP_WINDOWS_HOURS) | {self.config.window})
        fitted = sorted({(o.hashtag, o.location or "") for o in self.outcomes if o.succeeded})
        for hashtag, location in fitted:
            series = self.series_by_key.get((hashtag, location or None))
            if series is None:
                continue
            swept = window_sweep(series, windows, step=self.config.step)
            write_series_csv(swept[self.config.window], trace_dir / artifact("series", hashtag, location))
            HashtagReporter.write_csv(window_sweep_table(swept), trace_dir / artifact("sweep", hashtag, location))
