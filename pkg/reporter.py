# -*- coding: utf-8 -*-
"""
Reporter Module
Writes pipeline results as CSV files and renders the plain-text corpus report.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

import pandas as pd

from analysis import CorpusSummary, infectious_fraction, scatter_table
from config import CSV_FLOAT_FORMAT, DEFAULT_THRESHOLD, SKIP_COLS, SUMMARY_COLS

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class HashtagReporter:
    """CSV exports and text reports for fit results."""

    @staticmethod
    def write_csv(frame: pd.DataFrame, path: PathLike) -> Path:
        """
        Write a table with a header row and fixed float formatting.

        Args:
            frame (pd.DataFrame): Table to write
            path (PathLike): Destination; parent directories are created

        Returns:
            Path: The written file
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
        logger.debug("wrote %d rows to %s", len(frame), path)
        return path

    @staticmethod
    def export_summary(rows: List[Dict], path: PathLike) -> Path:
        """Summary CSV, one row per (hashtag, location, model)."""
        frame = pd.DataFrame(rows, columns=SUMMARY_COLS)
        return HashtagReporter.write_csv(frame, path)

    @staticmethod
    def export_skips(rows: List[Dict], path: PathLike) -> Path:
        """Skip report with the reason each (hashtag, location, model) was not fitted."""
        frame = pd.DataFrame(rows, columns=SKIP_COLS)
        return HashtagReporter.write_csv(frame, path)

    @staticmethod
    def artifact_name(prefix: str, hashtag: str, location: Optional[str], model: Optional[str] = None) -> str:
        """File name for a per-fit artifact, e.g. `chain_tag_nyc_sir.csv`."""
        parts = [prefix, hashtag]
        if location:
            parts.append(location)
        if model:
            parts.append(model)
        safe = ["".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in part) for part in parts]
        return "_".join(safe) + ".csv"

    @staticmethod
    def generate_text_report(
        summary: CorpusSummary,
        threshold: float = DEFAULT_THRESHOLD,
        top_n: int = 10,
    ) -> str:
        """
        Generate a text-based corpus report.

        Args:
            summary (CorpusSummary): Corpus rows of one model
            threshold (float): ℛ cutoff for the infectious share
            top_n (int): Number of most infectious hashtags listed

        Returns:
            str: Formatted report
        """
        rows = summary.rows
        scatter = scatter_table(summary)
        decay_name = summary.model.decay_name

        report = []
        report.append("=" * 80)
        report.append(f"HASHTAG INFECTIOUSNESS REPORT ({summary.model.kind.upper()})")
        report.append("=" * 80)
        report.append("")

        report.append("SUMMARY STATISTICS")
        report.append("-" * 80)
        report.append(f"Hashtags fitted:            {len(rows)}")
        report.append(f"Median beta:                {rows['beta_med'].median():.4f} /h")
        report.append(f"Median {decay_name}:{' ' * (20 - len(decay_name))}{rows['decay_med'].median():.4f} /h")
        report.append(f"Median R:                   {rows['R_med'].median():.4f}")
        report.append(f"Above the 45° line:         {int(scatter['above_line'].sum())}")
        report.append(f"Share with R > {threshold:g}:{' ' * max(1, 12 - len(f'{threshold:g}'))}"
                      f"{infectious_fraction(summary, threshold):.2%}")
        report.append(f"Mean acceptance fraction:   {rows['accept_frac'].mean():.4f}")
        report.append("")

        report.append(f"TOP {top_n} MOST INFECTIOUS HASHTAGS (by median R)")
        report.append("-" * 80)
        top = rows.sort_values(["R_med", "hashtag"], ascending=[False, True]).head(top_n)
        for rank, (_, row) in enumerate(top.iterrows(), start=1):
            label = f"#{row['hashtag']}" + (f" @ {row['location']}" if row["location"] else "")
            report.append(f"\n{rank}. {label}")
            report.append(f"   R:     {row['R_med']:.4f}  [{row['R_lo']:.4f}, {row['R_hi']:.4f}]")
            report.append(f"   beta:  {row['beta_med']:.4f}")
            report.append(f"   {decay_name}:{' ' * (6 - len(decay_name))}{row['decay_med']:.4f}")

        report.append("")
        report.append("=" * 80)

        return "\n".join(report)
