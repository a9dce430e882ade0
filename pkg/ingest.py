# -*- coding: utf-8 -*-
"""
Ingest Module
Parses offline event dumps (NDJSON or CSV) into per-hashtag event series.
"""

import io
import json
import logging
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Callable, Iterable, List, Optional, TextIO, Tuple, Union

import numpy as np
import pandas as pd

from config import (
    CSV_OPTIONAL_COLUMNS,
    CSV_REQUIRED_COLUMNS,
    NDJSON_LOCATION_KEY,
    NDJSON_TAG_KEY,
    NDJSON_TIME_KEY,
)
from validators import EmptyInput, FormatError, check_positive

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EventRecord:
    """One timestamped hashtag occurrence (UTC, millisecond resolution)."""

    timestamp: pd.Timestamp
    hashtag: str
    location: Optional[str] = None


@dataclass
class EventSeries:
    """Event times of one (hashtag, location) in hours since its first event."""

    hashtag: str
    location: Optional[str]
    times: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.ndim != 1 or len(self.times) == 0:
            raise EmptyInput(f"event series for '{self.hashtag}' is empty")
        if np.any(np.diff(self.times) < 0):
            raise ValueError("event times must be sorted")
        if self.times[0] != 0.0:
            raise ValueError("event times must start at 0")

    def __len__(self) -> int:
        return len(self.times)

    @classmethod
    def from_hours(cls, hashtag: str, location: Optional[str], hours: Iterable[float]) -> "EventSeries":
        """
        Build a series from unsorted event times, rebasing the first event to 0.

        Args:
            hashtag (str): Normalized tag
            location (Optional[str]): Location label
            hours (Iterable[float]): Event times in hours on any origin

        Returns:
            EventSeries: Sorted, rebased series
        """
        times = np.sort(np.asarray(list(hours), dtype=float))
        if len(times) == 0:
            raise EmptyInput(f"no events for '{hashtag}'")
        return cls(hashtag=hashtag, location=location, times=times - times[0])


def normalize_hashtag(raw) -> str:
    """Case-fold a tag and strip its leading '#'."""
    if raw is None or (isinstance(raw, float) and math.isnan(raw)):
        return ""
    text = str(raw).strip()
    if text.startswith("#"):
        text = text[1:]
    return text.strip().casefold()


def normalize_location(raw) -> Optional[str]:
    if raw is None or (isinstance(raw, float) and math.isnan(raw)):
        return None
    text = str(raw).strip().casefold()
    return text or None


def format_timestamp(ts: pd.Timestamp) -> str:
    """Render a UTC timestamp as ISO-8601 with millisecond precision."""
    ts = pd.Timestamp(ts).tz_convert("UTC")
    return ts.strftime("%Y-%m-%dT%H:%M:%S.") + f"{ts.microsecond // 1000:03d}Z"


class EventReader:
    """Reads event dumps in NDJSON or CSV form into EventRecords."""

    @staticmethod
    def parse(source: Union[BinaryIO, bytes], file_format: str) -> Tuple[List[EventRecord], int]:
        """
        Parse a byte stream.

        Args:
            source (BinaryIO | bytes): UTF-8 encoded content
            file_format (str): 'ndjson' or 'csv'

        Returns:
            tuple: (records in input order, malformed line count)

        Raises:
            EmptyInput: If no valid record was found
            FormatError: If the content cannot be read as the declared format
        """
        readers = {
            "ndjson": EventReader.read_ndjson_text,
            "csv": EventReader.read_csv_text,
        }
        reader = readers.get(str(file_format).lower())
        if reader is None:
            raise FormatError(f"Unsupported event format: {file_format}")

        raw, malformed = reader(EventReader._decode(source))
        records, invalid = EventReader._to_records(raw)
        malformed += invalid

        if malformed:
            logger.warning("skipped %d malformed lines", malformed)
        if not records:
            raise EmptyInput("no valid event records in input")
        return records, malformed

    @staticmethod
    def _decode(source: Union[BinaryIO, bytes]) -> str:
        payload = source if isinstance(source, (bytes, bytearray)) else source.read()
        try:
            return bytes(payload).decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise FormatError(f"input is not valid UTF-8: {exc}")

    @staticmethod
    def read_ndjson_text(text: str) -> Tuple[pd.DataFrame, int]:
        """
        Split NDJSON text into raw (ts, tag, loc) rows.

        Returns:
            tuple: (raw DataFrame, count of lines that are not usable objects)
        """
        rows = []
        malformed = 0
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                malformed += 1
                continue
            if not isinstance(obj, dict) or NDJSON_TIME_KEY not in obj or NDJSON_TAG_KEY not in obj:
                malformed += 1
                continue
            rows.append({
                "ts": obj[NDJSON_TIME_KEY],
                "tag": obj[NDJSON_TAG_KEY],
                "loc": obj.get(NDJSON_LOCATION_KEY),
            })
        return pd.DataFrame(rows, columns=["ts", "tag", "loc"]), malformed

    @staticmethod
    def read_csv_text(text: str) -> Tuple[pd.DataFrame, int]:
        """
        Read CSV text with a required `timestamp,hashtag` header.

        Returns:
            tuple: (raw DataFrame, count of rows with the wrong field count)
        """
        if not text.strip():
            return pd.DataFrame(columns=["ts", "tag", "loc"]), 0

        bad_lines = []

        def _skip(fields):
            bad_lines.append(fields)
            return None

        try:
            df = pd.read_csv(
                io.StringIO(text),
                dtype=str,
                keep_default_na=False,
                skip_blank_lines=True,
                engine="python",
                on_bad_lines=_skip,
            )
        except pd.errors.ParserError as exc:
            raise FormatError(f"CSV could not be parsed: {exc}")

        df.columns = [str(col).strip().lower() for col in df.columns]
        missing = [col for col in CSV_REQUIRED_COLUMNS if col not in df.columns]
        if missing:
            raise FormatError(f"CSV header missing required columns: {missing}")

        location_col = CSV_OPTIONAL_COLUMNS[0]
        raw = pd.DataFrame({
            "ts": df["timestamp"],
            "tag": df["hashtag"],
            "loc": df[location_col] if location_col in df.columns else None,
        })
        return raw, len(bad_lines)

    @staticmethod
    def _to_records(raw: pd.DataFrame) -> Tuple[List[EventRecord], int]:
        """Convert raw rows into EventRecords, counting rows that fail validation."""
        if raw.empty:
            return [], 0

        ts_text = raw["ts"].where(raw["ts"].map(lambda v: isinstance(v, str)), None)
        timestamps = pd.to_datetime(ts_text, utc=True, errors="coerce", format="ISO8601").dt.floor("ms")
        tags = raw["tag"].map(normalize_hashtag)
        locations = raw["loc"].map(normalize_location)

        valid = timestamps.notna() & (tags != "")
        records = [
            EventRecord(timestamp=ts, hashtag=tag, location=loc)
            for ts, tag, loc in zip(timestamps[valid], tags[valid], locations[valid])
        ]
        return records, int((~valid).sum())

    @staticmethod
    def auto_detect_format(file_path: Union[str, Path]) -> str:
        """
        Detect the event format from a file extension.

        Raises:
            FormatError: If the extension is not recognised
        """
        format_map = {
            ".csv": "csv",
            ".ndjson": "ndjson",
            ".jsonl": "ndjson",
            ".json": "ndjson",
        }
        extension = Path(file_path).suffix.lower()
        file_format = format_map.get(extension)
        if not file_format:
            raise FormatError(f"Cannot auto-detect event format for extension: {extension}")
        return file_format


def parse_events(source: Union[BinaryIO, bytes], file_format: str) -> Tuple[List[EventRecord], int]:
    """
    Convenience function to parse an event stream.

    Args:
        source (BinaryIO | bytes): UTF-8 content
        file_format (str): 'ndjson' or 'csv'

    Returns:
        tuple: (list of EventRecord, malformed line count)
    """
    return EventReader.parse(source, file_format)


def read_events(file_path: Union[str, Path], file_format: Optional[str] = None) -> Tuple[List[EventRecord], int]:
    """
    Read an event file from disk.

    Raises:
        FileNotFoundError: If the path does not exist
    """
    path = Path(file_path)
    if not path.is_file():
        raise FileNotFoundError(f"File not found: {file_path}")
    if file_format is None:
        file_format = EventReader.auto_detect_format(path)
    with open(path, "rb") as handle:
        return EventReader.parse(handle, file_format)


def merge_records(batches: Iterable[List[EventRecord]]) -> List[EventRecord]:
    """Merge record batches into one list ordered by (timestamp, hashtag, location)."""
    merged = [record for batch in batches for record in batch]
    return sorted(merged, key=lambda r: (r.timestamp, r.hashtag, r.location or ""))


def group_by_hashtag(records: List[EventRecord]) -> List[EventSeries]:
    """
    Group records into one EventSeries per (hashtag, location).

    Args:
        records (List[EventRecord]): Parsed records, any order

    Returns:
        List[EventSeries]: Series sorted by (hashtag, location), times in hours
    """
    if not records:
        raise EmptyInput("cannot group an empty record list")

    df = pd.DataFrame({
        "timestamp": [r.timestamp for r in records],
        "hashtag": [r.hashtag for r in records],
        "location": [r.location or "" for r in records],
    })
    df["timestamp"] = pd.to_datetime(df["timestamp"], utc=True)

    series_list = []
    for (hashtag, location), group in df.groupby(["hashtag", "location"], sort=True):
        stamps = group["timestamp"].sort_values()
        hours = ((stamps - stamps.iloc[0]) / pd.Timedelta(hours=1)).to_numpy(dtype=float)
        series_list.append(EventSeries(hashtag=hashtag, location=location or None, times=hours))

    return series_list


def replay(
    records: List[EventRecord],
    speedup: Optional[float],
    sink: Callable[[EventRecord], None],
    sleep: Callable[[float], None] = time.sleep,
) -> int:
    """
    Deliver records to a sink in timestamp order, paced by their real gaps.

    Args:
        records (List[EventRecord]): Records in any order
        speedup (Optional[float]): Time compression factor; math.inf or None delivers at once
        sink (Callable): Consumer called once per record
        sleep (Callable): Delay function, injectable for tests

    Returns:
        int: Number of delivered records
    """
    paced = speedup is not None and not (isinstance(speedup, float) and math.isinf(speedup))
    if paced:
        speedup = check_positive(speedup, "speedup")

    delivered = 0
    previous = None
    for record in sorted(records, key=lambda r: r.timestamp):
        if paced and previous is not None:
            delay = (record.timestamp - previous).total_seconds() / speedup
            if delay > 0:
                sleep(delay)
        sink(record)
        delivered += 1
        previous = record.timestamp

    return delivered


def write_ndjson(records: Iterable[EventRecord], stream: TextIO) -> int:
    """
    Write records as normalized NDJSON (`ts`, `tag`, optional `loc`).

    Returns:
        int: Number of lines written
    """
    written = 0
    for record in records:
        obj = {NDJSON_TIME_KEY: format_timestamp(record.timestamp), NDJSON_TAG_KEY: record.hashtag}
        if record.location:
            obj[NDJSON_LOCATION_KEY] = record.location
        stream.write(json.dumps(obj, separators=(",", ":")) + "\n")
        written += 1
    return written
