"""
Ingestion of historic grid telemetry into a canonical five-minute year.

Raw exports (Gridwatch-style CSV, MW) are parsed with an external column
mapping, snapped onto a 300 s grid that starts on the first Monday of the
year, cleaned, and gap-filled.  The result is a :class:`YearDataset` of
exactly 52 weeks x 2016 intervals.

Canonical file layout::

    timestamp_utc,demand_gw,nuclear_gw,wind_gw,solar_gw
    2017-01-02T00:00:00Z,32.760,7.800,4.125,0.000
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

INTERVAL_SECONDS = 300
INTERVALS_PER_DAY = 288
INTERVALS_PER_WEEK = 2016
WEEKS_PER_YEAR = 52
INTERVALS_PER_YEAR = WEEKS_PER_YEAR * INTERVALS_PER_WEEK  # 104,832

MAX_INTERPOLATED_GAP_SECONDS = 3600
SPIKE_PERCENTILE = 99.9
SPIKE_FACTOR = 3.0
MAX_SYNTHESIZED_FRACTION = 0.05

POWER_COLUMNS = ("demand", "nuclear", "wind", "solar")
CANONICAL_HEADER = ("timestamp_utc", "demand_gw", "nuclear_gw", "wind_gw", "solar_gw")


class ConfigurationError(ValueError):
    """Bad column mapping, missing column or unreadable config."""


class DataQualityError(ValueError):
    """Raw data is too sparse or malformed to produce a canonical year."""

    def __init__(self, message: str, fraction: float | None = None):
        super().__init__(message)
        self.fraction = fraction


@dataclass(frozen=True, slots=True)
class GridRecord:
    timestamp: datetime
    demand: float
    nuclear: float
    wind: float
    solar: float


@dataclass(frozen=True)
class ColumnMapping:
    """Source column names for each canonical field, plus the power unit."""

    timestamp: str = "timestamp_utc"
    demand: str = "demand_gw"
    nuclear: str = "nuclear_gw"
    wind: str = "wind_gw"
    solar: str = "solar_gw"
    unit: str = "GW"
    delimiter: str = ","

    def __post_init__(self):
        if self.unit.upper() not in ("MW", "GW"):
            raise ConfigurationError(f"unit must be MW or GW, got {self.unit!r}")

    @property
    def divisor(self) -> float:
        return 1000.0 if self.unit.upper() == "MW" else 1.0

    @classmethod
    def gridwatch(cls) -> "ColumnMapping":
        return cls(timestamp="timestamp", demand="demand", nuclear="nuclear",
                   wind="wind", solar="solar", unit="MW")


def parse_key_values(text: str) -> dict[str, str]:
    """Parse ``key = value`` / ``key: value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        seps = [i for i in (line.find("="), line.find(":")) if i > 0]
        if not seps:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw!r}")
        i = min(seps)
        key, value = line[:i].strip(), line[i + 1:].strip()
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "'\"":
            value = value[1:-1]
        out[key.lower()] = value
    return out


def load_mapping(path: str | Path) -> ColumnMapping:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read mapping file {path}: {exc}") from exc
    kv = parse_key_values(text)
    known = {"timestamp", "demand", "nuclear", "wind", "solar", "unit", "delimiter"}
    unknown = set(kv) - known
    if unknown:
        raise ConfigurationError(f"unknown mapping keys: {sorted(unknown)}")
    if kv.get("delimiter") in ("\\t", "tab"):
        kv["delimiter"] = "\t"
    return ColumnMapping(**kv)


def parse_timestamp(text: str) -> datetime:
    """ISO-8601 / RFC 3339 timestamp; naive values are taken as UTC."""
    text = text.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_raw(stream: str | io.TextIOBase, mapping: ColumnMapping
              ) -> tuple[list[GridRecord], list[tuple[int, str]]]:
    """Parse delimited text into records (GW), in file order.

    Returns ``(records, rejects)`` where each reject is ``(line_number, reason)``.
    Rows with unparseable or non-finite numbers are rejected rather than raised.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.reader(stream, delimiter=mapping.delimiter)
    header = next(reader, None)
    if header is None or not any(h.strip() for h in header):
        raise DataQualityError("empty input: no header row")
    header = [h.strip() for h in header]

    wanted = {name: getattr(mapping, name) for name in ("timestamp",) + POWER_COLUMNS}
    index = {}
    for name, column in wanted.items():
        if column not in header:
            raise ConfigurationError(f"mapped column {column!r} ({name}) not in header {header}")
        index[name] = header.index(column)

    divisor = mapping.divisor
    records: list[GridRecord] = []
    rejects: list[tuple[int, str]] = []
    for row in reader:
        lineno = reader.line_num
        if not row or not any(c.strip() for c in row):
            continue
        try:
            ts = parse_timestamp(row[index["timestamp"]])
            values = []
            for name in POWER_COLUMNS:
                v = float(row[index[name]])
                if not math.isfinite(v):
                    raise ValueError(f"{name} is not finite")
                values.append(v / divisor)
        except (ValueError, IndexError) as exc:
            rejects.append((lineno, str(exc)))
            continue
        records.append(GridRecord(ts, *values))
    if not records and not rejects:
        raise DataQualityError("empty input: header but no data rows")
    return records, rejects


@dataclass(frozen=True, eq=False)
class YearDataset:
    """Column-oriented canonical record at a fixed 300 s cadence.

    Arrays are read-only.  A full modelled year has 104,832 intervals; shorter
    whole-week datasets are accepted for synthetic experiments.
    """

    start: datetime
    demand: np.ndarray
    nuclear: np.ndarray
    wind: np.ndarray
    solar: np.ndarray
    year_label: str = ""
    synthesized_fraction: float = 0.0
    rejected_rows: int = field(default=0, compare=False)

    def __post_init__(self):
        n = len(self.demand)
        if n == 0:
            raise DataQualityError("dataset has no intervals")
        for name in POWER_COLUMNS:
            arr = np.array(getattr(self, name), dtype=np.float64)
            if arr.shape != (n,):
                raise DataQualityError(f"column {name} has shape {arr.shape}, expected ({n},)")
            if not np.all(np.isfinite(arr)):
                raise DataQualityError(f"column {name} contains missing or non-finite values")
            if np.any(arr < 0):
                raise DataQualityError(f"column {name} contains negative values")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.start.tzinfo is None:
            object.__setattr__(self, "start", self.start.replace(tzinfo=timezone.utc))

    @property
    def interval_count(self) -> int:
        return len(self.demand)

    @property
    def headroom(self) -> np.ndarray:
        return self.demand - self.nuclear

    def timestamp(self, i: int) -> datetime:
        return self.start + timedelta(seconds=INTERVAL_SECONDS * i)

    def epoch_seconds(self) -> np.ndarray:
        t0 = int(self.start.timestamp())
        return t0 + INTERVAL_SECONDS * np.arange(self.interval_count, dtype=np.int64)

    def __len__(self):
        return self.interval_count

    def __getitem__(self, i: int) -> GridRecord:
        return GridRecord(self.timestamp(i), float(self.demand[i]), float(self.nuclear[i]),
                          float(self.wind[i]), float(self.solar[i]))

    def __iter__(self) -> Iterator[GridRecord]:
        return (self[i] for i in range(self.interval_count))

    def slice(self, lo: int, hi: int) -> "YearDataset":
        return YearDataset(self.timestamp(lo), self.demand[lo:hi], self.nuclear[lo:hi],
                           self.wind[lo:hi], self.solar[lo:hi], self.year_label)

    def means(self) -> dict[str, float]:
        return {name: math.fsum(getattr(self, name)) / self.interval_count
                for name in POWER_COLUMNS}


@dataclass(frozen=True, eq=False)
class WeekSeries:
    week_index: int  # 1-based
    first_interval: int
    data: YearDataset

    @property
    def wind(self) -> np.ndarray:
        return self.data.wind

    @property
    def solar(self) -> np.ndarray:
        return self.data.solar

    @property
    def demand(self) -> np.ndarray:
        return self.data.demand

    @property
    def start(self) -> datetime:
        return self.data.start


@dataclass(frozen=True, eq=False)
class SeasonalFactors:
    factor: np.ndarray

    def __post_init__(self):
        arr = np.array(self.factor, dtype=np.float64)
        if arr.ndim != 1 or len(arr) == 0 or np.any(arr <= 0) or not np.all(np.isfinite(arr)):
            raise ValueError("seasonal factors must be a non-empty vector of positive numbers")
        arr.setflags(write=False)
        object.__setattr__(self, "factor", arr)

    @classmethod
    def constant(cls, weeks: int = WEEKS_PER_YEAR) -> "SeasonalFactors":
        return cls(np.ones(weeks))

    def __len__(self):
        return len(self.factor)


def first_monday(year: int) -> datetime:
    jan1 = datetime(year, 1, 1, tzinfo=timezone.utc)
    return jan1 + timedelta(days=(7 - jan1.weekday()) % 7)


def _modelled_year(epoch: np.ndarray) -> int:
    # Median record decides the year, so a stray record from the neighbouring
    # year at either end of an export does not shift the alignment.
    mid = int(np.median(epoch))
    return datetime.fromtimestamp(mid, tz=timezone.utc).year


def _spikes(values: np.ndarray) -> np.ndarray:
    valid = values[~np.isnan(values)]
    if len(valid) == 0:
        return np.zeros(len(values), dtype=bool)
    limit = SPIKE_FACTOR * np.percentile(valid, SPIKE_PERCENTILE)
    if limit <= 0:
        return np.zeros(len(values), dtype=bool)
    with np.errstate(invalid="ignore"):
        return values > limit


def _nan_runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Half-open [lo, hi) runs where mask is True."""
    padded = np.concatenate(([False], mask, [False]))
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    return list(zip(edges[0::2].tolist(), edges[1::2].tolist()))


def fill_gaps(values: np.ndarray) -> np.ndarray:
    """Fill NaNs: short interior gaps by interpolation, the rest by week copies."""
    x = values.copy()
    n = len(x)
    max_missing = MAX_INTERPOLATED_GAP_SECONDS // INTERVAL_SECONDS - 1
    for lo, hi in _nan_runs(np.isnan(x)):
        if lo > 0 and hi < n and hi - lo <= max_missing:
            span = hi - lo + 1
            w = np.arange(1, span) / span
            x[lo:hi] = x[lo - 1] + w * (x[hi] - x[lo - 1])
    for i in np.flatnonzero(np.isnan(x)):
        if i >= INTERVALS_PER_WEEK and not np.isnan(x[i - INTERVALS_PER_WEEK]):
            x[i] = x[i - INTERVALS_PER_WEEK]
    for i in np.flatnonzero(np.isnan(x))[::-1]:
        if i + INTERVALS_PER_WEEK < n and not np.isnan(x[i + INTERVALS_PER_WEEK]):
            x[i] = x[i + INTERVALS_PER_WEEK]
    rest = np.isnan(x)
    if rest.any():
        known = np.flatnonzero(~rest)
        if len(known) == 0:
            raise DataQualityError("column has no usable values")
        x[rest] = np.interp(np.flatnonzero(rest), known, x[known])
    return x


def clean_resample(raw: Sequence[GridRecord], rejected_rows: int = 0) -> YearDataset:
    """Snap raw records onto the canonical 52-week grid and repair them.

    Each record is assigned to its nearest 300 s slot from the first Monday
    00:00 UTC of the modelled year; the first record per slot wins.  Spikes
    are treated as gaps, gaps are filled, negatives are clamped to zero and
    nuclear is capped at demand.
    """
    if len(raw) == 0:
        raise DataQualityError("no records to clean")
    epoch = np.array([r.timestamp.timestamp() for r in raw], dtype=np.float64)
    cols = {name: np.array([getattr(r, name) for r in raw], dtype=np.float64)
            for name in POWER_COLUMNS}

    year = _modelled_year(epoch)
    start = first_monday(year)
    slot = np.rint((epoch - start.timestamp()) / INTERVAL_SECONDS).astype(np.int64)

    order = np.argsort(slot, kind="stable")
    slot = slot[order]
    in_year = (slot >= 0) & (slot < INTERVALS_PER_YEAR)
    keep = order[in_year]
    slot = slot[in_year]
    first = np.ones(len(slot), dtype=bool)
    first[1:] = slot[1:] != slot[:-1]
    keep, slot = keep[first], slot[first]

    grid = {}
    synthesized = np.ones(INTERVALS_PER_YEAR, dtype=bool)
    synthesized[slot] = False
    for name, values in cols.items():
        g = np.full(INTERVALS_PER_YEAR, np.nan)
        g[slot] = values[keep]
        spikes = _spikes(g)
        g[spikes] = np.nan
        synthesized |= spikes
        grid[name] = g

    fraction = float(synthesized.mean())
    if fraction > MAX_SYNTHESIZED_FRACTION:
        raise DataQualityError(
            f"{fraction:.2%} of intervals would be synthesized "
            f"(limit {MAX_SYNTHESIZED_FRACTION:.0%})", fraction)

    for name in POWER_COLUMNS:
        grid[name] = np.maximum(fill_gaps(grid[name]), 0.0)
    grid["nuclear"] = np.minimum(grid["nuclear"], grid["demand"])
    return YearDataset(start, year_label=str(year), synthesized_fraction=fraction,
                       rejected_rows=rejected_rows, **grid)


def partition_weeks(ds: YearDataset) -> list[WeekSeries]:
    """Contiguous 2016-interval weeks, at most 52; any remainder is dropped."""
    count = min(ds.interval_count // INTERVALS_PER_WEEK, WEEKS_PER_YEAR)
    return [WeekSeries(w + 1, w * INTERVALS_PER_WEEK,
                       ds.slice(w * INTERVALS_PER_WEEK, (w + 1) * INTERVALS_PER_WEEK))
            for w in range(count)]


def seasonal_factors(ds: YearDataset) -> SeasonalFactors:
    """Weekly mean demand relative to the annual mean, renormalised to average 1."""
    weeks = partition_weeks(ds)
    if not weeks:
        raise DataQualityError("dataset shorter than one week")
    week_means = np.array([math.fsum(w.demand) / len(w.demand) for w in weeks])
    annual = math.fsum(week_means) / len(week_means)
    if annual <= 0:
        raise DataQualityError("annual mean demand is zero")
    factor = week_means / annual
    return SeasonalFactors(factor / (math.fsum(factor) / len(factor)))


def format_value(x: float) -> str:
    """Shortest round-trip decimal, padded to at least three fractional digits."""
    s = np.format_float_positional(x, unique=True, trim="-")
    whole, _, frac = s.partition(".")
    return f"{whole}.{frac.ljust(3, '0')}"


def write_canonical(ds: YearDataset, path: str | Path) -> None:
    t0 = int(ds.start.timestamp())
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(CANONICAL_HEADER) + "\n")
        for i in range(ds.interval_count):
            ts = datetime.fromtimestamp(t0 + INTERVAL_SECONDS * i, tz=timezone.utc)
            fh.write(f"{format_timestamp(ts)},{format_value(ds.demand[i])},"
                     f"{format_value(ds.nuclear[i])},{format_value(ds.wind[i])},"
                     f"{format_value(ds.solar[i])}\n")


def read_canonical(path: str | Path) -> YearDataset:
    """Load a canonical dataset file written by :func:`write_canonical`."""
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataQualityError(f"cannot read dataset {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CANONICAL_HEADER:
            raise DataQualityError(f"{path}: header must be {','.join(CANONICAL_HEADER)}")
        rows = list(reader)
    if not rows:
        raise DataQualityError(f"{path}: no data rows")
    try:
        start = parse_timestamp(rows[0][0])
        values = np.array([[float(v) for v in row[1:5]] for row in rows], dtype=np.float64)
        epoch = np.array([parse_timestamp(row[0]).timestamp() for row in rows])
    except (ValueError, IndexError) as exc:
        raise DataQualityError(f"{path}: malformed row: {exc}") from exc
    if len(epoch) > 1 and not np.all(np.diff(epoch) == INTERVAL_SECONDS):
        raise DataQualityError(f"{path}: timestamps are not at a uniform 300 s cadence")
    return YearDataset(start, values[:, 0], values[:, 1], values[:, 2], values[:, 3],
                       year_label=str(start.year))
