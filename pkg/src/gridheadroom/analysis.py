"""
Scenario sweeps and derived metrics: abatement per GW of added wind, cost
multiples relative to curtailment-free abatement, wind-lull windows and their
energy deficits, and storage comparisons.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Sequence

import numpy as np

from .composite import AnnualSummary, available_generation, emissions_of, hdrm_series, run_year
from .dataset import (INTERVAL_SECONDS, INTERVALS_PER_DAY, SeasonalFactors, YearDataset,
                      format_timestamp)
from .scenario import HOURS_PER_YEAR, Scenario

DEFAULT_SWEEP = tuple(1.0 + 0.5 * i for i in range(19))  # 1.0 .. 10.0
TABLE3_POINTS = (("O", 1.0), ("A", 1.65), ("B", 3.30), ("C", 4.95))
DEFAULT_LULL_THRESHOLD = 0.5
DEFAULT_LULL_MIN_DAYS = 5

# Gas storage in days of supply (Centrica, 2025); UK figure is peak-winter days.
STORAGE_REFERENCE = (("UK", 7.5), ("Germany", 89.0), ("France", 103.0), ("Netherlands", 123.0))
UK_PEAK_WINTER_STORAGE_DAYS = 7.5
ESO_STORAGE_2035_GWH = 150.0


class AnalysisError(ValueError):
    pass


@dataclass(frozen=True)
class SweepPoint:
    wm: float
    wind_mean: float
    emissions: float
    mean_excess: float


@dataclass(frozen=True)
class SegmentMetrics:
    from_wind: float
    to_wind: float
    incremental_reduction: float  # Mt pa per GW of added mean wind
    unit_cost_multiple: float
    excess_increase: float


@dataclass(frozen=True)
class EconomicLimit:
    wind_mean: float
    below_all: bool  # every segment already exceeds the threshold


@dataclass(frozen=True)
class LullWindow:
    start: datetime
    end: datetime

    @property
    def days(self) -> float:
        return (self.end - self.start).total_seconds() / 86400.0


@dataclass(frozen=True)
class LullReport:
    window: LullWindow
    duration_days: float
    peak_gas: float
    peak_gas_time: datetime
    mean_gas: float
    deficit: float  # GWh

    def to_json(self) -> dict:
        return {
            "window_start": format_timestamp(self.window.start),
            "window_end": format_timestamp(self.window.end),
            "duration_days": self.duration_days,
            "peak_gas_gw": self.peak_gas,
            "peak_gas_time": format_timestamp(self.peak_gas_time),
            "mean_gas_gw": self.mean_gas,
            "deficit_gwh": self.deficit,
        }


@dataclass(frozen=True)
class StorageComparison:
    entries: tuple[tuple[str, float], ...]
    uk_peak_winter_days: float

    def to_json(self) -> list[dict]:
        return [{"region": region, "storage_days": days} for region, days in self.entries]


def no_curtailment_rate(s: Scenario) -> float:
    """Mt pa abated per GW of mean wind when none of it is curtailed."""
    return emissions_of(1.0, HOURS_PER_YEAR, s.emission_intensity)


def sweep_wind(ds: YearDataset, s: Scenario, f: SeasonalFactors, wm_list: Sequence[float],
               workers: int | None = None) -> list[SweepPoint]:
    if len(wm_list) == 0:
        raise AnalysisError("wm_list is empty")
    if any(wm < 0 for wm in wm_list):
        raise AnalysisError("wind multipliers must be >= 0")
    wms = sorted(float(wm) for wm in wm_list)

    def point(wm):
        summary = run_year(ds, s.with_(wm=wm), f)
        return SweepPoint(wm, wm * s.base_wind_mean, summary.emissions, summary.mean_excess)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(point, wms))
    return [point(wm) for wm in wms]


def segment_metrics(a: SweepPoint, b: SweepPoint, s: Scenario) -> SegmentMetrics:
    delta = b.wind_mean - a.wind_mean
    if not delta > 0:
        raise AnalysisError(f"segment must add wind: {a.wind_mean} -> {b.wind_mean}")
    reduction = (a.emissions - b.emissions) / delta
    multiple = no_curtailment_rate(s) / reduction if reduction > 0 else math.inf
    return SegmentMetrics(a.wind_mean, b.wind_mean, reduction, multiple,
                          b.mean_excess - a.mean_excess)


def segments(points: Sequence[SweepPoint], s: Scenario) -> list[SegmentMetrics]:
    return [segment_metrics(a, b, s) for a, b in zip(points, points[1:])]


def economic_limit(points: Sequence[SweepPoint], s: Scenario, max_multiple: float
                   ) -> EconomicLimit:
    """Largest mean wind whose incoming segment stays within ``max_multiple``.

    Each segment's multiple is attributed to its upper end; the crossing is
    located by linear interpolation between adjacent points.
    """
    if len(points) < 2:
        raise AnalysisError("need at least two sweep points")
    if not max_multiple > 1:
        raise AnalysisError("max_multiple must exceed 1")
    segs = segments(points, s)
    ok = [i for i, seg in enumerate(segs) if seg.unit_cost_multiple <= max_multiple]
    if not ok:
        return EconomicLimit(points[0].wind_mean, True)
    i = ok[-1]
    if i + 1 == len(segs):
        return EconomicLimit(points[-1].wind_mean, False)
    m0, m1 = segs[i].unit_cost_multiple, segs[i + 1].unit_cost_multiple
    w0, w1 = points[i + 1].wind_mean, points[i + 2].wind_mean
    if math.isinf(m1):
        return EconomicLimit(w0, False)
    frac = (max_multiple - m0) / (m1 - m0)
    return EconomicLimit(w0 + frac * (w1 - w0), False)


def table3(ds: YearDataset, s: Scenario, f: SeasonalFactors,
           points: Sequence[tuple[str, float]] = TABLE3_POINTS,
           workers: int | None = None) -> list[dict]:
    """Emissions and incremental metrics at labelled wind multipliers.

    The first labelled point's segment starts from zero wind, so its
    reduction approaches the curtailment-free rate.
    """
    sweep = sweep_wind(ds, s, f, [0.0] + [wm for _, wm in points], workers)
    rows = []
    for (label, _), prev, cur in zip(points, sweep, sweep[1:]):
        seg = segment_metrics(prev, cur, s)
        rows.append({
            "point": label,
            "wm": cur.wm,
            "wind_gw": cur.wind_mean,
            "emissions_mt_pa": cur.emissions,
            "excess_gw": cur.mean_excess,
            "incremental_reduction_mt_pa_per_gw": seg.incremental_reduction,
            "unit_cost_multiple": seg.unit_cost_multiple,
            "excess_increase_gw": seg.excess_increase,
        })
    return rows


def _interval_index(ds: YearDataset, t: datetime) -> float:
    return (t - ds.start).total_seconds() / INTERVAL_SECONDS


def daily_means(ds: YearDataset, s: Scenario, f: SeasonalFactors
                ) -> tuple[np.ndarray, np.ndarray]:
    """Daily mean available generation and headroom over the modelled weeks."""
    hdrm = hdrm_series(ds, s, f)
    n = len(hdrm)
    avail = available_generation(ds.wind[:n], ds.solar[:n], s.wm, s.sm)
    days = n // INTERVALS_PER_DAY
    a = avail.reshape(days, INTERVALS_PER_DAY)
    h = hdrm.reshape(days, INTERVALS_PER_DAY)
    return (np.array([math.fsum(row) / INTERVALS_PER_DAY for row in a]),
            np.array([math.fsum(row) / INTERVALS_PER_DAY for row in h]))


def find_lulls(ds: YearDataset, s: Scenario, f: SeasonalFactors,
               threshold: float = DEFAULT_LULL_THRESHOLD,
               min_days: int = DEFAULT_LULL_MIN_DAYS) -> list[LullWindow]:
    """Maximal runs of days whose mean available generation is below
    ``threshold`` times the day's headroom, lasting at least ``min_days``."""
    if not 0 < threshold < 1:
        raise AnalysisError("threshold must lie in (0, 1)")
    if min_days < 1:
        raise AnalysisError("min_days must be >= 1")
    avail, hdrm = daily_means(ds, s, f)
    low = avail < threshold * hdrm
    padded = np.concatenate(([False], low, [False]))
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    windows = []
    for lo, hi in zip(edges[0::2], edges[1::2]):
        if hi - lo >= min_days:
            windows.append(LullWindow(ds.start + timedelta(days=int(lo)),
                                      ds.start + timedelta(days=int(hi))))
    return windows


def window_slice(ds: YearDataset, window: LullWindow, n: int) -> slice:
    lo = math.ceil(_interval_index(ds, window.start))
    hi = math.ceil(_interval_index(ds, window.end))
    if lo < 0 or hi > n:
        raise AnalysisError("window extends beyond the modelled period")
    if hi <= lo:
        raise AnalysisError("window contains no intervals")
    return slice(lo, hi)


def lull_report(ds: YearDataset, s: Scenario, f: SeasonalFactors, window: LullWindow,
                summary: AnnualSummary | None = None) -> LullReport:
    """Gas backfill over ``window``: peak, mean and integrated energy deficit."""
    if summary is None:
        summary = run_year(ds, s, f)
    gas_all = summary.concat("gas")
    sl = window_slice(ds, window, len(gas_all))
    gas = gas_all[sl]
    peak = int(np.argmax(gas))
    return LullReport(
        window=window,
        duration_days=len(gas) * INTERVAL_SECONDS / 86400.0,
        peak_gas=float(gas[peak]),
        peak_gas_time=ds.timestamp(sl.start + peak),
        mean_gas=math.fsum(gas) / len(gas),
        deficit=math.fsum(gas) * INTERVAL_SECONDS / 3600.0,
    )


def lull_rows(ds: YearDataset, s: Scenario, f: SeasonalFactors, window: LullWindow,
              summary: AnnualSummary | None = None) -> list[tuple]:
    """``(timestamp_utc, available, accommodated, gas, hdrm)`` rows for a window."""
    if summary is None:
        summary = run_year(ds, s, f)
    avail = summary.concat("available")
    acc = summary.concat("accommodated")
    gas = summary.concat("gas")
    sl = window_slice(ds, window, len(gas))
    hdrm = acc + gas
    return [(format_timestamp(ds.timestamp(i)), avail[i], acc[i], gas[i], hdrm[i])
            for i in range(sl.start, sl.stop)]


def storage_days(stored_energy: float, mean_winter_gas: float) -> float:
    """Days of gas backfill a store of ``stored_energy`` GWh would cover."""
    if not mean_winter_gas > 0:
        raise AnalysisError("mean_winter_gas must be positive")
    return stored_energy / (24.0 * mean_winter_gas)


def storage_comparison() -> StorageComparison:
    return StorageComparison(STORAGE_REFERENCE, UK_PEAK_WINTER_STORAGE_DAYS)


def decarbonisation_fraction(summary: AnnualSummary, baseline: AnnualSummary) -> float:
    if not baseline.emissions > 0:
        raise AnalysisError("baseline emissions must be positive")
    return 1.0 - summary.emissions / baseline.emissions


def default_lull_window(ds: YearDataset, s: Scenario, f: SeasonalFactors,
                        summary: AnnualSummary,
                        threshold: float = DEFAULT_LULL_THRESHOLD,
                        min_days: int = DEFAULT_LULL_MIN_DAYS) -> LullWindow:
    """Longest detected lull; failing that, the week with the most gas."""
    lulls = find_lulls(ds, s, f, threshold, min_days)
    if lulls:
        return max(lulls, key=lambda w: (w.days, -w.start.timestamp()))
    worst = max(summary.weeks, key=lambda w: (w.mean_gas, -w.week_index))
    start = ds.start + timedelta(weeks=worst.week_index - 1)
    return LullWindow(start, start + timedelta(weeks=1))
