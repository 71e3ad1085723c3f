"""
Per-interval dispatch of scaled wind plus solar against weekly headroom.

Every five-minute interval accepts at most the week's headroom; anything
above it is curtailed and the shortfall below it is met by gas.  Fifty-two
independent weekly runs are merged into an annual summary.

Power values entering the dispatch are rounded to a dyadic grid of 2**-36 GW
(about 15 mW).  On that grid ``min`` and subtraction are exact in binary
floating point, so ``accommodated + curtailed == available`` and
``accommodated + gas == headroom`` hold bit-for-bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dataset import (INTERVAL_SECONDS, INTERVALS_PER_WEEK, SeasonalFactors, WeekSeries,
                      YearDataset, partition_weeks)
from .scenario import HOURS_PER_YEAR, Scenario, build_hdrm_profile

POWER_QUANTUM_EXP = 36
_Q = float(2 ** POWER_QUANTUM_EXP)
HOURS_PER_WEEK = 168.0


def quantize(x):
    """Round power (GW) to the dispatch grid; exact scaling by a power of two."""
    return np.rint(np.multiply(x, _Q)) / _Q


def available_generation(wind: np.ndarray, solar: np.ndarray, wm: float, sm: float) -> np.ndarray:
    return quantize(wm * np.asarray(wind) + sm * np.asarray(solar))


def emissions_of(mean_gas: float, hours: float, intensity: float) -> float:
    """Mt CO2 from a mean gas output (GW) held for ``hours`` at ``intensity`` t/MWh."""
    # GW * h = 1e3 MWh; t -> Mt is 1e-6.
    return mean_gas * hours * intensity / 1000.0


def mean(values) -> float:
    """Correctly rounded mean; independent of summation order."""
    return math.fsum(values) / len(values)


@dataclass(frozen=True)
class IntervalDispatch:
    available: float
    accommodated: float
    curtailed: float
    gas: float


def dispatch_interval(available: float, hdrm: float) -> IntervalDispatch:
    a = float(quantize(available))
    h = float(quantize(hdrm))
    acc = min(a, h)
    return IntervalDispatch(a, acc, a - acc, h - acc)


@dataclass(frozen=True, eq=False)
class DispatchSeries:
    available: np.ndarray
    accommodated: np.ndarray
    curtailed: np.ndarray
    gas: np.ndarray

    def __len__(self):
        return len(self.available)

    def __getitem__(self, i: int) -> IntervalDispatch:
        return IntervalDispatch(float(self.available[i]), float(self.accommodated[i]),
                                float(self.curtailed[i]), float(self.gas[i]))


def dispatch(available: np.ndarray, hdrm) -> DispatchSeries:
    """Vectorised :func:`dispatch_interval`; ``hdrm`` may be scalar or per interval."""
    a = quantize(available)
    h = quantize(np.broadcast_to(np.asarray(hdrm, dtype=np.float64), a.shape))
    acc = np.minimum(a, h)
    series = DispatchSeries(a, acc, a - acc, h - acc)
    for arr in (series.available, series.accommodated, series.curtailed, series.gas):
        arr.setflags(write=False)
    return series


@dataclass(frozen=True, eq=False)
class WeekResult:
    week_index: int
    series: DispatchSeries
    hdrm_used: float
    week_emissions: float  # Mt over the week
    mean_gas: float
    peak_gas: float
    mean_available: float
    mean_accommodated: float
    mean_curtailed: float

    @property
    def hours(self) -> float:
        return len(self.series) * INTERVAL_SECONDS / 3600.0


def run_week(w: WeekSeries, s: Scenario, hdrm_w: float) -> WeekResult:
    series = dispatch(available_generation(w.wind, w.solar, s.wm, s.sm), hdrm_w)
    hours = len(series) * INTERVAL_SECONDS / 3600.0
    mean_gas = mean(series.gas)
    return WeekResult(
        week_index=w.week_index,
        series=series,
        hdrm_used=float(quantize(hdrm_w)),
        week_emissions=emissions_of(mean_gas, hours, s.emission_intensity),
        mean_gas=mean_gas,
        peak_gas=float(series.gas.max()),
        mean_available=mean(series.available),
        mean_accommodated=mean(series.accommodated),
        mean_curtailed=mean(series.curtailed),
    )


@dataclass(frozen=True, eq=False)
class AnnualSummary:
    emissions: float  # Mt pa, normalised to an 8760 h year
    mean_excess: float
    mean_accommodated: float
    mean_gas: float
    peak_gas: float
    modelled_hours: float
    mean_available: float
    modelled_emissions: float  # Mt over the modelled hours
    weeks: tuple[WeekResult, ...] = ()

    def to_json(self) -> dict[str, float]:
        return {
            "emissions_mt_pa": self.emissions,
            "mean_excess_gw": self.mean_excess,
            "mean_accommodated_gw": self.mean_accommodated,
            "mean_gas_gw": self.mean_gas,
            "peak_gas_gw": self.peak_gas,
        }

    def concat(self, field: str) -> np.ndarray:
        return np.concatenate([getattr(w.series, field) for w in self.weeks])


def summarize(weeks: list[WeekResult], emission_intensity: float) -> AnnualSummary:
    """Merge week results in week order using exactly rounded sums."""
    def pooled(field):
        return mean(np.concatenate([getattr(w.series, field) for w in weeks]))

    n = sum(len(w.series) for w in weeks)
    hours = n * INTERVAL_SECONDS / 3600.0
    mean_gas = pooled("gas")
    return AnnualSummary(
        emissions=emissions_of(mean_gas, HOURS_PER_YEAR, emission_intensity),
        mean_excess=pooled("curtailed"),
        mean_accommodated=pooled("accommodated"),
        mean_gas=mean_gas,
        peak_gas=max(w.peak_gas for w in weeks),
        modelled_hours=hours,
        mean_available=pooled("available"),
        modelled_emissions=emissions_of(mean_gas, hours, emission_intensity),
        weeks=tuple(weeks),
    )


def run_year(ds: YearDataset, s: Scenario, f: SeasonalFactors,
             workers: int | None = None) -> AnnualSummary:
    """Run every week against its seasonal headroom and aggregate.

    ``workers > 1`` evaluates weeks on a thread pool; the result is identical
    to the sequential run because weeks share no state and are merged in order.
    """
    weeks = partition_weeks(ds)
    if len(weeks) != len(f):
        raise ValueError(f"{len(weeks)} weeks in dataset but {len(f)} seasonal factors")
    profile = build_hdrm_profile(s, f)
    jobs = [(w, s, profile[i]) for i, w in enumerate(weeks)]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: run_week(*job), jobs))
    else:
        results = [run_week(*job) for job in jobs]
    return summarize(results, s.emission_intensity)


def hdrm_series(ds: YearDataset, s: Scenario, f: SeasonalFactors) -> np.ndarray:
    """Per-interval headroom (weekly constant) over the partitioned weeks."""
    profile = build_hdrm_profile(s, f)
    return quantize(np.repeat(profile.weekly, INTERVALS_PER_WEEK))


def weekly_emissions_rows(summary: AnnualSummary) -> list[tuple[int, float]]:
    return [(w.week_index, w.week_emissions) for w in summary.weeks]
