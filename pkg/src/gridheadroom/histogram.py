"""
Banded approximation of the dispatch.

Available generation is binned into fixed-width bands. Each band stores its
contribution to the annual mean (share of intervals times in-band mean).
A band whose centre is above the headroom keeps the fraction
``hdrm / centre`` of its contribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .composite import available_generation, emissions_of
from .dataset import YearDataset, partition_weeks
from .scenario import HOURS_PER_YEAR, Scenario

DEFAULT_BAND_WIDTH = 5.0


@dataclass(frozen=True)
class Band:
    center: float
    available_contribution: float


@dataclass(frozen=True)
class AvailabilityHistogram:
    band_width: float
    bands: tuple[Band, ...]

    @property
    def total(self) -> float:
        return math.fsum(b.available_contribution for b in self.bands)


@dataclass(frozen=True)
class HistogramSummary:
    mean_available: float
    mean_accommodated: float
    mean_excess: float
    mean_gas: float
    emissions: float  # Mt pa

    def to_json(self) -> dict[str, float]:
        return {
            "emissions_mt_pa": self.emissions,
            "mean_excess_gw": self.mean_excess,
            "mean_accommodated_gw": self.mean_accommodated,
            "mean_gas_gw": self.mean_gas,
        }


def histogram_of(available: np.ndarray, band_width: float = DEFAULT_BAND_WIDTH
                 ) -> AvailabilityHistogram:
    if not band_width > 0:
        raise ValueError(f"band_width must be positive, got {band_width}")
    available = np.asarray(available, dtype=np.float64)
    n = len(available)
    k = np.floor(available / band_width).astype(np.int64)
    order = np.argsort(k, kind="stable")
    counts = np.bincount(k)
    groups = np.split(available[order], np.cumsum(counts)[:-1])
    bands = tuple(Band((j + 0.5) * band_width, math.fsum(g) / n) for j, g in enumerate(groups))
    return AvailabilityHistogram(float(band_width), bands)


def build_histogram(ds: YearDataset, s: Scenario, band_width: float = DEFAULT_BAND_WIDTH
                    ) -> AvailabilityHistogram:
    """Histogram of ``wm * wind + sm * solar`` over the modelled weeks."""
    weeks = partition_weeks(ds)
    n = len(weeks) * len(weeks[0].wind)
    return histogram_of(available_generation(ds.wind[:n], ds.solar[:n], s.wm, s.sm), band_width)


def accommodate_band(contribution: float, center: float, hdrm: float) -> float:
    if center <= hdrm:
        return contribution
    return contribution * hdrm / center


def accommodated_bands(h: AvailabilityHistogram, hdrm: float) -> list[float]:
    return [accommodate_band(b.available_contribution, b.center, hdrm) for b in h.bands]


def histogram_summary(h: AvailabilityHistogram, s: Scenario) -> HistogramSummary:
    """Annual figures against the constant annual headroom (no seasonal factors)."""
    available = h.total
    accommodated = math.fsum(accommodated_bands(h, s.hdrm_annual))
    gas = s.hdrm_annual - accommodated
    return HistogramSummary(
        mean_available=available,
        mean_accommodated=accommodated,
        mean_excess=available - accommodated,
        mean_gas=gas,
        emissions=emissions_of(gas, HOURS_PER_YEAR, s.emission_intensity),
    )


def histogram_rows(h: AvailabilityHistogram, hdrm: float) -> list[tuple[float, float, float]]:
    """``(band_center_gw, available_gw, accommodated_gw)`` rows."""
    return [(b.center, b.available_contribution, acc)
            for b, acc in zip(h.bands, accommodated_bands(h, hdrm))]
