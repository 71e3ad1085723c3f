"""Curtailment, gas backfill and emissions of future wind/solar grids from
scaled historic five-minute grid records."""

from .analysis import (LullReport, LullWindow, SegmentMetrics, SweepPoint, decarbonisation_fraction,
                       economic_limit, find_lulls, lull_report, segment_metrics, storage_days,
                       sweep_wind)
from .composite import (AnnualSummary, IntervalDispatch, WeekResult, dispatch_interval,
                        emissions_of, run_week, run_year)
from .dataset import (ColumnMapping, GridRecord, SeasonalFactors, WeekSeries, YearDataset,
                      clean_resample, parse_raw, partition_weeks, read_canonical,
                      seasonal_factors, write_canonical)
from .histogram import (AvailabilityHistogram, HistogramSummary, accommodate_band,
                        build_histogram, histogram_summary)
from .scenario import (CapacityAssumption, HdrmProfile, Scenario, build_hdrm_profile,
                       mean_generation_from_capacity, multipliers_from_targets, neso2030_preset)

__all__ = [
    "AnnualSummary", "AvailabilityHistogram", "CapacityAssumption", "ColumnMapping",
    "GridRecord", "HdrmProfile", "HistogramSummary", "IntervalDispatch", "LullReport",
    "LullWindow", "Scenario", "SeasonalFactors", "SegmentMetrics", "SweepPoint", "WeekResult",
    "WeekSeries", "YearDataset", "accommodate_band", "build_hdrm_profile", "build_histogram",
    "clean_resample", "decarbonisation_fraction", "dispatch_interval", "economic_limit",
    "emissions_of", "find_lulls", "histogram_summary", "lull_report",
    "mean_generation_from_capacity", "multipliers_from_targets", "neso2030_preset", "parse_raw",
    "partition_weeks", "read_canonical", "run_week", "run_year", "seasonal_factors",
    "segment_metrics", "storage_days", "sweep_wind", "write_canonical",
]

__version__ = "0.1.0"
