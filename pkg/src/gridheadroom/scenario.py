"""Future-system scenarios: headroom, wind/solar multipliers and gas intensity."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .dataset import ConfigurationError, SeasonalFactors, YearDataset, parse_key_values

HOURS_PER_YEAR = 8760.0

# 4.87 Mt pa of CO2 per GW of gas displaced all year / 8.760 TWh per GW-year.
DEFAULT_EMISSION_INTENSITY = 0.556  # t CO2 / MWh

# 2017 Gridwatch means, used only when no dataset is to hand.
BASE_WIND_MEAN_2017 = 6.045
BASE_SOLAR_MEAN_2017 = 1.16


class ScenarioError(ValueError):
    """Scenario values are missing, malformed or out of range."""


@dataclass(frozen=True)
class CapacityAssumption:
    offshore_capacity: float  # GWp
    onshore_capacity: float
    offshore_lf: float
    onshore_lf: float
    solar_capacity: float = 0.0

    def __post_init__(self):
        for name in ("offshore_capacity", "onshore_capacity", "solar_capacity"):
            if getattr(self, name) < 0:
                raise ScenarioError(f"{name} must be >= 0")
        for name in ("offshore_lf", "onshore_lf"):
            lf = getattr(self, name)
            if not 0 < lf <= 1:
                raise ScenarioError(f"{name} must be in (0, 1], got {lf}")


NESO_2030_CAPACITY = CapacityAssumption(
    offshore_capacity=50.6, onshore_capacity=27.3,
    offshore_lf=0.43, onshore_lf=0.30, solar_capacity=47.3,
)


@dataclass(frozen=True)
class Scenario:
    hdrm_annual: float  # GW, annual mean of demand less nuclear
    wm: float
    sm: float
    emission_intensity: float = DEFAULT_EMISSION_INTENSITY
    base_wind_mean: float = BASE_WIND_MEAN_2017
    base_solar_mean: float = BASE_SOLAR_MEAN_2017
    label: str = "custom"

    def __post_init__(self):
        checks = (
            ("hdrm_annual", self.hdrm_annual > 0),
            ("wm", self.wm >= 0),
            ("sm", self.sm >= 0),
            ("emission_intensity", self.emission_intensity > 0),
            ("base_wind_mean", self.base_wind_mean >= 0),
            ("base_solar_mean", self.base_solar_mean >= 0),
        )
        for name, ok in checks:
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and ok):
                raise ScenarioError(f"invalid {name}: {value!r}")

    @property
    def wind_mean(self) -> float:
        return self.wm * self.base_wind_mean

    @property
    def solar_mean(self) -> float:
        return self.sm * self.base_solar_mean

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class HdrmProfile:
    weekly: np.ndarray  # GW per week

    def __post_init__(self):
        arr = np.array(self.weekly, dtype=np.float64)
        if np.any(arr <= 0):
            raise ScenarioError("weekly headroom must be positive")
        arr.setflags(write=False)
        object.__setattr__(self, "weekly", arr)

    def __len__(self):
        return len(self.weekly)

    def __getitem__(self, week: int) -> float:
        return float(self.weekly[week])


def mean_generation_from_capacity(ca: CapacityAssumption) -> float:
    """Mean wind output (GW) implied by installed capacity and load factors."""
    return ca.offshore_capacity * ca.offshore_lf + ca.onshore_capacity * ca.onshore_lf


def base_means(ds: YearDataset) -> tuple[float, float]:
    m = ds.means()
    return m["wind"], m["solar"]


def multipliers_from_targets(target_wind_mean: float, target_solar_capacity_ratio: float,
                             base: tuple[float, float]) -> tuple[float, float]:
    """Wind multiplier from a target mean output; solar ratio passes through.

    Solar is specified as a capacity ratio to the base year, which scales the
    generation record proportionally.
    """
    base_wind, base_solar = base
    if base_wind <= 0 or base_solar <= 0:
        raise ScenarioError("base-year wind and solar means must be positive")
    return target_wind_mean / base_wind, target_solar_capacity_ratio


def neso2030_preset(base: tuple[float, float] = (BASE_WIND_MEAN_2017, BASE_SOLAR_MEAN_2017)
                    ) -> Scenario:
    base_wind, base_solar = base
    return Scenario(hdrm_annual=30.0, wm=4.95, sm=3.7,
                    emission_intensity=DEFAULT_EMISSION_INTENSITY,
                    base_wind_mean=base_wind, base_solar_mean=base_solar,
                    label="neso2030")


PRESETS = {"neso2030": neso2030_preset}


def build_hdrm_profile(s: Scenario, f: SeasonalFactors) -> HdrmProfile:
    return HdrmProfile(s.hdrm_annual * f.factor)


_NUMERIC_FIELDS = {f.name for f in fields(Scenario)} - {"label"}


def scenario_from_mapping(values: dict[str, object], base: Scenario | None = None) -> Scenario:
    """Apply ``values`` (strings or numbers) over ``base``; missing keys keep base values."""
    unknown = set(values) - _NUMERIC_FIELDS - {"label"}
    if unknown:
        raise ScenarioError(f"unknown scenario keys: {sorted(unknown)}")
    changes = {}
    for key, raw in values.items():
        if key == "label":
            changes[key] = str(raw)
            continue
        try:
            changes[key] = float(raw)
        except (TypeError, ValueError):
            raise ScenarioError(f"{key} must be a number, got {raw!r}") from None
    if base is None:
        missing = {"hdrm_annual", "wm", "sm"} - set(changes)
        if missing:
            raise ScenarioError(f"scenario is missing {sorted(missing)}")
        return Scenario(**changes)
    return replace(base, **changes)


def load_scenario(path: str | Path, base: Scenario | None = None) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        kv = parse_key_values(text)
    except ConfigurationError as exc:
        raise ScenarioError(str(exc)) from exc
    return scenario_from_mapping(kv, base)
