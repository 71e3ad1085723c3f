import os
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pytest

from gridheadroom.dataset import (INTERVALS_PER_DAY, INTERVALS_PER_WEEK, YearDataset,
                                  write_canonical)

START_2017 = datetime(2017, 1, 2, tzinfo=timezone.utc)
REAL_DATASET_NAME = "uk2017.csv"


def synthetic_year(seed=0, weeks=52, start=START_2017, wind_mean=6.0, solar_mean=1.16):
    """Plausible GB-like five-minute series: persistent wind, diurnal solar,
    seasonal demand peaking in January."""
    rng = np.random.default_rng(seed)
    n = weeks * INTERVALS_PER_WEEK
    t_days = np.arange(n) / INTERVALS_PER_DAY
    season = np.cos(2 * np.pi * (t_days - 15) / 364)  # +1 mid-January

    # Wind: slowly varying log-normal driven by a smoothed AR(1) process.
    phi = np.exp(-1 / (INTERVALS_PER_DAY * 1.5))
    eps = rng.normal(size=n) * np.sqrt(1 - phi ** 2)
    z = np.empty(n)
    z[0] = eps[0]
    for i in range(1, n):
        z[i] = phi * z[i - 1] + eps[i]
    wind = np.exp(0.8 * z + 0.25 * season)
    wind *= wind_mean / wind.mean()

    hour = (t_days % 1) * 24
    daylight = np.clip(np.sin(np.pi * (hour - 6 + 2 * season) / (12 - 4 * season)), 0, None)
    cloud = np.repeat(rng.uniform(0.3, 1.0, n // INTERVALS_PER_DAY + 1), INTERVALS_PER_DAY)[:n]
    solar = daylight * (1 - 0.6 * season) * cloud
    solar *= solar_mean / solar.mean()

    demand = 33.0 * (1 + 0.19 * season) + 5.0 * np.sin(np.pi * (hour - 6) / 15) ** 2
    demand += rng.normal(0, 0.3, n)
    nuclear = np.full(n, 7.5) + rng.normal(0, 0.05, n)
    return YearDataset(start, demand, nuclear, wind, solar, year_label="synthetic")


@pytest.fixture(scope="session")
def year_ds():
    return synthetic_year(seed=2017)


@pytest.fixture(scope="session")
def canonical_file(tmp_path_factory, year_ds):
    path = tmp_path_factory.mktemp("data") / "synthetic.csv"
    write_canonical(year_ds, path)
    return path


def real_dataset_path():
    env = os.environ.get("GRIDHEADROOM_DATA")
    if not env:
        return None
    path = Path(env) / REAL_DATASET_NAME
    return path if path.exists() else None


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for status, name, detail in results:
        terminalreporter.write_line(f"{status:4}  {name}: {detail}")
