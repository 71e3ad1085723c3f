import numpy as np
import pytest

from gridheadroom.dataset import SeasonalFactors
from gridheadroom.scenario import (NESO_2030_CAPACITY, CapacityAssumption, Scenario,
                                   ScenarioError, build_hdrm_profile, load_scenario,
                                   mean_generation_from_capacity, multipliers_from_targets,
                                   neso2030_preset)

BASE_2017 = (6.045, 1.16)


def test_neso_capacity_gives_29_95_gw():
    assert mean_generation_from_capacity(NESO_2030_CAPACITY) == pytest.approx(29.95, abs=0.005)


@pytest.mark.parametrize("ca, expected", [
    (CapacityAssumption(0, 0, 0.43, 0.30), 0.0),
    (CapacityAssumption(10, 0, 1.0, 0.5), 10.0),
])
def test_capacity_trivial(ca, expected):
    assert mean_generation_from_capacity(ca) == expected


def test_capacity_validation():
    with pytest.raises(ScenarioError):
        CapacityAssumption(-1, 0, 0.4, 0.3)
    with pytest.raises(ScenarioError):
        CapacityAssumption(1, 0, 0.0, 0.3)


@pytest.mark.parametrize("target, expected", [(29.95, 4.95), (20.0, 3.30), (6.045, 1.0)])
def test_multipliers_from_targets(target, expected):
    wm, sm = multipliers_from_targets(target, 3.7, BASE_2017)
    assert wm == pytest.approx(expected, abs=0.01)
    assert sm == 3.7


def test_multipliers_reject_zero_base():
    with pytest.raises(ScenarioError):
        multipliers_from_targets(10, 1, (0.0, 1.0))


def test_capacity_chain_reproduces_preset_wm():
    wm, _ = multipliers_from_targets(mean_generation_from_capacity(NESO_2030_CAPACITY), 3.7, BASE_2017)
    assert abs(wm - neso2030_preset(BASE_2017).wm) < 0.01


def test_preset_values():
    s = neso2030_preset(BASE_2017)
    assert (s.hdrm_annual, s.wm, s.sm, s.label) == (30.0, 4.95, 3.7, "neso2030")
    assert s.emission_intensity == 0.556
    assert s.wind_mean == pytest.approx(29.92, abs=0.01)


@pytest.mark.parametrize("kwargs", [
    dict(hdrm_annual=0, wm=1, sm=1),
    dict(hdrm_annual=30, wm=-1, sm=1),
    dict(hdrm_annual=30, wm=1, sm=-0.1),
    dict(hdrm_annual=30, wm=1, sm=1, emission_intensity=0),
    dict(hdrm_annual=float("nan"), wm=1, sm=1),
])
def test_invalid_scenarios(kwargs):
    with pytest.raises(ScenarioError):
        Scenario(**kwargs)


def test_hdrm_profile():
    s = neso2030_preset(BASE_2017)
    f = SeasonalFactors(np.array([1.19, 0.9, 0.91]))
    profile = build_hdrm_profile(s, f)
    assert profile[0] == pytest.approx(35.7)
    assert profile[1] == pytest.approx(27.0)
    np.testing.assert_array_equal(build_hdrm_profile(s, SeasonalFactors.constant()).weekly,
                                  np.full(52, 30.0))


def test_hdrm_profile_mean_equals_annual(year_ds):
    from gridheadroom.dataset import seasonal_factors
    s = neso2030_preset(BASE_2017)
    profile = build_hdrm_profile(s, seasonal_factors(year_ds))
    assert profile.weekly.mean() == pytest.approx(s.hdrm_annual, rel=1e-9)


def test_scenario_file(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text("hdrm_annual = 30\nwm = 4.95\nsm = 3.7\nemission_intensity = 0.556\nlabel = neso2030\n")
    s = load_scenario(path)
    assert s == Scenario(30, 4.95, 3.7, 0.556, label="neso2030")
    path.write_text("wm = 2\n")
    assert load_scenario(path, s).wm == 2.0
    with pytest.raises(ScenarioError):
        load_scenario(path)  # missing hdrm_annual and sm without a base
    path.write_text("wm = lots\n")
    with pytest.raises(ScenarioError):
        load_scenario(path, s)
