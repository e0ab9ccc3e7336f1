import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from agsim.channel import (
    ObstacleLossParams,
    RadioConfig,
    friis_path_loss_db,
    link_budget,
    noise_floor_dbm,
    obstacle_aware_path_loss_db,
    sample_shadowing_db,
)
from agsim.errors import ConfigurationError
from agsim.geom import Box, Point3, distance

from conftest import UAV, UE
from oracles import friis_closed_form

# Frozen from closed forms (c = 299792458 m/s).
FRIIS_1M_5GHZ = 46.42718330860375
FRIIS_FIG3_5GHZ = 76.42718330860374
NOISE_80MHZ_NF7 = -87.96910013008056
SNR_CLEAR = 31.541916821476818
SNR_BLOCKED_WALL7 = 17.541916821476818

ZERO_SHADOW = ObstacleLossParams(wall_loss_db=7.0, walls_per_building=2,
                                 shadowing_sigma_los_db=0.0, shadowing_sigma_nlos_db=0.0)


def test_friis_examples():
    assert friis_path_loss_db(1.0, 5e9) == pytest.approx(FRIIS_1M_5GHZ, abs=1e-12)
    assert friis_path_loss_db(1.0, 5e9) == pytest.approx(46.42, abs=0.01)
    assert friis_path_loss_db(math.sqrt(1000), 5e9) == pytest.approx(FRIIS_FIG3_5GHZ, abs=1e-12)
    assert friis_path_loss_db(31.6228, 5e9) == pytest.approx(76.42, abs=0.01)


def test_friis_doubling_distance_adds_6db():
    rng = np.random.default_rng(1)
    for d, f in zip(rng.uniform(0.1, 1e4, 200), rng.uniform(1e8, 1e11, 200)):
        step = friis_path_loss_db(2 * d, f) - friis_path_loss_db(d, f)
        assert step == pytest.approx(20 * math.log10(2), abs=1e-9)


def test_friis_matches_closed_form_on_random_pairs():
    rng = np.random.default_rng(2)
    d = rng.uniform(0.01, 1e5, 10_000)
    f = rng.uniform(1e6, 1e12, 10_000)
    got = np.array([friis_path_loss_db(di, fi) for di, fi in zip(d, f)])
    assert np.max(np.abs(got - friis_closed_form(d, f))) < 1e-9


@pytest.mark.parametrize("d,f", [(0.0, 5e9), (-1.0, 5e9), (1.0, 0.0)])
def test_friis_domain_errors(d, f):
    with pytest.raises(ValueError):
        friis_path_loss_db(d, f)


def test_friis_monotone():
    ds = np.linspace(0.5, 500, 400)
    losses = [friis_path_loss_db(d, 5e9) for d in ds]
    assert all(b > a for a, b in zip(losses, losses[1:]))
    fs = np.linspace(1e9, 60e9, 400)
    losses = [friis_path_loss_db(10.0, f) for f in fs]
    assert all(b > a for a, b in zip(losses, losses[1:]))


def test_obstacle_aware_examples(reference_building):
    assert obstacle_aware_path_loss_db(UE, UAV, [], ZERO_SHADOW, 0.0) == friis_path_loss_db(math.sqrt(1000), 5e9)
    blocked = obstacle_aware_path_loss_db(UE, UAV, [reference_building], ZERO_SHADOW, 0.0)
    assert blocked == pytest.approx(FRIIS_FIG3_5GHZ + 14.0, abs=1e-12)
    assert blocked == pytest.approx(90.42, abs=0.01)
    two = obstacle_aware_path_loss_db(UE, UAV, [reference_building, Box.from_bounds(5, 6, -1, 1, -1, 10)], ZERO_SHADOW, 0.0)
    assert two == pytest.approx(FRIIS_FIG3_5GHZ + 28.0, abs=1e-12)


def test_shadow_is_additive(reference_building):
    base = obstacle_aware_path_loss_db(UE, UAV, [reference_building], ZERO_SHADOW, 0.0)
    assert obstacle_aware_path_loss_db(UE, UAV, [reference_building], ZERO_SHADOW, 3.25) == pytest.approx(base + 3.25)


def test_shadowing_sampler():
    rng = np.random.default_rng(0)
    assert sample_shadowing_db(rng, 0.0) == 0.0
    xs = np.array([sample_shadowing_db(rng, 7.0) for _ in range(100_000)])
    assert abs(xs.mean()) < 0.1
    assert abs(xs.std() - 7.0) < 0.2
    a = [sample_shadowing_db(np.random.default_rng(9), 7.0) for _ in range(3)]
    b = [sample_shadowing_db(np.random.default_rng(9), 7.0) for _ in range(3)]
    assert a == b
    with pytest.raises(ValueError):
        sample_shadowing_db(rng, -1.0)


def test_noise_floor():
    assert noise_floor_dbm(80e6, 7.0) == pytest.approx(NOISE_80MHZ_NF7, abs=1e-12)
    assert noise_floor_dbm(80e6, 7.0) == pytest.approx(-87.97, abs=0.01)
    assert noise_floor_dbm(1.0, 0.0) == -174.0
    assert noise_floor_dbm(160e6, 7.0) - noise_floor_dbm(80e6, 7.0) == pytest.approx(3.0103, abs=1e-4)
    with pytest.raises(ValueError):
        noise_floor_dbm(0.0, 7.0)


def test_link_budget_examples(reference_building):
    radio = RadioConfig()
    lb = link_budget(UE, UAV, [], radio, ZERO_SHADOW)
    assert lb.snr_db == pytest.approx(SNR_CLEAR, abs=1e-9)
    assert lb.snr_db == pytest.approx(31.55, abs=0.01)
    blocked = link_budget(UE, UAV, [reference_building], radio, ZERO_SHADOW)
    assert blocked.snr_db == pytest.approx(SNR_BLOCKED_WALL7, abs=1e-9)
    assert lb.snr_db - blocked.snr_db == pytest.approx(14.0, abs=1e-9)
    hi = link_budget(UE, UAV, [reference_building], RadioConfig(frequency_hz=10e9), ZERO_SHADOW)
    assert blocked.snr_db - hi.snr_db == pytest.approx(20 * math.log10(2), abs=1e-9)


def test_link_budget_invariants_hold_with_shadowing(reference_building):
    radio = RadioConfig(tx_power_dbm=17.0, antenna_gain_tx_dbi=2.0, antenna_gain_rx_dbi=3.0)
    params = ObstacleLossParams(shadowing_sigma_los_db=4.0, shadowing_sigma_nlos_db=7.0)
    rng = np.random.default_rng(5)
    for bld in ([], [reference_building]):
        lb = link_budget(UE, UAV, bld, radio, params, rng)
        assert lb.shadowing_db != 0.0
        assert lb.rx_power_dbm == pytest.approx(22.0 - lb.path_loss_db - lb.shadowing_db)
        assert lb.snr_db == pytest.approx(lb.rx_power_dbm - lb.noise_dbm)


def test_link_budget_needs_rng_for_nonzero_sigma(reference_building):
    with pytest.raises(ValueError):
        link_budget(UE, UAV, [reference_building], RadioConfig(), ObstacleLossParams())


def test_radio_config_validation():
    with pytest.raises(ConfigurationError):
        RadioConfig(frequency_hz=0.0)
    with pytest.raises(ConfigurationError):
        RadioConfig(phy_rate_bps=-1.0)
    with pytest.raises(ConfigurationError):
        ObstacleLossParams(wall_loss_db=-1.0)


coords = st.floats(-60, 60, allow_nan=False)


@settings(max_examples=300, deadline=None)
@given(st.tuples(coords, coords, coords), st.tuples(coords, coords, coords),
       st.floats(1e8, 1e11), st.floats(-20, 20))
def test_loss_properties(pa, pb, f, shadow):
    a, b = Point3(*pa), Point3(*pb)
    assume(distance(a, b) > 1e-6)
    box = Box.from_bounds(-10, 10, -10, 10, -10, 10)
    clear = obstacle_aware_path_loss_db(a, b, [], ZERO_SHADOW, 0.0, frequency_hz=f)
    full = obstacle_aware_path_loss_db(a, b, [box], ZERO_SHADOW, 0.0, frequency_hz=f)
    assert math.isfinite(full)
    assert full >= clear
    assert obstacle_aware_path_loss_db(b, a, [box], ZERO_SHADOW, shadow, frequency_hz=f) == pytest.approx(full + shadow)
    doubled = obstacle_aware_path_loss_db(a, b, [box], ZERO_SHADOW, 0.0, frequency_hz=2 * f)
    assert doubled - full == pytest.approx(20 * math.log10(2), abs=1e-9)


def test_snr_decreases_with_path_loss():
    radio = RadioConfig()
    snrs = [link_budget(UE, Point3(d, 0.0, 10.0), [], radio, ZERO_SHADOW).snr_db for d in range(1, 200)]
    assert all(b < a for a, b in zip(snrs, snrs[1:]))
