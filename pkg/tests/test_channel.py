import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hrris.channel import (
    FadingParams,
    Geometry,
    dbm_to_mw,
    path_loss_linear,
    rician_matrix,
    scenario_channels,
    steering_vector,
)


def test_path_loss_reference_distance():
    assert path_loss_linear(1.0, 2.2, -30.0) == pytest.approx(1e-3, rel=1e-15)
    assert path_loss_linear(1.0, 3.7, -30.0) == pytest.approx(1e-3, rel=1e-15)


def test_path_loss_at_51m():
    # 1e-3 * 51**-2.2 by hand: log10(51) = 1.70757, * 2.2 = 3.75666
    assert path_loss_linear(51.0, 2.2, -30.0) == pytest.approx(1e-3 * 10 ** -3.756655, rel=1e-5)
    assert path_loss_linear(51.0, 2.2, -30.0) == pytest.approx(1.75e-7, rel=1e-2)


def test_path_loss_inverse_square():
    assert path_loss_linear(20.0, 2.0, 0.0) == pytest.approx(path_loss_linear(10.0, 2.0, 0.0) / 4)


@pytest.mark.parametrize("d", [0.0, -1.0])
def test_path_loss_rejects_nonpositive_distance(d):
    with pytest.raises(ValueError):
        path_loss_linear(d, 2.0)


@given(d=st.floats(0.1, 1e3), scale=st.floats(1.001, 10), eps=st.floats(1.01, 6))
def test_path_loss_strictly_decreasing(d, scale, eps):
    assert path_loss_linear(d * scale, eps) < path_loss_linear(d, eps)


def test_steering_vector_examples():
    np.testing.assert_array_equal(steering_vector(8, 0.0), np.ones((8, 1)))
    np.testing.assert_array_equal(steering_vector(1, 1.234), np.ones((1, 1)))
    rng = np.random.default_rng(0)
    for angle in rng.uniform(0, 2 * np.pi, 20):
        v = steering_vector(16, angle)
        assert v.shape == (16, 1)
        assert np.max(np.abs(np.abs(v) - 1)) <= 1e-15


def test_rician_pure_los_is_unit_modulus():
    rng = np.random.default_rng(1)
    m = rician_matrix(6, 5, math.inf, rng)
    np.testing.assert_allclose(np.abs(m), 1.0, atol=1e-15)
    assert np.linalg.matrix_rank(m) == 1


@pytest.mark.parametrize("kappa", [0.0, 1.0])
def test_rician_unit_average_power(kappa):
    rng = np.random.default_rng(2)
    # 10 draws of 100 x 100 = 1e5 entries
    power = np.mean([np.mean(np.abs(rician_matrix(100, 100, kappa, rng)) ** 2) for _ in range(10)])
    assert power == pytest.approx(1.0, rel=0.02)


def test_rician_rejects_negative_kappa():
    with pytest.raises(ValueError):
        rician_matrix(2, 2, -0.5, np.random.default_rng(0))


def test_rician_power_normalization_over_kappa():
    rng = np.random.default_rng(3)
    for kappa in (0.3, 4.0, 50.0):
        frob = np.mean([np.sum(np.abs(rician_matrix(8, 4, kappa, rng)) ** 2) for _ in range(3000)])
        assert frob == pytest.approx(32.0, rel=0.02)


def test_scenario_unit_path_loss_passthrough():
    geom = Geometry(hrris_x=1.0, ms_pos=(1.0, 1.0))
    fading = FadingParams(kappa=0.0, exponent=2.0, beta0_db=0.0)
    ch = scenario_channels(geom, 4, 3, 2, fading, fading, np.random.default_rng(5))
    small_t = rician_matrix(4, 3, 0.0, np.random.default_rng(5))
    np.testing.assert_array_equal(ch.h_t, small_t)


def test_scenario_default_power_matches_path_loss():
    rng = np.random.default_rng(6)
    geom = Geometry()
    ft, fr = FadingParams(math.inf, 2.2), FadingParams(0.0, 2.8)
    acc = 0.0
    draws = 10_000
    for _ in range(draws):
        ch = scenario_channels(geom, 50, 32, 2, ft, fr, rng)
        acc += np.sum(np.abs(ch.h_t) ** 2)
    assert acc / draws / (50 * 32) == pytest.approx(path_loss_linear(51, 2.2, -30), rel=0.02)
    assert ch.h_t.shape == (50, 32) and ch.h_r.shape == (2, 50)


def test_default_fading_accepted():
    FadingParams(math.inf, 2.2)
    FadingParams(0.0, 2.8)
    with pytest.raises(ValueError):
        FadingParams(0.0, 0.9)


def test_geometry_distances():
    g = Geometry(hrris_x=51.0, ms_pos=(40.0, 2.0))
    assert g.d_t == 51.0
    assert g.d_r == pytest.approx(math.hypot(11.0, 2.0))
    with pytest.raises(ValueError):
        Geometry(hrris_x=0.0)
    with pytest.raises(ValueError):
        Geometry(hrris_x=40.0, ms_pos=(40.0, 0.0))


def test_same_seed_same_channels():
    args = (Geometry(), 10, 4, 2, FadingParams(1.0, 2.2), FadingParams(0.0, 2.8))
    a = scenario_channels(*args, np.random.default_rng(42))
    b = scenario_channels(*args, np.random.default_rng(42))
    assert a.h_t.tobytes() == b.h_t.tobytes()
    assert a.h_r.tobytes() == b.h_r.tobytes()


def test_dbm_conversion():
    assert dbm_to_mw(0) == 1.0
    assert dbm_to_mw(30) == pytest.approx(1000.0)
    assert dbm_to_mw(-80) == pytest.approx(1e-8)
