import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from comstab import vehicle
from comstab.errors import (ComOutsideWheelbaseError, OversteerSingularityError, ParameterError,
                            SingularSystemError, ZeroStiffnessError, ZeroYawRateError)
from comstab.vehicle import (K_DESIRED, K_NOMINAL, REFERENCE_EXCURSION, VehicleParams, calibrate,
                             calibrated_params, com_shift, stability_factor, stability_factor_at,
                             steady_state_residual, steady_state_solve, yaw_rate_gain)


def test_calibration_hits_both_points():
    p = calibrated_params()
    assert stability_factor_at(0.0, p) == pytest.approx(K_NOMINAL, abs=1e-12)
    assert stability_factor_at(REFERENCE_EXCURSION, p) == pytest.approx(K_DESIRED, abs=1e-12)
    assert vehicle.slider_for_stability_factor(K_DESIRED, p) == pytest.approx(REFERENCE_EXCURSION)


def test_calibration_with_stiffness_ratio():
    p = calibrate(stiffness_ratio=1.3)
    assert p.rear_stiffness / p.front_stiffness == pytest.approx(1.3)
    assert stability_factor_at(0.0, p) == pytest.approx(K_NOMINAL, abs=1e-12)


def test_calibration_sign_check():
    with pytest.raises(ParameterError):
        calibrate(excursion=0.289)


def test_k_grows_as_com_moves_rearward():
    p = calibrated_params()
    ks = [stability_factor_at(y, p) for y in np.linspace(-0.35, 0.35, 15)]
    assert np.all(np.diff(ks) < 0)


def test_k_affine_in_slider():
    p = calibrated_params()
    ys = np.linspace(-0.3, 0.3, 7)
    ks = np.array([stability_factor_at(y, p) for y in ys])
    slope = -p.slider_mass / p.L ** 2 * (1 / p.front_stiffness + 1 / p.rear_stiffness)
    np.testing.assert_allclose(ks, ks[3] + slope * ys, atol=1e-15)


def test_com_outside_wheelbase():
    with pytest.raises(ComOutsideWheelbaseError):
        com_shift(100.0, VehicleParams())


def test_zero_stiffness():
    p = VehicleParams(front_stiffness=0.0)
    with pytest.raises(ZeroStiffnessError):
        stability_factor(0.8, 0.8, p)


def test_params_validation():
    with pytest.raises(ParameterError):
        VehicleParams(front_dist=0.5, rear_dist=0.5)
    with pytest.raises(ParameterError):
        VehicleParams(total_mass=0.0)


def test_yaw_rate_gain_and_characteristic_speed():
    K, L = 0.0024, 1.6
    uch = vehicle.characteristic_speed(K)
    assert uch == pytest.approx(math.sqrt(1 / K))
    us = np.linspace(0.5 * uch, 1.5 * uch, 201)
    g = [yaw_rate_gain(u, K, L) for u in us]
    assert us[int(np.argmax(g))] == pytest.approx(uch, rel=0.01)
    assert yaw_rate_gain(10.0, 0.0, L) == pytest.approx(10.0 / L)
    with pytest.raises(ValueError):
        vehicle.characteristic_speed(-0.001)


def test_oversteer_singularity():
    K = -0.01
    with pytest.raises(OversteerSingularityError):
        yaw_rate_gain(math.sqrt(-1 / K), K, 1.6)


@settings(max_examples=80)
@given(st.floats(-0.1, 0.1), st.floats(1.0, 40.0), st.floats(-0.3, 0.3))
def test_steady_state_matches_yaw_rate_gain(delta, ux, y):
    assume(abs(delta) > 1e-9)
    p = calibrated_params()
    a, b = com_shift(y, p)
    beta, wr = steady_state_solve(delta, ux, p, a, b)
    assert steady_state_residual(delta, ux, p, a, b, beta, wr) < 1e-9
    K = stability_factor(a, b, p)
    assert wr == pytest.approx(yaw_rate_gain(ux, K, p.L) * delta, rel=1e-9, abs=1e-12)


def test_steady_state_zero_speed():
    p = calibrated_params()
    with pytest.raises(SingularSystemError):
        steady_state_solve(0.01, 0.0, p, p.front_dist, p.rear_dist)


def test_sideslip_guard():
    assert vehicle.SteeringState(ux=0.001, uy=1.0).sideslip == 0.0
    assert vehicle.SteeringState(ux=10.0, uy=1.0).sideslip == pytest.approx(0.1)


def test_steady_test_reduce_recovers_k():
    p = calibrated_params()
    for y in (0.0, REFERENCE_EXCURSION):
        K = stability_factor_at(y, p)
        rows = vehicle.steady_test_reduce(vehicle.constant_radius_test(p, y), 15.0, p.L)
        assert len(rows) >= 5
        for ay, _, k_est in rows:
            assert ay <= 0.3 * vehicle.G + 1e-9
            assert k_est == pytest.approx(K, rel=0.02)


def test_steady_test_zero_yaw():
    with pytest.raises(ZeroYawRateError):
        vehicle.steady_test_reduce([(0.01, 10.0, 0.0)], 15.0, 1.6)


@given(st.floats(0.0005, 0.005))
def test_reduction_exact_on_model_data(K):
    # synthetic points built straight from 1/R = 1/R0 - K ay (small-angle model)
    L, R0 = 1.6, 15.0
    delta = L / R0
    pts = []
    for ay in (1.0, 2.0, 2.9):
        ux = math.sqrt(ay * L / (delta - ay * L * K))
        pts.append((delta, ux, ay / ux))
    for _, _, k_est in vehicle.steady_test_reduce(pts, R0, L):
        assert k_est == pytest.approx(K, rel=1e-9)
