import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from comstab import adrc
from comstab.adrc import (AdrcController, EsoState, SefGains, TdState, eso_gains, eso_step,
                          fst, sef, sef_gains, td_step)
from comstab.errors import StabilityMarginError, ZeroInputGainError
from comstab.mechanism import SliderState, plant_step, x_axis_params

from oracles import char_poly_coeffs


def test_gain_values():
    assert eso_gains(1000) == (3000, 3_000_000, 1_000_000_000)
    assert sef_gains(200) == (40000, 400)
    assert eso_gains(1200) == (3600, 4_320_000, 1_728_000_000)
    assert sef_gains(250) == (62500, 500)
    assert SefGains(250).kp == 62500 and SefGains(250).kd == 500


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_bandwidth_must_be_positive(bad):
    with pytest.raises(ValueError):
        eso_gains(bad)
    with pytest.raises(ValueError):
        sef_gains(bad)


@given(st.floats(0.5, 2000.0))
def test_observer_poles_triple(wo):
    got = char_poly_coeffs(adrc.observer_matrix(wo))
    want = np.array([1.0, 3 * wo, 3 * wo ** 2, wo ** 3])
    np.testing.assert_allclose(got, want, rtol=1e-6)


def test_margin_guard():
    adrc.check_margin(1000, 0.001, 200)
    adrc.check_margin(1200, 0.001, 250)
    with pytest.raises(StabilityMarginError):
        adrc.check_margin(3000, 0.001, 200)
    with pytest.raises(StabilityMarginError):
        AdrcController(wo=5000)
    AdrcController(wo=5000, dt=0.0002)


def test_discrete_observer_poles():
    dt = 0.001
    for wo in (100.0, 1000.0, 1200.0):
        l = np.array(adrc.discrete_eso_gains(wo, dt))
        Ad = np.array([[1, dt, dt * dt / 2], [0, 1, dt], [0, 0, 1]])
        E = (np.eye(3) - np.outer(l, [1, 0, 0])) @ Ad
        np.testing.assert_allclose(char_poly_coeffs(E), np.poly([math.exp(-wo * dt)] * 3), atol=1e-9)


def test_closed_loop_matrix_matches_simulation():
    dt, b0 = 0.001, 0.08
    c = AdrcController(1000, 200, b0, dt=dt, u_max=1e9)
    M = adrc.closed_loop_matrix(1000, 200, b0, dt)
    rng = np.random.default_rng(3)
    x = rng.normal(size=6) * 1e-3
    c.state[2:6] = x[2:]
    y, v = x[0], x[1]
    u = c.step(0.0, y)
    v2 = v + dt * b0 * u
    got = np.array([y + dt * v2, v2, *c.state[2:5], u])
    np.testing.assert_allclose(got, M @ x, rtol=1e-9, atol=1e-15)


def test_zero_b0():
    with pytest.raises(ZeroInputGainError):
        AdrcController(b0=0.0)
    with pytest.raises(ZeroInputGainError):
        sef(0, 0, 0, 0, 0, SefGains(), 0.0)


def test_td_state_checks():
    with pytest.raises(ValueError):
        TdState(r=0.0)
    with pytest.raises(ValueError):
        TdState(h0=0.0005, dt=0.001)


def test_sef_zero_when_tracking():
    assert sef(0.1, 0.0, 0.1, 0.0, 0.0, SefGains(), 0.08) == 0.0
    assert sef(0.0, 0.0, 0.0, 0.0, 0.8, SefGains(), 0.08) == pytest.approx(-10.0)


@settings(deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0.1, 100), st.floats(0.001, 0.01))
def test_fst_bounded(e, v, r, h0):
    assert abs(fst(e, v, r, h0)) <= r * (1 + 1e-12)


def test_fst_grid_bounded_and_odd():
    es = np.linspace(-1, 1, 201)
    out = adrc.fst_grid(es, es * 2, 1.5, 0.002)
    assert np.abs(out).max() <= 1.5
    np.testing.assert_allclose(out, -out[::-1, ::-1], atol=1e-12)


def test_td_fixed_point():
    s = TdState(rd1=0.2, rd2=0.0)
    assert td_step(s, 0.2) == s


def _td_run(r, n=3000, yd=0.05):
    s = TdState(r=r)
    out = []
    for _ in range(n):
        s = td_step(s, yd)
        out.append(s.rd1)
    return np.array(out), s


def test_td_converges_without_overshoot():
    traj, s = _td_run(1.0)
    assert s.rd1 == pytest.approx(0.05, abs=1e-6)
    assert abs(s.rd2) < 1e-4
    assert traj.max() <= 0.05 + 1.0 * 0.002 ** 2


def test_td_faster_with_larger_r():
    def t90(traj):
        return np.flatnonzero(traj >= 0.045)[0]
    assert t90(_td_run(2.0)[0]) < t90(_td_run(1.0)[0])


def test_eso_estimates_constant_disturbance():
    dt, b0, d = 0.001, 0.08, 0.7
    s = EsoState(wo=500.0, b0=b0)
    y, v = 0.0, 0.0
    for _ in range(2000):
        v += d * dt
        y += v * dt
        s = eso_step(s, y, 0.0, dt)
    assert s.z3 == pytest.approx(d, rel=1e-3)


def test_eso_error_shrinks_with_bandwidth():
    def err(wo):
        dt = 0.0005
        s = EsoState(wo=wo)
        y = v = 0.0
        worst = 0.0
        for k in range(4000):
            f = math.sin(2 * math.pi * 2 * k * dt)
            v += f * dt
            y += v * dt
            s = eso_step(s, y, 0.0, dt)
            if k > 1000:
                worst = max(worst, abs(s.z3 - f))
        return worst
    e250, e500, e1000 = err(250), err(500), err(1000)
    assert e1000 < e500 < e250


def _closed_loop(n, yd=0.05, disturbance=lambda k: 0.0):
    pl = x_axis_params()
    c = AdrcController(1000, 200, pl.b0)
    s = SliderState()
    ys = np.empty(n)
    for k in range(n):
        u = c.step(yd, s.y)
        s = plant_step(s, u, 0.001, pl, disturbance(k))
        ys[k] = s.y
    return ys, c


def test_step_settles_without_oscillation():
    ys, c = _closed_loop(3000)
    err = np.abs(ys - 0.05) / 0.05
    settle = np.flatnonzero(err > 0.02)[-1] + 1
    assert settle < 1000
    assert err[-1000:].max() < 1e-9
    assert ys.max() <= 0.05 * 1.02


def test_step_voltage_quiet_in_steady_state():
    pl = x_axis_params()
    c = AdrcController(1000, 200, pl.b0)
    s = SliderState()
    us = []
    for _ in range(3000):
        us.append(c.step(0.05, s.y))
        s = plant_step(s, us[-1], 0.001, pl)
    assert np.ptp(us[-1000:]) < 1e-6


def test_constant_disturbance_rejected():
    ys, _ = _closed_loop(4000, disturbance=lambda k: 0.5 if k >= 2000 else 0.0)
    err = np.abs(ys[2000:2100] - 0.05) / 0.05
    assert err.max() < 0.01
    assert abs(ys[-1] - 0.05) < 1e-9


def test_zero_demand_zero_output():
    pl = x_axis_params()
    c = AdrcController(b0=pl.b0)
    assert all(c.step(0.0, 0.0) == 0.0 for _ in range(100))


def test_controller_views_and_reset():
    c = AdrcController()
    c.step(0.05, 0.0)
    assert c.td.rd2 != 0.0
    assert isinstance(c.eso, EsoState)
    c.reset(0.1)
    assert c.td.rd1 == 0.1 and c.eso.z1 == 0.1 and c.u == 0.0


def test_adrc_step_dt_mismatch():
    c = AdrcController()
    u, same = adrc.adrc_step(c, 0.01, 0.0, 0.001)
    assert same is c and u == c.u
    with pytest.raises(ValueError):
        adrc.adrc_step(c, 0.01, 0.0, 0.002)


def test_output_saturates():
    c = AdrcController(u_max=24.0)
    us = [c.step(1.0, 0.0) for _ in range(50)]
    assert max(abs(u) for u in us) <= 24.0
