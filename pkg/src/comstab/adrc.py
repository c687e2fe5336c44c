"""Linear second-order ADRC for slider displacement tracking.

Pipeline per tick: fastest tracking differentiator (smooths the demand and
produces its derivative) -> linear extended state observer (position,
velocity, total disturbance) -> state-error feedback with disturbance
compensation.  Gains follow the bandwidth parameterization: observer poles
all at -wo, closed loop poles at -wc.

The observer runs as a current estimator: an exact zero-order-hold
prediction of the integrator chain, then a correction with the newest
measurement whose gains put the discrete error poles at exp(-wo dt), the
image of the continuous triple pole.  A forward-Euler observer would need
dt*wo well below 1 to keep the whole loop stable.
"""
from dataclasses import dataclass, replace
import math

import numpy as np

from ._accel import kernel
from .errors import StabilityMarginError, ZeroInputGainError

# largest closed-loop spectral radius admitted by the guard
ESO_MARGIN = 0.999


def eso_gains(wo):
    if not wo > 0:
        raise ValueError("observer bandwidth must be positive")
    return 3.0 * wo, 3.0 * wo * wo, wo ** 3


def sef_gains(wc):
    if not wc > 0:
        raise ValueError("controller bandwidth must be positive")
    return wc * wc, 2.0 * wc


def discrete_eso_gains(wo, dt):
    """Current-estimator correction gains with all error poles at exp(-wo dt)."""
    if not wo > 0 or not dt > 0:
        raise ValueError("observer bandwidth and sample period must be positive")
    beta = math.exp(-wo * dt)
    return (1.0 - beta ** 3, 1.5 * (1.0 - beta) ** 2 * (1.0 + beta) / dt,
            (1.0 - beta) ** 3 / (dt * dt))


def observer_matrix(wo):
    """A - L C for the three-state observer."""
    p1, p2, p3 = eso_gains(wo)
    return np.array([[-p1, 1.0, 0.0], [-p2, 0.0, 1.0], [-p3, 0.0, 0.0]])


@dataclass(frozen=True)
class EsoState:
    z1: float = 0.0
    z2: float = 0.0
    z3: float = 0.0
    wo: float = 1000.0
    b0: float = 0.08

    @property
    def gains(self):
        return eso_gains(self.wo)


@dataclass(frozen=True)
class TdState:
    rd1: float = 0.0
    rd2: float = 0.0
    r: float = 1.0
    h0: float = 0.002
    dt: float = 0.001

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("speed factor r must be positive")
        if self.h0 < self.dt:
            raise ValueError("filter factor h0 must be at least the sample period")


@dataclass(frozen=True)
class SefGains:
    wc: float = 200.0

    @property
    def kp(self):
        return self.wc * self.wc

    @property
    def kd(self):
        return 2.0 * self.wc


# -- kernels -----------------------------------------------------------------

@kernel
def fst(e, rd2, r, h0):
    """Time-optimal synthesis function for tracking error ``e`` and rate ``rd2``."""
    p = r * h0
    p0 = h0 * p
    v = e + h0 * rd2
    if abs(v) > p0:
        w0 = math.sqrt(p * p + 8.0 * r * abs(v))
        s = 1.0 if v > 0.0 else -1.0
        w = rd2 + 0.5 * (w0 - p) * s
    else:
        w = rd2 + v / h0
    if abs(w) > p:
        return -r if w > 0.0 else r
    return -r * w / p


@kernel
def fst_grid(errors, rates, r, h0):
    out = np.empty((errors.shape[0], rates.shape[0]))
    for i in range(errors.shape[0]):
        for j in range(rates.shape[0]):
            out[i, j] = fst(errors[i], rates[j], r, h0)
    return out


@kernel
def _eso_update(z1, z2, z3, y, u, b0, l1, l2, l3, dt):
    """Predict over one held-input period, then correct with measurement ``y``."""
    h = 0.5 * dt * dt
    p1 = z1 + dt * z2 + h * (z3 + b0 * u)
    p2 = z2 + dt * (z3 + b0 * u)
    e = y - p1
    return p1 + l1 * e, p2 + l2 * e, z3 + l3 * e


@kernel
def _td_update(rd1, rd2, yd, r, h0, dt):
    return rd1 + dt * rd2, rd2 + dt * fst(rd1 - yd, rd2, r, h0)


@kernel
def adrc_tick(s, p, yd, y, dt):
    """In-place tick.  s = [rd1, rd2, z1, z2, z3, u_prev];
    p = [r, h0, l1, l2, l3, b0, kp, kd, u_max] with l the discrete observer gains."""
    rd1, rd2 = _td_update(s[0], s[1], yd, p[0], p[1], dt)
    z1, z2, z3 = _eso_update(s[2], s[3], s[4], y, s[5], p[5], p[2], p[3], p[4], dt)
    u = p[6] * (rd1 - z1) + p[7] * (rd2 - z2)
    uo = (u - z3) / p[5]
    if uo > p[8]:
        uo = p[8]
    elif uo < -p[8]:
        uo = -p[8]
    s[0] = rd1
    s[1] = rd2
    s[2] = z1
    s[3] = z2
    s[4] = z3
    s[5] = uo
    return uo


# -- value-style operations --------------------------------------------------

def closed_loop_matrix(wo, wc, b0, dt):
    """One-tick linear map of (y, y', z1, z2, z3, u_prev) for the observer, the
    state feedback and an undamped double-integrator plant (semi-implicit Euler)."""
    l1, l2, l3 = discrete_eso_gains(wo, dt)
    kp, kd = sef_gains(wc)
    h = 0.5 * dt * dt
    Ad = np.array([[1.0, dt, h], [0.0, 1.0, dt], [0.0, 0.0, 1.0]])
    Bd = np.array([b0 * h, b0 * dt, 0.0])
    Lc = np.array([l1, l2, l3])
    IC = np.eye(3) - np.outer(Lc, [1.0, 0.0, 0.0])
    M = np.zeros((6, 6))
    M[2:5, 0] = Lc                      # measurement
    M[2:5, 2:5] = IC @ Ad
    M[2:5, 5] = IC @ Bd
    K = -np.array([kp, kd, 1.0]) / b0   # u = K z
    M[5] = K @ M[2:5]
    v = np.zeros(6)
    v[1] = 1.0
    v = v + dt * b0 * M[5]
    M[1] = v
    M[0] = dt * v
    M[0, 0] += 1.0
    return M


def closed_loop_radius(wo, wc, b0, dt):
    return float(np.max(np.abs(np.linalg.eigvals(closed_loop_matrix(wo, wc, b0, dt)))))


def check_margin(wo, dt, wc=None, b0=0.08):
    """Refuse bandwidths whose sampled loop is not asymptotically stable.

    Without ``wc`` only the observer is checked, which is stable for every
    wo > 0 in the current-estimator form.
    """
    discrete_eso_gains(wo, dt)
    if wc is None:
        return
    rho = closed_loop_radius(wo, wc, b0, dt)
    if rho > ESO_MARGIN:
        raise StabilityMarginError(
            f"wo={wo:g}, wc={wc:g} at dt={dt:g}: sampled loop spectral radius {rho:.3f} >= 1")


def eso_step(state, y_measured, u, dt):
    l1, l2, l3 = discrete_eso_gains(state.wo, dt)
    z1, z2, z3 = _eso_update(state.z1, state.z2, state.z3, float(y_measured), float(u),
                             state.b0, l1, l2, l3, dt)
    return replace(state, z1=z1, z2=z2, z3=z3)


def td_step(state, yd):
    rd1, rd2 = _td_update(state.rd1, state.rd2, float(yd), state.r, state.h0, state.dt)
    return replace(state, rd1=rd1, rd2=rd2)


def sef(rd1, rd2, z1, z2, z3, gains, b0):
    if b0 == 0:
        raise ZeroInputGainError("b0 must be non-zero")
    u = gains.kp * (rd1 - z1) + gains.kd * (rd2 - z2)
    return (u - z3) / b0


@dataclass
class AdrcController:
    """Bundle of TD, ESO and SEF for one slider axis."""
    wo: float = 1000.0
    wc: float = 200.0
    b0: float = 0.08
    r: float = 1.0
    h0: float = 0.002
    dt: float = 0.001
    u_max: float = 24.0

    def __post_init__(self):
        if self.b0 == 0:
            raise ZeroInputGainError("b0 must be non-zero")
        check_margin(self.wo, self.dt, self.wc, self.b0)
        TdState(r=self.r, h0=self.h0, dt=self.dt)
        l1, l2, l3 = discrete_eso_gains(self.wo, self.dt)
        kp, kd = sef_gains(self.wc)
        self.params = np.array([self.r, self.h0, l1, l2, l3, self.b0, kp, kd, self.u_max])
        self.state = np.zeros(6)

    def reset(self, y0=0.0):
        self.state[:] = 0.0
        self.state[0] = y0
        self.state[2] = y0

    @property
    def td(self):
        return TdState(self.state[0], self.state[1], self.r, self.h0, self.dt)

    @property
    def eso(self):
        return EsoState(self.state[2], self.state[3], self.state[4], self.wo, self.b0)

    @property
    def u(self):
        return self.state[5]

    def step(self, yd, y_measured):
        return adrc_tick(self.state, self.params, float(yd), float(y_measured), self.dt)


def adrc_step(controller, yd, y_measured, dt=None):
    """TD -> ESO -> SEF once; returns (saturated voltage, controller)."""
    if dt is not None and not math.isclose(dt, controller.dt):
        raise ValueError("controller was built for a different sample period")
    return controller.step(yd, y_measured), controller
