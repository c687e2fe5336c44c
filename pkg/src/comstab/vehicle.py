"""Two-degree-of-freedom (lateral + yaw) steady-state steering model.

Cornering stiffnesses are stored positive and used directly in the
steady-state equations, so the stability factor reads

    K = m / L^2 * (a / k2 - b / k1)

and grows as the COM moves rearward (a grows).  A slider displacement
``y`` (positive toward the front axle) moves the COM by ``ms * y / m``.
"""
from dataclasses import dataclass, replace
import math

import numpy as np
from scipy.optimize import brentq

from .errors import (ComOutsideWheelbaseError, OversteerSingularityError, ParameterError,
                     SingularSystemError, ZeroStiffnessError, ZeroYawRateError)

EPS_SPEED = 0.01
DEG_PER_RAD = 57.3
G = 9.81

K_NOMINAL = 0.00097
K_DESIRED = 0.0024
REFERENCE_EXCURSION = -0.289


@dataclass(frozen=True)
class VehicleParams:
    total_mass: float = 450.0
    yaw_inertia: float = 270.0
    front_stiffness: float = 9500.0
    rear_stiffness: float = 9500.0
    wheelbase: float = 1.6
    front_dist: float = 0.8
    rear_dist: float = 0.8
    slider_mass: float = 60.0

    def __post_init__(self):
        if self.total_mass <= 0:
            raise ParameterError("total mass must be positive")
        if self.wheelbase <= 0:
            raise ParameterError("wheelbase must be positive")
        if not math.isclose(self.front_dist + self.rear_dist, self.wheelbase, rel_tol=0, abs_tol=1e-12):
            raise ParameterError("front_dist + rear_dist must equal the wheelbase")

    @property
    def m(self):
        return self.total_mass

    @property
    def L(self):
        return self.wheelbase


@dataclass(frozen=True)
class SteeringState:
    ux: float
    uy: float = 0.0
    yaw_rate: float = 0.0
    delta: float = 0.0

    @property
    def sideslip(self):
        if abs(self.ux) <= EPS_SPEED:
            return 0.0
        return self.uy / self.ux


def com_shift(slider_y, params):
    """Axle distances (a, b) after moving the slider to ``slider_y``."""
    shift = params.slider_mass * slider_y / params.total_mass
    a = params.front_dist - shift
    b = params.wheelbase - a
    if a <= 0 or b <= 0:
        raise ComOutsideWheelbaseError(f"COM outside wheelbase: a={a:.4f}, b={b:.4f}")
    return a, b


def stability_factor(a, b, params):
    k1, k2 = params.front_stiffness, params.rear_stiffness
    if k1 == 0 or k2 == 0:
        raise ZeroStiffnessError("cornering stiffness must be non-zero")
    L = params.wheelbase
    return params.total_mass / (L * L) * (a / k2 - b / k1)


def stability_factor_at(slider_y, params):
    a, b = com_shift(slider_y, params)
    return stability_factor(a, b, params)


def slider_for_stability_factor(K, params):
    """Slider position giving stability factor ``K`` (K is affine in the slider)."""
    k0 = stability_factor_at(0.0, params)
    L = params.wheelbase
    slope = -params.slider_mass / (L * L) * (1.0 / params.rear_stiffness + 1.0 / params.front_stiffness)
    return (K - k0) / slope


def yaw_rate_gain(ux, K, L, eps=1e-9):
    den = 1.0 + K * ux * ux
    if abs(den) <= eps:
        raise OversteerSingularityError(f"1 + K ux^2 vanishes at ux={ux:.4g} m/s")
    return (ux / L) / den


def characteristic_speed(K):
    if K <= 0:
        raise ValueError("characteristic speed is defined for K > 0 only")
    return math.sqrt(1.0 / K)


def steady_state_matrix(ux, params, a, b):
    k1, k2, m = params.front_stiffness, params.rear_stiffness, params.total_mass
    return np.array([
        [k1 + k2, (a * k1 - b * k2) / ux - m * ux],
        [a * k1 - b * k2, (a * a * k1 + b * b * k2) / ux],
    ])


def steady_state_solve(delta, ux, params, a, b, cond_limit=1e12):
    """Sideslip and yaw rate of constant-speed cornering for steer ``delta``."""
    if ux == 0:
        raise SingularSystemError("steady state undefined at zero speed")
    A = steady_state_matrix(ux, params, a, b)
    rhs = np.array([params.front_stiffness * delta, a * params.front_stiffness * delta])
    if not np.isfinite(np.linalg.cond(A)) or np.linalg.cond(A) > cond_limit:
        raise SingularSystemError("steady-state system is singular (oversteer critical speed)")
    beta, wr = np.linalg.solve(A, rhs)
    return float(beta), float(wr)


def steady_state_residual(delta, ux, params, a, b, beta, wr):
    A = steady_state_matrix(ux, params, a, b)
    rhs = np.array([params.front_stiffness * delta, a * params.front_stiffness * delta])
    res = A @ np.array([beta, wr]) - rhs
    scale = np.abs(A) @ np.abs(np.array([beta, wr])) + np.abs(rhs)
    return float(np.max(np.abs(res) / np.where(scale > 0, scale, 1.0)))


def steady_test_reduce(points, R0, L):
    """Constant-radius test reduction.

    ``points`` are (delta, ux, yaw_rate) tuples.  Returns rows of
    (ay, alpha_diff_deg, K_est); the 57.3 deg/rad factor of the slip-angle
    deviation is divided back out so K_est has the units of K.
    """
    rows = []
    for delta, ux, wr in points:
        if wr == 0:
            raise ZeroYawRateError("yaw rate must be non-zero")
        R = ux / wr
        ay = ux * wr
        alpha_diff = DEG_PER_RAD * L * (1.0 / R0 - 1.0 / R)
        K_est = alpha_diff / DEG_PER_RAD / (ay * L)
        rows.append((ay, alpha_diff, K_est))
    return rows


def calibrate(K0=K_NOMINAL, K_target=K_DESIRED, excursion=REFERENCE_EXCURSION,
              stiffness_ratio=1.0, base=None):
    """Vehicle parameters reproducing K(0) = K0 and K(excursion) = K_target.

    K is affine in the slider with slope -ms/L^2 (1/k1 + 1/k2), so the
    excursion fixes the total compliance 1/k1 + 1/k2; with the rear/front
    stiffness ratio given, the static COM split a0 is then found by a 1-D
    root-find on K(0) - K0.
    """
    base = base or VehicleParams()
    m, L, ms = base.total_mass, base.wheelbase, base.slider_mass
    compliance = (K_target - K0) * L * L / (ms * -excursion)
    if compliance <= 0:
        raise ParameterError("excursion and K change must have opposite signs")
    k1 = (1.0 + 1.0 / stiffness_ratio) / compliance
    k2 = stiffness_ratio * k1

    def residual(a0):
        p = replace(base, front_stiffness=k1, rear_stiffness=k2, front_dist=a0, rear_dist=L - a0)
        return stability_factor_at(0.0, p) - K0

    a0 = brentq(residual, 1e-6 * L, L * (1 - 1e-6), xtol=1e-15, rtol=1e-15)
    return replace(base, front_stiffness=k1, rear_stiffness=k2, front_dist=a0, rear_dist=L - a0)


_CALIBRATED = None


def calibrated_params():
    global _CALIBRATED
    if _CALIBRATED is None:
        _CALIBRATED = calibrate()
    return _CALIBRATED


def constant_radius_test(params, slider_y=0.0, R0=15.0, ay_max=0.3 * G, ay_step=0.5):
    """Synthetic fixed-steer circle test from the 2-DOF model.

    Steer is fixed at the kinematic angle L/R0; speed is raised so the
    lateral acceleration climbs in steps of at most ``ay_step`` up to
    ``ay_max``.  Returns (delta, ux, yaw_rate) rows.
    """
    a, b = com_shift(slider_y, params)
    K = stability_factor(a, b, params)
    L = params.wheelbase
    delta = L / R0
    n = int(math.ceil(ay_max / ay_step))
    points = []
    for ay in np.linspace(ay_max / n, ay_max, n):
        # ay = ux^2 delta / (L (1 + K ux^2))  ->  ux^2 = ay L / (delta - ay L K)
        ux = math.sqrt(ay * L / (delta - ay * L * K))
        _, wr = steady_state_solve(delta, ux, params, a, b)
        points.append((delta, ux, wr))
    return points
