"""Electromechanical model of one COM-slider axis (motor, ball screw, slider).

The current and torque loops collapse into constants, so the slider obeys

    y'' = -(Bz / J) * y' + b0 * u,    b0 = Ka * Kt * rg / J,  rg = pr / (2 pi)

with ``u`` the motor voltage.
"""
from dataclasses import dataclass, field, replace
import math

from .errors import ParameterError

B0_DEFAULT = 0.08  # m/(s^2 V)


@dataclass(frozen=True)
class PlantParams:
    current_constant: float = 1.0      # Ka, A/V
    torque_constant: float = 0.5       # Kt, N m/A
    inertia: float = float("nan")      # J, kg m^2; nan -> solved from b0
    viscous_damping: float = 0.01      # Bz, N m s/rad
    screw_lead: float = 0.01           # pr, m/rev
    slider_mass: float = 60.0          # ms, kg
    travel_limits: tuple = (-0.35, 0.35)
    voltage_limit: float = 24.0
    guide_ratio: float = field(init=False)
    input_coefficient: float = field(init=False)

    def __post_init__(self):
        if self.screw_lead <= 0:
            raise ParameterError("screw lead must be positive")
        rg = self.screw_lead / (2.0 * math.pi)
        inertia = self.inertia
        if math.isnan(inertia):
            inertia = self.current_constant * self.torque_constant * rg / B0_DEFAULT
            object.__setattr__(self, "inertia", inertia)
        object.__setattr__(self, "guide_ratio", rg)
        object.__setattr__(
            self, "input_coefficient",
            self.current_constant * self.torque_constant * rg / inertia)
        object.__setattr__(self, "travel_limits", tuple(float(v) for v in self.travel_limits))
        self.validate()

    def validate(self):
        if not self.inertia > 0:
            raise ParameterError("inertia J must be positive")
        if self.viscous_damping < 0:
            raise ParameterError("viscous damping Bz must be non-negative")
        lo, hi = self.travel_limits
        if not lo < hi:
            raise ParameterError("travel limits must satisfy ymin < ymax")
        if self.screw_lead <= 0:
            raise ParameterError("screw lead must be positive")
        if self.voltage_limit <= 0:
            raise ParameterError("voltage limit must be positive")

    @property
    def b0(self):
        return self.input_coefficient

    @property
    def damping_ratio(self):
        """Bz / J, the velocity feedback coefficient (1/s)."""
        return self.viscous_damping / self.inertia

    def motor_torque(self, u):
        return self.current_constant * self.torque_constant * u

    def with_b0(self, b0):
        """Same motor constants with J re-solved so that b0 matches."""
        J = self.current_constant * self.torque_constant * (self.screw_lead / (2.0 * math.pi)) / b0
        return replace(self, inertia=J)


def x_axis_params(**overrides):
    return PlantParams(**overrides)


def y_axis_params(**overrides):
    overrides.setdefault("travel_limits", (-0.25, 0.25))
    return PlantParams(**overrides)


@dataclass(frozen=True)
class SliderState:
    y: float = 0.0
    ydot: float = 0.0
    t: float = 0.0


def plant_derivative(state, u, params, disturbance=0.0):
    """Slider acceleration for voltage ``u`` plus an additive acceleration disturbance."""
    return -params.damping_ratio * state.ydot + params.input_coefficient * u + disturbance


def plant_step(state, u, dt, params, disturbance=0.0):
    """Advance one semi-implicit Euler step, clamping at the travel stops."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    acc = plant_derivative(state, u, params, disturbance)
    ydot = state.ydot + acc * dt
    y = state.y + ydot * dt
    lo, hi = params.travel_limits
    if y >= hi:
        y, ydot = hi, 0.0
    elif y <= lo:
        y, ydot = lo, 0.0
    return SliderState(y, ydot, state.t + dt)
