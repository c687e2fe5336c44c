"""Closed-loop scenarios, disturbances and step-response metrics.

Steering: the X slider moves the COM, changing the stability factor K,
which a (fuzzy) PID regulates to K_d.  Walking: a planned gait is played
back, the slider displacements shift the whole-body COM and hence the
ZMP, and a variable-universe fuzzy controller plus two ADRC loops (or a
plain PID baseline) keep the ZMP on its reference.
"""
from dataclasses import dataclass, replace
import math

import numpy as np

from . import fuzzy, grader, kinematics, vehicle
from . import gait as gait_mod
from ._accel import kernel
from .fuzzy import mamdani2
from .adrc import AdrcController
from .errors import BallisticPhaseError, ParameterError
from .mechanism import SliderState, plant_step, x_axis_params, y_axis_params

STEERING_VARIANTS = ("none", "pid", "fuzzy-pid")
WALKING_VARIANTS = ("pid", "vufc-adrc", "vufc-adrc+grading")


# -- metrics ------------------------------------------------------------------

@dataclass(frozen=True)
class Metrics:
    steady_state_error: float   # %
    overshoot: float            # %
    rise_time: float            # s, nan if never reached
    settling_time: float        # s, nan if never settled
    max_tracking_error: float
    saturated: bool = False

    def row(self):
        return (self.steady_state_error, self.overshoot, self.rise_time, self.settling_time,
                self.max_tracking_error)


def compute_metrics(t, trace, reference, initial=None, band=0.02):
    """Step-response indicators of ``trace`` moving from ``initial`` toward ``reference``.

    overshoot = (peak - final) / (final - initial) * 100, peak taken in the
    step direction; rise time 10% -> 90%; settling time = last entry into
    the +-band around the reference; steady-state error from the mean of
    the last 10% of the trace.  Undefined quantities are nan.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(trace, dtype=float)
    if y.size == 0:
        raise ValueError("empty trace")
    y0 = y[0] if initial is None else float(initial)
    ref = np.broadcast_to(np.asarray(reference, dtype=float), y.shape)
    r = float(ref[-1])
    span = r - y0
    tail = y[-max(1, y.size // 10):]
    final = float(tail.mean())
    sse = abs(final - r) / abs(r) * 100.0 if r != 0 else abs(final - r) * 100.0
    max_err = float(np.max(np.abs(y - ref)))
    if span == 0:
        return Metrics(sse, 0.0, 0.0, 0.0, max_err)
    direction = math.copysign(1.0, span)
    progress = (y - y0) / span
    peak = float(np.max(direction * y) * direction)
    denom = final - y0
    overshoot = max(0.0, (peak - final) / denom * 100.0) if denom != 0 else math.nan

    def first_cross(level):
        idx = np.flatnonzero(progress >= level)
        return t[idx[0]] if idx.size else math.nan

    rise = first_cross(0.9) - first_cross(0.1)
    outside = np.flatnonzero(np.abs(y - r) > band * abs(r if r != 0 else span))
    if outside.size == 0:
        settle = 0.0
    elif outside[-1] + 1 < y.size:
        settle = float(t[outside[-1] + 1] - t[0])
    else:
        settle = math.nan
    return Metrics(sse, overshoot, float(rise), settle, max_err)


# -- disturbances --------------------------------------------------------------

@dataclass(frozen=True)
class DisturbanceTerm:
    """One schedule entry.

    kind: 'step' (value from t0 on), 'impulse' (value for ``width`` s from
    t0) or 'noise' (band-limited Gaussian, std ``value``, cut-off
    ``bandwidth`` Hz, active from t0).  ``target`` names the channel.
    """
    kind: str
    target: str
    t0: float = 0.0
    value: float = 0.0
    width: float = 0.01
    bandwidth: float = 5.0

    def __post_init__(self):
        if self.kind not in ("step", "impulse", "noise"):
            raise ParameterError(f"unknown disturbance kind {self.kind!r}")


class DisturbanceSchedule:
    """Deterministic per-channel disturbance signals sampled on a fixed grid."""

    def __init__(self, terms=(), seed=0, dt=0.001, duration=10.0):
        terms = tuple(terms)
        if any(b.t0 < a.t0 for a, b in zip(terms, terms[1:])):
            raise ParameterError("disturbance schedule must be time-ordered")
        self.terms = terms
        self.seed = seed
        self.dt = dt
        self.n = int(round(duration / dt)) + 1
        self._signals = {}
        rng = np.random.default_rng(seed)
        t = np.arange(self.n) * dt
        for term in terms:
            sig = self._signals.setdefault(term.target, np.zeros(self.n))
            if term.kind == "step":
                sig += np.where(t >= term.t0 - 1e-12, term.value, 0.0)
            elif term.kind == "impulse":
                sig += np.where((t >= term.t0 - 1e-12) & (t < term.t0 + term.width - 1e-12), term.value, 0.0)
            else:
                sig += np.where(t >= term.t0 - 1e-12, band_limited_noise(rng, self.n, dt, term.bandwidth, term.value), 0.0)

    def channels(self):
        return tuple(self._signals)

    def signal(self, target):
        return self._signals.get(target, np.zeros(self.n))

    def at(self, t):
        k = min(max(int(round(t / self.dt)), 0), self.n - 1)
        return {name: float(sig[k]) for name, sig in self._signals.items()}


def band_limited_noise(rng, n, dt, bandwidth, std):
    """Gaussian noise through a first-order low-pass, rescaled to ``std``."""
    if std == 0:
        return np.zeros(n)
    white = rng.standard_normal(n)
    a = math.exp(-2.0 * math.pi * bandwidth * dt)
    out = np.empty(n)
    acc = 0.0
    gain = math.sqrt(1.0 - a * a)
    for i in range(n):
        acc = a * acc + gain * white[i]
        out[i] = acc
    return std * out


def inject_disturbance(schedule, t):
    """Channel values of ``schedule`` at time ``t`` (empty schedule -> {})."""
    if schedule is None:
        return {}
    return schedule.at(t)


# -- steering -------------------------------------------------------------------

@dataclass(frozen=True)
class SteeringScenario:
    controller: str = "fuzzy-pid"
    duration: float = 5.0
    control_rate: float = 1000.0
    K_desired: float = vehicle.K_DESIRED
    error_gain: float = 110.0       # Ge: K deviation -> Ke
    rate_gain: float = 175.0        # Gec: dK/dt -> Kec
    output_gain: float = 60.0       # Gu: PID output -> motor voltage
    fuzzy_error_gain: float = None  # e -> inference universe (None -> Ge)
    fuzzy_rate_gain: float = 7.0    # ec -> inference universe (None -> Gec)
    kp0: float = 15.0
    ki0: float = 0.8
    kd0: float = 9.0
    voltage_limit: float = 24.0
    slider_disturbance: float = 0.0   # constant slider acceleration offset, m/s^2
    seed: int = 0

    def __post_init__(self):
        if self.controller not in STEERING_VARIANTS:
            raise ParameterError(f"steering controller must be one of {STEERING_VARIANTS}")
        if self.duration <= 0:
            raise ParameterError("duration must be positive")
        if self.control_rate < 100:
            raise ParameterError("control rate must be at least 100 Hz")
        if self.fuzzy_error_gain is None:
            object.__setattr__(self, "fuzzy_error_gain", self.error_gain)
        if self.fuzzy_rate_gain is None:
            object.__setattr__(self, "fuzzy_rate_gain", self.rate_gain)

    @property
    def dt(self):
        return 1.0 / self.control_rate


@dataclass
class SteeringResult:
    t: np.ndarray
    K: np.ndarray
    y: np.ndarray
    u: np.ndarray
    K_desired: float
    metrics: Metrics
    saturated: bool

    def rows(self):
        for i in range(self.t.size):
            yield (self.t[i], self.K[i], self.K_desired, self.y[i], self.u[i])


STEERING_COLUMNS = ("t", "K", "Kd", "y_x", "u")


@kernel
def steering_kernel(n, dt, K0, slope, Kd, Ge, Gec, Qe, Qec, Gu, kp0, ki0, kd0, umax, fuzzy_on,
                    damping, b0, ylo, yhi, disturbance, lo_e, hi_e, lo_ec, hi_ec,
                    rules, out_mf, grids):
    """Whole steering run; rules/out_mf/grids stack the (kp, ki, kd) engines."""
    K = np.empty(n)
    y_log = np.empty(n)
    u_log = np.empty(n)
    y = 0.0
    v = 0.0
    integral = 0.0
    prev_e = K0 - Kd
    saturated = False
    for i in range(n):
        k = K0 + slope * y
        K[i] = k
        y_log[i] = y
        e = k - Kd
        ec = (e - prev_e) / dt
        prev_e = e
        Ke = Ge * e
        Kec = Gec * ec
        dkp = 0.0
        dki = 0.0
        dkd = 0.0
        if fuzzy_on:
            fe = Qe * e
            fec = Qec * ec
            dkp = mamdani2(fe, lo_e, hi_e, 7, fec, lo_ec, hi_ec, 7, rules[0], out_mf[0], grids[0])
            dki = mamdani2(fe, lo_e, hi_e, 7, fec, lo_ec, hi_ec, 7, rules[1], out_mf[1], grids[1])
            dkd = mamdani2(fe, lo_e, hi_e, 7, fec, lo_ec, hi_ec, 7, rules[2], out_mf[2], grids[2])
        ki = ki0 + dki
        candidate = integral + Ke * dt
        raw = Gu * ((kp0 + dkp) * Ke + ki * candidate + (kd0 + dkd) * Kec)
        u = raw
        if u > umax:
            u = umax
        elif u < -umax:
            u = -umax
        if raw == u or (raw > umax and Gu * ki * Ke < 0.0) or (raw < -umax and Gu * ki * Ke > 0.0):
            integral = candidate
        u_log[i] = u
        acc = -damping * v + b0 * u + disturbance
        v = v + acc * dt
        y = y + v * dt
        if y >= yhi:
            y = yhi
            v = 0.0
            saturated = True
        elif y <= ylo:
            y = ylo
            v = 0.0
            saturated = True
    return K, y_log, u_log, saturated


def _stacked_engines(engines):
    rules = np.stack([e.rules for e in engines])
    out_mf = np.stack([e.out_mf for e in engines])
    grids = np.stack([e.grid for e in engines])
    return rules, out_mf, grids


def stability_slope(vp):
    """dK/dy of the slider (K is affine in the slider position)."""
    L = vp.wheelbase
    return -vp.slider_mass / (L * L) * (1.0 / vp.front_stiffness + 1.0 / vp.rear_stiffness)


def run_steering(scenario=SteeringScenario(), vehicle_params=None, plant=None):
    """Closed steering loop: K measured from the slider, (fuzzy) PID drives the X slider."""
    vp = vehicle_params or vehicle.calibrated_params()
    plant = plant or x_axis_params()
    dt = scenario.dt
    n = int(round(scenario.duration / dt)) + 1
    t = np.arange(n) * dt
    K0 = vehicle.stability_factor_at(0.0, vp)
    Kd = scenario.K_desired
    if scenario.controller == "none":
        K = np.full(n, K0)
        y = np.zeros(n)
        u = np.zeros(n)
        saturated = False
    else:
        engines = fuzzy.default_gain_engines()
        rules, out_mf, grids = _stacked_engines(engines)
        ke, kec = engines[0].inputs
        lo, hi = plant.travel_limits
        K, y, u, saturated = steering_kernel(
            n, dt, K0, stability_slope(vp), Kd, scenario.error_gain, scenario.rate_gain,
            scenario.fuzzy_error_gain, scenario.fuzzy_rate_gain,
            scenario.output_gain, scenario.kp0, scenario.ki0, scenario.kd0, scenario.voltage_limit,
            scenario.controller == "fuzzy-pid", plant.damping_ratio, plant.b0, lo, hi,
            scenario.slider_disturbance, ke.lo, ke.hi, kec.lo, kec.hi, rules, out_mf, grids)
    metrics = replace(compute_metrics(t, K, np.full(n, Kd)), saturated=bool(saturated))
    return SteeringResult(t, K, y, u, Kd, metrics, bool(saturated))


def run_steering_reference(scenario=SteeringScenario(), vehicle_params=None, plant=None):
    """Same loop assembled from the value-level operations (slow; used as an oracle)."""
    vp = vehicle_params or vehicle.calibrated_params()
    plant = plant or x_axis_params()
    dt = scenario.dt
    n = int(round(scenario.duration / dt)) + 1
    K = np.empty(n)
    y = np.empty(n)
    u = np.zeros(n)
    state = SliderState()
    pid = fuzzy.FuzzyPidState(kp0=scenario.kp0, ki0=scenario.ki0, kd0=scenario.kd0,
                              u_min=-scenario.voltage_limit, u_max=scenario.voltage_limit,
                              output_gain=scenario.output_gain,
                              fuzzy=scenario.controller == "fuzzy-pid")
    Kd = scenario.K_desired
    prev_e = vehicle.stability_factor_at(0.0, vp) - Kd
    for i in range(n):
        K[i] = vehicle.stability_factor_at(state.y, vp)
        y[i] = state.y
        if scenario.controller != "none":
            e = K[i] - Kd
            ec = (e - prev_e) / dt
            prev_e = e
            u[i] = fuzzy.fuzzy_pid_step(scenario.error_gain * e, scenario.rate_gain * ec, pid, dt,
                                        (scenario.fuzzy_error_gain * e, scenario.fuzzy_rate_gain * ec))
        state = plant_step(state, u[i], dt, plant, scenario.slider_disturbance)
    return np.arange(n) * dt, K, y, u


# -- walking --------------------------------------------------------------------

# slider force offsets (m/s^2 on the slider) and torso accelerations (m/s^2)
WALK_CHANNELS = ("slider_x", "slider_y", "torso_x", "torso_y")
DEFAULT_WALK_DISTURBANCES = (
    DisturbanceTerm("step", "slider_x", t0=2.0, value=0.5),
    DisturbanceTerm("step", "slider_y", t0=2.0, value=0.3),
)


@dataclass(frozen=True)
class WalkingScenario:
    controller: str = "vufc-adrc+grading"
    duration: float = 6.0
    control_rate: float = 1000.0
    disturbances: tuple = DEFAULT_WALK_DISTURBANCES
    seed: int = 0
    rate_window: float = 0.1            # ZMPec = change of ZMPe over this window, m
    observer: tuple = ((1000.0, 200.0), (1200.0, 250.0))   # (wo, wc) for X, Y
    spans: tuple = ((0.12, 0.06), (0.06, 0.05))           # (E0, EC0) for X, Y
    ungraded_level: int = 3
    pid_gains: tuple = (15.0, 0.8, 9.0, 40.0)   # kp, ki, kd, output gain
    switch_window: float = 0.15
    gait: gait_mod.GaitParams = None

    def __post_init__(self):
        if self.controller not in WALKING_VARIANTS:
            raise ParameterError(f"walking controller must be one of {WALKING_VARIANTS}")
        if self.duration <= 0:
            raise ParameterError("duration must be positive")
        if self.control_rate < 100:
            raise ParameterError("control rate must be at least 100 Hz")
        if not self.rate_window >= 1.0 / self.control_rate:
            raise ParameterError("rate window must cover at least one control period")
        for name in self.disturbances:
            if name.target not in WALK_CHANNELS:
                raise ParameterError(f"unknown disturbance channel {name.target!r}")
        gp = self.gait or gait_mod.GaitParams()
        object.__setattr__(self, "gait", replace(gp, sample_dt=1.0 / self.control_rate))

    @property
    def dt(self):
        return 1.0 / self.control_rate


@dataclass(frozen=True)
class BodyTerms:
    """Open-loop ZMP of the played-back gait plus the slider and torso sensitivities."""
    zmp: np.ndarray           # (n, 2) with the slider centred
    slider_gain: np.ndarray   # (n,) ZMP shift per metre of slider travel
    torso_lever: np.ndarray   # (n,) ZMP shift per m/s^2 of torso acceleration (sign: opposite)


def body_terms(plan, segments=None, chain=None):
    """Segment trajectories of a walk plan and the ZMP terms they imply.

    The chain is planar (pitch joints only), so the lateral hip sway of the
    plan is spread over the body as a shear: each segment is displaced by
    the hip's lateral offset times its height fraction of the hip height.
    """
    p = plan.params
    chain = chain or kinematics.ChainConfig(ankle_height=p.ankle_height, hip_width=p.stance_width)
    segments = segments or kinematics.default_segments(chain)
    n = plan.t.size
    pose = np.tile(np.eye(4), (n, 1, 1))
    pose[:, 0, 3] = plan.right["x"]
    pose[:, 1, 3] = -p.stance_width / 2.0
    pose[:, 2, 3] = plan.right["z"]
    frames = kinematics.chain_frames(plan.angles, chain, "right", pose)
    pos = kinematics.segment_positions(segments, frames)
    zh = plan.hip["z"][:, None]
    pos[:, :, 1] += plan.hip["y"][:, None] * np.clip(pos[:, :, 2] / zh, 0.0, 1.0)
    acc = kinematics.segment_accelerations(pos, p.sample_dt)
    masses = np.array([s.mass for s in segments])
    terms = kinematics.zmp_terms(masses, np.ascontiguousarray(pos), np.ascontiguousarray(acc), p.g)
    den = terms[:, 2]
    if np.any(den <= 0):
        raise BallisticPhaseError("vertical ground reaction vanished during the plan")
    names = [s.name for s in segments]
    si = names.index(kinematics.SLIDER)
    ti = names.index("torso")
    gain = masses[si] * (acc[:, si, 2] + p.g) / den
    lever = masses[ti] * pos[:, ti, 2] / den
    return BodyTerms(terms[:, :2] / den[:, None], gain, lever)


@dataclass(frozen=True)
class WalkingMetrics:
    axis: str
    max_tracking_error: float   # m
    switch_overshoot: float     # m, mean peak |ZMPe| after support-phase switches
    steady_state_error: float   # m, mean |ZMPe| over the middle of single support
    rms_error: float            # m
    fraction_le_l3: float       # share of samples graded L1..L3

    def row(self):
        return (self.axis, self.max_tracking_error, self.switch_overshoot, self.steady_state_error,
                self.rms_error, self.fraction_le_l3)


WALKING_METRIC_COLUMNS = ("axis", "max_err_m", "switch_overshoot_m", "steady_err_m", "rms_err_m",
                          "frac_le_L3")


def switch_times(params, t_end):
    """Instants where single support ends or double support ends, up to ``t_end``."""
    T = params.step_period
    out = []
    k = 0
    while k * T < t_end:
        for ts in (k * T + params.single_support, (k + 1) * T):
            if ts < t_end:
                out.append(ts)
        k += 1
    return np.array(out)


def walking_metrics(t, e, levels, params, axis="X", window=0.15):
    e = np.abs(np.asarray(e, dtype=float))
    peaks = [e[(t >= ts) & (t < ts + window)].max() for ts in switch_times(params, t[-1])]
    phase = np.mod(t, params.step_period)
    Ts = params.single_support
    mid = (phase > Ts / 4.0) & (phase < 3.0 * Ts / 4.0)
    return WalkingMetrics(axis, float(e.max()), float(np.mean(peaks)) if peaks else math.nan,
                          float(e[mid].mean()) if mid.any() else math.nan,
                          float(np.sqrt(np.mean(e * e))), float(np.mean(np.asarray(levels) <= 3)))


@dataclass
class WalkingResult:
    t: np.ndarray
    zmp: np.ndarray      # (n, 2)
    zmpd: np.ndarray
    zmpe: np.ndarray
    zmpec: np.ndarray
    levels: np.ndarray   # (n, 2) int
    y: np.ndarray        # slider positions (n, 2)
    yd: np.ndarray
    u: np.ndarray
    metrics: tuple       # WalkingMetrics for X and Y
    tipped: bool
    min_margin: float

    def rows(self):
        for i in range(self.t.size):
            yield (self.t[i], self.zmp[i, 0], self.zmpd[i, 0], self.zmp[i, 1], self.zmpd[i, 1],
                   int(self.levels[i, 0]), int(self.levels[i, 1]), self.y[i, 0], self.y[i, 1],
                   self.yd[i, 0], self.yd[i, 1])


WALKING_COLUMNS = ("t", "zmp_x", "zmpd_x", "zmp_y", "zmpd_y", "level_x", "level_y",
                   "y_x", "y_y", "yd_x", "yd_y")


def run_walking(scenario=WalkingScenario(), model=None, plan=None, terms=None, plants=None):
    """Play back the gait with the slider loop closed on the ZMP.

    Per tick and axis: ZMP = open-loop ZMP + slider_gain * y - torso_lever *
    torso disturbance; ZMPe = ZMP - ZMPd; ZMPec is the change of ZMPe over
    ``rate_window``.  PID drives the slider voltage from ZMPe directly;
    the VUFC variants turn (ZMPe, ZMPec, level) into a slider demand that
    an ADRC loop tracks.  The ungraded variant holds ``ungraded_level``.
    """
    sc = scenario
    dt = sc.dt
    model = model or grader.table1_model()
    plan = plan or gait_mod.plan_walk(sc.gait, sc.duration)
    terms = terms or body_terms(plan)
    t = plan.t
    n = t.size
    sched = DisturbanceSchedule(sc.disturbances, sc.seed, dt, sc.duration)
    slider_d = np.column_stack([sched.signal("slider_x")[:n], sched.signal("slider_y")[:n]])
    torso_d = np.column_stack([sched.signal("torso_x")[:n], sched.signal("torso_y")[:n]])
    plants = plants or (x_axis_params(), y_axis_params())
    graded = sc.controller == "vufc-adrc+grading"
    adrcs = [AdrcController(wo, wc, pl.b0, dt=dt, u_max=pl.voltage_limit)
             for (wo, wc), pl in zip(sc.observer, plants)]
    vufcs = [fuzzy.VufcState(e_span=es, ec_span=ecs, y_span=pl.travel_limits[1], graded=graded,
                             fixed_level=sc.ungraded_level)
             for (es, ecs), pl in zip(sc.spans, plants)]
    centers = [np.ascontiguousarray(model.axis(a)) for a in grader.AXES]
    kp, ki, kd, gu = sc.pid_gains
    lag = max(1, int(round(sc.rate_window / dt)))

    zmp = np.zeros((n, 2))
    err = np.zeros((n, 2))
    rate = np.zeros((n, 2))
    levels = np.zeros((n, 2), dtype=np.int64)
    ys = np.zeros((n, 2))
    yds = np.zeros((n, 2))
    us = np.zeros((n, 2))
    states = [SliderState(), SliderState()]
    integral = [0.0, 0.0]
    for k in range(n):
        for a in range(2):
            z = terms.zmp[k, a] + terms.slider_gain[k] * states[a].y - terms.torso_lever[k] * torso_d[k, a]
            e = z - plan.zmpd[k, a]
            ec = e - err[max(k - lag, 0), a] if k else 0.0
            zmp[k, a] = z
            err[k, a] = e
            rate[k, a] = ec
            lab, _ = grader.assign(np.array([[abs(e), abs(ec)]]), centers[a], grader.WEIGHTS[0],
                                   grader.WEIGHTS[1])
            levels[k, a] = lab[0] + 1
            pl = plants[a]
            if sc.controller == "pid":
                candidate = integral[a] + e * dt
                raw = -gu * (kp * e + ki * candidate + kd * ec / sc.rate_window)
                u = min(max(raw, -pl.voltage_limit), pl.voltage_limit)
                if raw == u:
                    integral[a] = candidate
            else:
                yd = fuzzy.vufc_step(e, ec, int(levels[k, a]), vufcs[a])
                yds[k, a] = yd
                u = adrcs[a].step(yd, states[a].y)
            us[k, a] = u
            states[a] = plant_step(states[a], u, dt, pl, slider_d[k, a])
            ys[k, a] = states[a].y

    margin = gait_mod.support_margin(sc.gait, t, zmp[:, 0], zmp[:, 1])
    metrics = tuple(walking_metrics(t, err[:, a], levels[:, a], sc.gait, axis, sc.switch_window)
                    for a, axis in enumerate(grader.AXES))
    min_margin = float(margin.min())
    return WalkingResult(t, zmp, plan.zmpd, err, rate, levels, ys, yds, us, metrics,
                         min_margin < 0.0, min_margin)


@dataclass
class WalkingComparison:
    results: dict                 # variant -> WalkingResult
    switch_overshoot_reduction: tuple   # % per axis, graded vs ungraded
    steady_state_reduction: tuple

    def max_errors(self, axis=0):
        return {v: r.metrics[axis].max_tracking_error for v, r in self.results.items()}


def _reduction(before, after):
    return (before - after) / before * 100.0 if before > 0 else math.nan


def compare_walking(scenario=WalkingScenario(), model=None, plants=None, variants=WALKING_VARIANTS):
    """Run the walking variants on one scenario and a shared plan."""
    plan = gait_mod.plan_walk(scenario.gait, scenario.duration)
    terms = body_terms(plan)
    results = {v: run_walking(replace(scenario, controller=v), model, plan, terms, plants)
               for v in variants}
    if "vufc-adrc" not in results or "vufc-adrc+grading" not in results:
        return WalkingComparison(results, (math.nan, math.nan), (math.nan, math.nan))
    plain, graded = results["vufc-adrc"], results["vufc-adrc+grading"]
    so = tuple(_reduction(plain.metrics[a].switch_overshoot, graded.metrics[a].switch_overshoot)
               for a in range(2))
    ss = tuple(_reduction(plain.metrics[a].steady_state_error, graded.metrics[a].steady_state_error)
               for a in range(2))
    return WalkingComparison(results, so, ss)


def walking_error_samples(noise, seed, duration=6.0, model=None):
    """(ZMPe, ZMPec) streams of one graded walk under torso noise of std ``noise``."""
    terms_ = (DisturbanceTerm("noise", "torso_x", value=noise, bandwidth=2.0),
              DisturbanceTerm("noise", "torso_y", value=noise / 2.0, bandwidth=2.0))
    r = run_walking(WalkingScenario(duration=duration, disturbances=terms_, seed=seed), model)
    return {"zmpe_x": r.zmpe[:, 0], "zmpec_x": r.zmpec[:, 0],
            "zmpe_y": r.zmpe[:, 1], "zmpec_y": r.zmpec[:, 1]}
