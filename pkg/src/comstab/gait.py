"""Walking pattern: footholds, LIPM hip motion, quintic swing foot, joint angles, ZMP reference.

Time is divided into steps of length Ts + Td.  Step k starts with a
single-support phase on foot k (right for even k) followed by a
double-support phase that hands over to foot k + 1.  Stance footholds sit
at x = k * stride / 2, so each foot swings a full stride per cycle and the
hip advances one stride per cycle.

The hip follows the linear inverted pendulum driven by the ZMP reference
itself (constant under the stance foot, linear during double support),
with the initial state chosen to make the gait periodic.  The hip's own
ZMP therefore coincides with the reference and its trajectory is C2.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.spatial import ConvexHull

from .errors import InfeasibleBoundaryError, ParameterError
from .kinematics import ChainConfig, leg_ik

RIGHT, LEFT = "right", "left"


@dataclass(frozen=True)
class GaitParams:
    com_height: float = 0.9
    stride_length: float = 0.4
    step_height: float = 0.1
    single_support: float = 0.5
    double_support: float = 0.1
    sample_dt: float = 0.001
    stance_width: float = 0.3
    foot_length: float = 0.2
    foot_width: float = 0.1
    ankle_height: float = 0.05
    g: float = 9.81
    joint_rate_limit: float = 10.0

    def __post_init__(self):
        for name in ("com_height", "stride_length", "step_height", "single_support", "sample_dt", "g"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")
        if self.double_support <= 0:
            raise ParameterError("double_support must be positive")

    @property
    def cycle(self):
        return 2.0 * self.single_support + 2.0 * self.double_support

    @property
    def step_period(self):
        return self.single_support + self.double_support

    @property
    def Tc(self):
        return math.sqrt(self.com_height / self.g)


@dataclass(frozen=True)
class FootPlan:
    stance: tuple        # stance foot of each step
    footholds: np.ndarray
    lateral: np.ndarray

    def center(self, k):
        return self.footholds[k], self.lateral[k]


def stance_foot(k):
    return RIGHT if k % 2 == 0 else LEFT


def foot_plan(params, n_steps):
    """Stance footholds for steps 0..n_steps-1 (entry k is the foot stood on in step k)."""
    k = np.arange(n_steps + 1)
    x = k * params.stride_length / 2.0
    y = np.where(k % 2 == 0, -params.stance_width / 2.0, params.stance_width / 2.0)
    return FootPlan(tuple(stance_foot(i) for i in range(n_steps + 1)), x, y)


# -- quintic -------------------------------------------------------------------

def quintic(tau):
    """Rest-to-rest quintic 10t^3 - 15t^4 + 6t^5 and its first two derivatives."""
    tau = np.clip(tau, 0.0, 1.0)
    s = tau ** 3 * (10.0 - 15.0 * tau + 6.0 * tau * tau)
    ds = 30.0 * tau * tau * (1.0 - tau) ** 2
    dds = 60.0 * tau * (1.0 - tau) * (1.0 - 2.0 * tau)
    return s, ds, dds


# -- LIPM -------------------------------------------------------------------

def _propagate(x0, v0, p0, pv, tau, Tc):
    """LIPM state after ``tau`` with ZMP p(t) = p0 + pv t; also returns acceleration."""
    ch, sh = np.cosh(tau / Tc), np.sinh(tau / Tc)
    x = p0 + pv * tau + (x0 - p0) * ch + Tc * (v0 - pv) * sh
    v = pv + (x0 - p0) * sh / Tc + (v0 - pv) * ch
    a = (x - p0 - pv * tau) / (Tc * Tc)
    return x, v, a


def _step_map(params, p_ss, p_next):
    """Affine map (A, b) of one step (SS on p_ss then DS toward p_next)."""
    Tc, Ts, Td = params.Tc, params.single_support, params.double_support
    pv = (p_next - p_ss) / Td

    def run(s):
        x, v, _ = _propagate(s[0], s[1], p_ss, 0.0, Ts, Tc)
        x, v, _ = _propagate(x, v, p_ss, pv, Td, Tc)
        return np.array([x, v])

    b = run(np.zeros(2))
    A = np.column_stack([run(np.array([1.0, 0.0])) - b, run(np.array([0.0, 1.0])) - b])
    return A, b


def _periodic_start(A, b, J, offset, cond_limit=1e10):
    K = A - J
    if not np.isfinite(np.linalg.cond(K)) or np.linalg.cond(K) > cond_limit:
        raise InfeasibleBoundaryError("periodic LIPM boundary system is singular")
    return np.linalg.solve(K, np.asarray(offset, dtype=float) - b)


def lipm_initial_states(params):
    """Hip (x, xdot) and (y, ydot) at the start of a right-stance step at foothold x = 0."""
    half = params.stride_length / 2.0
    w2 = params.stance_width / 2.0
    Ax, bx = _step_map(params, 0.0, half)
    sx = _periodic_start(Ax, bx, np.eye(2), (half, 0.0))
    Ay, by = _step_map(params, -w2, w2)
    sy = _periodic_start(Ay, by, -np.eye(2), (0.0, 0.0))
    return sx, sy


def _step_index(params, t):
    t = np.asarray(t, dtype=float)
    k = np.floor(t / params.step_period + 1e-12).astype(int)
    return k, t - k * params.step_period


def hip_state(params, t):
    """Hip position, velocity and acceleration at times ``t``.

    Returns a dict of arrays: x, vx, ax, y, vy, ay, z.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    sx, sy = lipm_initial_states(params)
    Tc, Ts, Td = params.Tc, params.single_support, params.double_support
    half, w2 = params.stride_length / 2.0, params.stance_width / 2.0
    k, tau = _step_index(params, t)
    sign = np.where(k % 2 == 0, 1.0, -1.0)   # +1 right stance, -1 left stance

    out = {}
    foot = k * half
    x0, v0 = foot + sx[0], np.full_like(t, sx[1])
    in_ss = tau < Ts
    xs, vs, as_ = _propagate(x0, v0, foot, 0.0, np.minimum(tau, Ts), Tc)
    xd, vd, ad = _propagate(xs, vs, foot, half / Td, np.maximum(tau - Ts, 0.0), Tc)
    out["x"] = np.where(in_ss, xs, xd)
    out["vx"] = np.where(in_ss, vs, vd)
    out["ax"] = np.where(in_ss, as_, ad)

    py = -sign * w2
    y0, vy0 = sign * sy[0], sign * sy[1]
    ys, vys, ays = _propagate(y0, vy0, py, 0.0, np.minimum(tau, Ts), Tc)
    yd, vyd, ayd = _propagate(ys, vys, py, 2.0 * sign * w2 / Td, np.maximum(tau - Ts, 0.0), Tc)
    out["y"] = np.where(in_ss, ys, yd)
    out["vy"] = np.where(in_ss, vys, vyd)
    out["ay"] = np.where(in_ss, ays, ayd)
    out["z"] = np.full_like(t, params.com_height)
    return out


def sample_times(params, t0, t1):
    n = int(round((t1 - t0) / params.sample_dt))
    return t0 + params.sample_dt * np.arange(n + 1)


def hip_trajectory(params, step_index):
    """Sampled hip (t, x, z) over one step (single then double support)."""
    t0 = step_index * params.step_period
    t = sample_times(params, t0, t0 + params.step_period)
    h = hip_state(params, t)
    return t, h["x"], h["z"]


# -- feet -------------------------------------------------------------------

def foot_state(params, foot, t):
    """Sole position (x, y, z) and velocity (vx, vz) of one foot at times ``t``.

    A foot swings during the single-support phase of every step in which
    the other foot is in stance and is at rest otherwise.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    Ts, half = params.single_support, params.stride_length / 2.0
    k, tau = _step_index(params, t)
    parity = 0 if foot == RIGHT else 1
    stance = (k % 2) == parity
    # last foothold this foot stood on at or before step k
    last = np.where(stance, k, k - 1)
    x_rest = last * half
    s, ds, _ = quintic(tau / Ts)
    swinging = (~stance) & (tau < Ts)
    done = (~stance) & (tau >= Ts)
    x = np.where(swinging, x_rest + params.stride_length * s, x_rest)
    x = np.where(done, x_rest + params.stride_length, x)
    vx = np.where(swinging, params.stride_length * ds / Ts, 0.0)
    lift = ankle_lift(params, tau)
    z = np.where(swinging, lift[0], 0.0)
    vz = np.where(swinging, lift[1], 0.0)
    y = np.full_like(t, -params.stance_width / 2.0 if foot == RIGHT else params.stance_width / 2.0)
    return {"x": x, "y": y, "z": z, "vx": vx, "vz": vz}


def ankle_lift(params, tau):
    """Foot height during swing: quintic up to step_height at Ts/2, quintic back down."""
    Ts, h = params.single_support, params.step_height
    tau = np.asarray(tau, dtype=float)
    up = tau < Ts / 2.0
    u = np.where(up, 2.0 * tau / Ts, 2.0 * (Ts - tau) / Ts)
    s, ds, dds = quintic(u)
    z = h * s
    vz = np.where(up, 1.0, -1.0) * h * ds * 2.0 / Ts
    az = h * dds * 4.0 / (Ts * Ts)
    return z, vz, az


def ankle_trajectory(params, step_index):
    """Sampled swing-foot (t, x, z) over the single-support phase of ``step_index``."""
    t0 = step_index * params.step_period
    t = sample_times(params, t0, t0 + params.single_support)
    swing = LEFT if stance_foot(step_index) == RIGHT else RIGHT
    f = foot_state(params, swing, t)
    return t, f["x"], f["z"]


# -- ZMP reference and support polygon ---------------------------------------

def desired_zmp(params, t):
    """Reference ZMP at the stance-foot centre, blended linearly during double support."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    Ts, Td = params.single_support, params.double_support
    half, w2 = params.stride_length / 2.0, params.stance_width / 2.0
    k, tau = _step_index(params, t)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    frac = np.clip((tau - Ts) / Td, 0.0, 1.0)
    x = (k + frac) * half
    y = -sign * w2 + frac * 2.0 * sign * w2
    return x, y


def _rect(cx, cy, length, width):
    return np.array([[cx - length / 2, cy - width / 2], [cx + length / 2, cy - width / 2],
                     [cx + length / 2, cy + width / 2], [cx - length / 2, cy + width / 2]])


def support_polygon(params, t):
    """Vertices of the support polygon at time ``t`` (scalar)."""
    k, tau = _step_index(params, t)
    k, tau = int(k), float(tau)
    half, w2 = params.stride_length / 2.0, params.stance_width / 2.0
    sign = 1.0 if k % 2 == 0 else -1.0
    a = _rect(k * half, -sign * w2, params.foot_length, params.foot_width)
    if tau < params.single_support:
        return a
    b = _rect((k + 1) * half, sign * w2, params.foot_length, params.foot_width)
    pts = np.vstack([a, b])
    return pts[ConvexHull(pts).vertices]


def inside_polygon(vertices, point, tol=1e-12):
    """Point-in-convex-polygon test for counter-clockwise or clockwise vertex order."""
    v = np.asarray(vertices, dtype=float)
    p = np.asarray(point, dtype=float)
    e = np.roll(v, -1, axis=0) - v
    r = p - v
    cross = e[:, 0] * r[:, 1] - e[:, 1] * r[:, 0]
    return bool(np.all(cross >= -tol) or np.all(cross <= tol))


def support_margin(params, t, x, y):
    """Signed distance of (x, y) inside the support polygon (negative outside),
    vectorized over samples."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x = np.broadcast_to(np.asarray(x, dtype=float), t.shape)
    y = np.broadcast_to(np.asarray(y, dtype=float), t.shape)
    out = np.empty(t.shape)
    k, tau = _step_index(params, t)
    ds = tau >= params.single_support
    keys = np.stack([k, ds.astype(int)], axis=1)
    for key in np.unique(keys, axis=0):
        sel = np.all(keys == key, axis=1)
        t_rep = key[0] * params.step_period + (params.single_support + 1e-9 if key[1] else 0.0)
        verts = support_polygon(params, t_rep)
        hull = ConvexHull(verts)
        pts = np.stack([x[sel], y[sel]], axis=1)
        # hull equations: n . p + c <= 0 inside, n unit length
        dist = pts @ hull.equations[:, :2].T + hull.equations[:, 2]
        out[sel] = -np.max(dist, axis=1)
    return out


# -- whole plan ---------------------------------------------------------------

@dataclass
class WalkPlan:
    params: GaitParams
    t: np.ndarray
    hip: dict
    right: dict
    left: dict
    angles: np.ndarray      # (n, 6) theta1..theta6
    zmpd: np.ndarray        # (n, 2)

    def joint_rates(self):
        return np.gradient(self.angles, self.params.sample_dt, axis=0, edge_order=2)


def joint_trajectories(hip, right, left, chain=None, ankle_height=None):
    """theta1..theta6 for sampled hip and foot trajectories (right leg then left leg)."""
    chain = chain or ChainConfig()
    ha = chain.ankle_height if ankle_height is None else ankle_height
    ra = leg_ik((hip["x"], hip["z"]), (right["x"], right["z"] + ha), chain.calf, chain.thigh, RIGHT)
    la = leg_ik((hip["x"], hip["z"]), (left["x"], left["z"] + ha), chain.calf, chain.thigh, LEFT)
    ra = [np.atleast_1d(a) for a in ra]
    la = [np.atleast_1d(a) for a in la]
    return np.column_stack([ra[0], ra[1], ra[2], la[2], la[1], la[0]])


def plan_walk(params=None, duration=6.0, chain=None, t0=0.0):
    params = params or GaitParams()
    chain = chain or ChainConfig(ankle_height=params.ankle_height, hip_width=params.stance_width)
    t = sample_times(params, t0, t0 + duration)
    hip = hip_state(params, t)
    right = foot_state(params, RIGHT, t)
    left = foot_state(params, LEFT, t)
    angles = joint_trajectories(hip, right, left, chain, params.ankle_height)
    zx, zy = desired_zmp(params, t)
    return WalkPlan(params, t, hip, right, left, angles, np.column_stack([zx, zy]))
