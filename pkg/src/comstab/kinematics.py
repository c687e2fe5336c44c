"""Humanoid-mode kinematics: homogeneous transforms, whole-body COM, ZMP and leg IK.

Frames are indexed as follows (all pitch joints rotate about the local Y axis)::

    0 right sole      1 right ankle    2 right knee     3 right hip (pelvis)
    4 left hip        5 left knee      6 left ankle     7 lift joint (torso)
    8 left sole

The chain is a tree rooted at either sole.  Left-leg joints are traversed
hip -> ankle with negated angles, so leg_ik returns the same physical
angles for both legs: zero is full extension, the knee bends negative
(backward) and an upright pelvis means ankle + knee + hip = 0.
"""
from dataclasses import dataclass, replace
import math
import warnings

import numpy as np

from ._accel import kernel
from .errors import BallisticPhaseError, ParameterError, UnreachableTargetError

G = 9.81

FRAME_NAMES = ("right_sole", "right_ankle", "right_knee", "right_hip", "left_hip",
               "left_knee", "left_ankle", "lift", "left_sole")
N_FRAMES = len(FRAME_NAMES)
RIGHT_SOLE, LEFT_SOLE, PELVIS, LIFT = 0, 8, 3, 7


def rot_x(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class FrameTransform:
    rotation: np.ndarray
    translation: np.ndarray

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_matrix(cls, T):
        T = np.asarray(T, dtype=float)
        return cls(T[:3, :3].copy(), T[:3, 3].copy())

    @property
    def matrix(self):
        T = np.eye(4)
        T[:3, :3] = self.rotation
        T[:3, 3] = self.translation
        return T

    def apply(self, point):
        return self.rotation @ np.asarray(point, dtype=float) + self.translation

    def inverse(self):
        Rt = self.rotation.T
        return FrameTransform(Rt, -Rt @ self.translation)

    def __matmul__(self, other):
        return FrameTransform(self.rotation @ other.rotation,
                              self.rotation @ other.translation + self.translation)

    def orthonormality_residual(self):
        R = self.rotation
        return float(max(np.max(np.abs(R.T @ R - np.eye(3))), abs(np.linalg.det(R) - 1.0)))


def compose_transform(angles, offsets):
    """Neighbour transform: translate by ``offsets`` then rotate Rz(tz) Ry(ty) Rx(tx)."""
    tx, ty, tz = angles
    return FrameTransform(rot_z(tz) @ rot_y(ty) @ rot_x(tx), np.asarray(offsets, dtype=float).copy())


# -- chain -------------------------------------------------------------------

@dataclass(frozen=True)
class ChainConfig:
    joint_angles: tuple = (0.0,) * 7   # theta1..theta6, lift
    calf: float = 0.5                  # l1
    thigh: float = 0.5                 # l2
    ankle_height: float = 0.05
    hip_width: float = 0.3
    lift_offset: float = 0.1           # lift joint height above the pelvis
    joint_limit: float = math.pi

    def __post_init__(self):
        angles = tuple(float(a) for a in self.joint_angles)
        if len(angles) == 6:
            angles = angles + (0.0,)
        if len(angles) != 7:
            raise ParameterError("joint_angles needs 6 leg angles plus an optional lift angle")
        object.__setattr__(self, "joint_angles", angles)
        if self.calf <= 0 or self.thigh <= 0:
            raise ParameterError("link lengths must be positive")
        if any(abs(a) > self.joint_limit for a in angles):
            raise ParameterError("joint angle outside configured limits")

    @property
    def l1(self):
        return self.calf

    @property
    def l2(self):
        return self.thigh

    def with_angles(self, angles):
        return replace(self, joint_angles=tuple(angles))


def _edges(cfg):
    """(parent, child, offset, angle index or -1, sign) for each tree edge."""
    ha, l1, l2, w = cfg.ankle_height, cfg.calf, cfg.thigh, cfg.hip_width
    return (
        (0, 1, (0.0, 0.0, ha), 0, 1.0),
        (1, 2, (0.0, 0.0, l1), 1, 1.0),
        (2, 3, (0.0, 0.0, l2), 2, 1.0),
        (3, 4, (0.0, w, 0.0), 3, -1.0),
        (4, 5, (0.0, 0.0, -l2), 4, -1.0),
        (5, 6, (0.0, 0.0, -l1), 5, -1.0),
        (6, 8, (0.0, 0.0, -ha), -1, 1.0),
        (3, 7, (0.0, w / 2.0, cfg.lift_offset), 6, 1.0),
    )


def _batched_edge(offset, theta):
    n = theta.shape[0]
    c, s = np.cos(theta), np.sin(theta)
    T = np.zeros((n, 4, 4))
    T[:, 0, 0] = c
    T[:, 0, 2] = s
    T[:, 1, 1] = 1.0
    T[:, 2, 0] = -s
    T[:, 2, 2] = c
    T[:, :3, 3] = offset
    T[:, 3, 3] = 1.0
    return T


def _batched_inverse(T):
    inv = np.zeros_like(T)
    Rt = np.transpose(T[:, :3, :3], (0, 2, 1))
    inv[:, :3, :3] = Rt
    inv[:, :3, 3] = -np.einsum("nij,nj->ni", Rt, T[:, :3, 3])
    inv[:, 3, 3] = 1.0
    return inv


def default_root_pose(cfg, root="right"):
    y = -cfg.hip_width / 2.0 if root == "right" else cfg.hip_width / 2.0
    T = np.eye(4)
    T[1, 3] = y
    return T


def chain_frames(angles, cfg, root="right", root_pose=None):
    """World transforms of all frames for a batch of joint-angle rows.

    ``angles`` has shape (n, 6) or (n, 7); returns an (n, 9, 4, 4) array.
    ``root`` picks the sole the tree hangs from; ``root_pose`` places it
    (a 4x4 or an (n, 4, 4) array).
    """
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    n = angles.shape[0]
    if angles.shape[1] == 6:
        angles = np.hstack([angles, np.zeros((n, 1))])
    root_idx = {"right": RIGHT_SOLE, "left": LEFT_SOLE}.get(root)
    if root_idx is None:
        raise ValueError("root must be 'right' or 'left'")
    pose = default_root_pose(cfg, root) if root_pose is None else np.asarray(root_pose, dtype=float)
    frames = np.empty((n, N_FRAMES, 4, 4))
    frames[:, root_idx] = pose
    done = {root_idx}
    local = {}
    for parent, child, offset, idx, sign in _edges(cfg):
        theta = sign * angles[:, idx] if idx >= 0 else np.zeros(n)
        local[(parent, child)] = _batched_edge(np.asarray(offset), theta)
    while len(done) < N_FRAMES:
        for (parent, child), T in local.items():
            if parent in done and child not in done:
                frames[:, child] = frames[:, parent] @ T
                done.add(child)
            elif child in done and parent not in done:
                frames[:, parent] = frames[:, child] @ _batched_inverse(T)
                done.add(parent)
    return frames


def forward_chain(config, root="right", root_pose=None):
    """World transform of every frame for one configuration (index = frame number)."""
    frames = chain_frames(np.asarray(config.joint_angles)[None, :], config, root, root_pose)[0]
    return [FrameTransform.from_matrix(T) for T in frames]


# -- segments and COM --------------------------------------------------------

@dataclass(frozen=True)
class BodySegment:
    name: str
    mass: float
    local_com: tuple
    parent_frame: int

    def __post_init__(self):
        if not self.mass > 0:
            raise ParameterError(f"segment {self.name!r} needs positive mass")
        object.__setattr__(self, "local_com", tuple(float(c) for c in self.local_com))
        if not 0 <= self.parent_frame < N_FRAMES:
            raise ParameterError(f"segment {self.name!r} has no frame {self.parent_frame}")


SLIDER = "slider"


def default_segments(cfg=None, torso_mass=310.0, slider_mass=60.0, thigh_mass=20.0,
                     calf_mass=12.0, foot_mass=8.0, torso_com=(-0.027, 0.0, 0.0), slider_height=0.0):
    """Default 450 kg mass table; torso and slider hang off the lift frame.

    The torso COM sits slightly behind the lift joint so that the standing
    pose (hips at 0.9 m, knees forward) has its COM over the hip line.
    """
    cfg = cfg or ChainConfig()
    l1, l2 = cfg.calf, cfg.thigh
    return (
        BodySegment("right_foot", foot_mass, (0.0, 0.0, 0.025), RIGHT_SOLE),
        BodySegment("right_calf", calf_mass, (0.0, 0.0, l1 / 2.0), 1),
        BodySegment("right_thigh", thigh_mass, (0.0, 0.0, l2 / 2.0), 2),
        BodySegment("left_thigh", thigh_mass, (0.0, 0.0, -l2 / 2.0), 4),
        BodySegment("left_calf", calf_mass, (0.0, 0.0, -l1 / 2.0), 5),
        BodySegment("left_foot", foot_mass, (0.0, 0.0, 0.025), LEFT_SOLE),
        BodySegment("torso", torso_mass, torso_com, LIFT),
        BodySegment(SLIDER, slider_mass, (0.0, 0.0, slider_height), LIFT),
    )


def with_slider(segments, y_x, y_y=0.0):
    """Segments with the slider displaced by (y_x, y_y) in its frame."""
    out = []
    for s in segments:
        if s.name == SLIDER:
            x, y, z = s.local_com
            s = replace(s, local_com=(x + y_x, y + y_y, z))
        out.append(s)
    return tuple(out)


def total_mass(segments):
    return float(sum(s.mass for s in segments))


def _frame_array(frames):
    if isinstance(frames, (list, tuple)):
        return np.stack([f.matrix for f in frames])
    return np.asarray(frames, dtype=float)


def segment_positions(segments, frames):
    """World COM of each segment: (nseg, 3) for one pose or (n, nseg, 3) for a batch."""
    F = _frame_array(frames)
    single = F.ndim == 3
    if single:
        F = F[None]
    idx = np.array([s.parent_frame for s in segments])
    local = np.array([s.local_com for s in segments])
    Fs = F[:, idx]
    R = Fs[:, :, :3, :3]
    t = Fs[:, :, :3, 3]
    pos = np.einsum("nsij,sj->nsi", R, local) + t
    return pos[0] if single else pos


def whole_body_com(segments, frames):
    masses = np.array([s.mass for s in segments])
    if not masses.sum() > 0:
        raise ParameterError("total mass must be positive")
    pos = segment_positions(segments, frames)
    return masses @ pos / masses.sum()


# -- ZMP ---------------------------------------------------------------------

def segment_accelerations(positions, dt):
    """Second time derivative along axis 0: central differences inside,
    one-sided second-order stencils at both ends."""
    p = np.asarray(positions, dtype=float)
    if p.shape[0] < 4:
        raise ValueError("need at least 4 samples for second-order accelerations")
    a = np.empty_like(p)
    a[1:-1] = (p[2:] - 2.0 * p[1:-1] + p[:-2]) / (dt * dt)
    a[0] = (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]) / (dt * dt)
    a[-1] = (2.0 * p[-1] - 5.0 * p[-2] + 4.0 * p[-3] - p[-4]) / (dt * dt)
    return a


def segment_velocities(positions, dt):
    p = np.asarray(positions, dtype=float)
    return np.gradient(p, dt, axis=0, edge_order=2)


@kernel
def zmp_terms(masses, pos, acc, g):
    """Per-sample (numerator_x, numerator_y, denominator) of the point-mass ZMP."""
    n = pos.shape[0]
    out = np.zeros((n, 3))
    for k in range(n):
        nx = 0.0
        ny = 0.0
        den = 0.0
        for i in range(masses.shape[0]):
            fz = masses[i] * (acc[k, i, 2] + g)
            nx += fz * pos[k, i, 0] - masses[i] * acc[k, i, 0] * pos[k, i, 2]
            ny += fz * pos[k, i, 1] - masses[i] * acc[k, i, 1] * pos[k, i, 2]
            den += fz
        out[k, 0] = nx
        out[k, 1] = ny
        out[k, 2] = den
    return out


@dataclass(frozen=True)
class ZmpPoint:
    x: float
    y: float


def zmp_from_accelerations(masses, positions, accelerations, g=G):
    """ZMP samples (n, 2) from explicit segment positions and accelerations."""
    masses = np.ascontiguousarray(masses, dtype=float)
    pos = np.ascontiguousarray(positions, dtype=float)
    acc = np.ascontiguousarray(accelerations, dtype=float)
    if pos.ndim == 2:
        pos, acc = pos[None], acc[None]
    terms = zmp_terms(masses, pos, acc, float(g))
    if np.any(terms[:, 2] <= 0):
        raise BallisticPhaseError("vertical ground reaction vanished (sum m (z'' + g) <= 0)")
    return terms[:, :2] / terms[:, 2:3]


def zmp(segments, com_trajectories, dt, g=G):
    """ZMP samples (n, 2) for sampled segment COM trajectories of shape (n, nseg, 3)."""
    masses = np.array([s.mass for s in segments])
    pos = np.asarray(com_trajectories, dtype=float)
    acc = segment_accelerations(pos, dt)
    return zmp_from_accelerations(masses, pos, acc, g)


def static_zmp(segments, frames):
    c = whole_body_com(segments, frames)
    return ZmpPoint(float(c[0]), float(c[1]))


# -- inverse kinematics ------------------------------------------------------

def leg_ik(hip, ankle, l1, l2, side="right", eps=1e-9):
    """Sagittal two-link IK, returning (ankle, knee, hip) pitch angles.

    ``hip`` and ``ankle`` are (x, z) pairs (scalars or arrays).  The knee
    bends backward (negative angle) and the hip angle keeps the pelvis
    upright.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    dx = np.asarray(hip[0], dtype=float) - np.asarray(ankle[0], dtype=float)
    dz = np.asarray(hip[1], dtype=float) - np.asarray(ankle[1], dtype=float)
    d = np.hypot(dx, dz)
    lo, hi = abs(l1 - l2), l1 + l2
    if np.any(d > hi + eps) or np.any(d < lo - eps) or np.any(d == 0):
        raise UnreachableTargetError(
            f"{side} leg target out of reach: distance range [{np.min(d):.6g}, {np.max(d):.6g}] "
            f"outside [{lo:.6g}, {hi:.6g}]")
    if np.any(d > hi * (1.0 - 1e-6)):
        warnings.warn(f"{side} leg near full extension (singular)", RuntimeWarning, stacklevel=2)
    alpha = np.arccos(np.clip((d * d + l1 * l1 - l2 * l2) / (2.0 * l1 * d), -1.0, 1.0))
    phi = np.arccos(np.clip((l1 * l1 + l2 * l2 - d * d) / (2.0 * l1 * l2), -1.0, 1.0))
    th_ankle = alpha + np.arctan2(dx, dz)
    th_knee = -(math.pi - phi)
    th_hip = math.pi - th_ankle - phi
    if np.ndim(th_ankle) == 0:
        return float(th_ankle), float(th_knee), float(th_hip)
    return th_ankle, th_knee, th_hip
