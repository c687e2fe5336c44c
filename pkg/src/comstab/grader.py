"""Walking-stability grading by K-means on (|ZMPe|, |ZMPec|).

Five clusters are trained per axis under the weighted distance
rho = sqrt(0.7 de^2 + 0.3 dec^2), sorted by |ZMPe| and labelled L1 (very
stable) to L5 (destabilized).  A pretrained model with the reference
centres ships built in.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from ._accel import kernel
from .errors import ConfigError, InsufficientDataError, ParameterError

WEIGHTS = (0.7, 0.3)
N_LEVELS = 5
AXES = ("X", "Y")

TABLE1 = {
    "X": ((0.0079, 0.0195), (0.0315, 0.0293), (0.0611, 0.0411), (0.0937, 0.0506), (0.1149, 0.0586)),
    "Y": ((0.0152, 0.00405), (0.0213, 0.01313), (0.0352, 0.0252), (0.0457, 0.0406), (0.0607, 0.0506)),
}


@dataclass(frozen=True)
class StabilitySample:
    zmp_error: float
    zmp_error_rate: float
    axis: str = "X"

    def __post_init__(self):
        if not (math.isfinite(self.zmp_error) and math.isfinite(self.zmp_error_rate)):
            raise ParameterError("stability samples must be finite")
        if self.axis not in AXES:
            raise ParameterError(f"axis must be one of {AXES}")


def weighted_distance(sample, center, weights=WEIGHTS):
    de = sample[0] - center[0]
    dec = sample[1] - center[1]
    return math.sqrt(weights[0] * de * de + weights[1] * dec * dec)


@kernel
def assign(points, centers, w0, w1):
    """Nearest centre (ties to the higher index) and squared distance per point."""
    n = points.shape[0]
    labels = np.empty(n, dtype=np.int64)
    d2 = np.empty(n)
    for i in range(n):
        best = np.inf
        arg = 0
        for j in range(centers.shape[0]):
            de = points[i, 0] - centers[j, 0]
            dc = points[i, 1] - centers[j, 1]
            d = w0 * de * de + w1 * dc * dc
            if d <= best:
                best = d
                arg = j
        labels[i] = arg
        d2[i] = best
    return labels, d2


@dataclass(frozen=True)
class ClusterModel:
    """Five sorted centres per axis; row i is level i + 1."""
    centers: dict

    def __post_init__(self):
        fixed = {}
        for axis, c in self.centers.items():
            c = np.array(c, dtype=float)
            if c.shape != (N_LEVELS, 2):
                raise ParameterError(f"axis {axis} needs exactly {N_LEVELS} centres")
            if np.any(np.diff(c[:, 0]) < 0):
                raise ParameterError(f"axis {axis} centres must be sorted by |ZMPe|")
            c.setflags(write=False)
            fixed[axis] = c
        object.__setattr__(self, "centers", fixed)

    def axis(self, axis):
        return self.centers[axis]


def table1_model():
    return ClusterModel({k: np.array(v) for k, v in TABLE1.items()})


def classify(sample, model, axis=None):
    """Level 1..5 of a sample (or an (e, ec) pair) under the given model axis."""
    if isinstance(sample, StabilitySample):
        axis = axis or sample.axis
        e, ec = sample.zmp_error, sample.zmp_error_rate
    else:
        e, ec = sample
        axis = axis or "X"
    pts = np.array([[abs(e), abs(ec)]])
    labels, _ = assign(pts, np.ascontiguousarray(model.axis(axis)), WEIGHTS[0], WEIGHTS[1])
    return int(labels[0]) + 1


def classify_many(e, ec, centers):
    pts = np.column_stack([np.abs(np.asarray(e, dtype=float)), np.abs(np.asarray(ec, dtype=float))])
    labels, _ = assign(pts, np.ascontiguousarray(centers, dtype=float), WEIGHTS[0], WEIGHTS[1])
    return labels + 1


# -- training -----------------------------------------------------------------

@dataclass
class KMeansResult:
    centers: np.ndarray          # sorted, (k, 2)
    inertia: float
    iterations: int
    history: list = field(default_factory=list)   # inertia per iteration of the kept run
    histories: list = field(default_factory=list)  # one inertia list per restart


def _lloyd(points, init, max_iter, tol):
    centers = init.copy()
    k = centers.shape[0]
    history = []
    it = 0
    for it in range(1, max_iter + 1):
        labels, d2 = assign(points, centers, WEIGHTS[0], WEIGHTS[1])
        history.append(float(d2.sum()))
        new = centers.copy()
        taken = set()
        for j in range(k):
            members = labels == j
            if members.any():
                new[j] = points[members].mean(axis=0)
        for j in range(k):
            if not (labels == j).any():
                # farthest point from its own centre becomes the new centre
                order = np.argsort(-d2, kind="stable")
                for idx in order:
                    if idx not in taken:
                        taken.add(int(idx))
                        new[j] = points[idx]
                        d2[idx] = 0.0
                        break
        shift = np.sqrt(WEIGHTS[0] * (new[:, 0] - centers[:, 0]) ** 2
                        + WEIGHTS[1] * (new[:, 1] - centers[:, 1]) ** 2).max()
        centers = new
        if shift < tol:
            break
    labels, d2 = assign(points, centers, WEIGHTS[0], WEIGHTS[1])
    history.append(float(d2.sum()))
    return centers, history, it


def _seed_centers(unique, k, rng):
    """Pick k distinct data points, each next one drawn with probability
    proportional to its squared weighted distance from those already chosen."""
    chosen = [int(rng.integers(unique.shape[0]))]
    for _ in range(1, k):
        _, d2 = assign(unique, unique[chosen], WEIGHTS[0], WEIGHTS[1])
        total = d2.sum()
        if total <= 0:
            rest = np.setdiff1d(np.arange(unique.shape[0]), chosen)
            chosen.append(int(rng.choice(rest)))
        else:
            chosen.append(int(rng.choice(unique.shape[0], p=d2 / total)))
    return unique[chosen].copy()


def kmeans_train(data, k=N_LEVELS, max_iter=1000, seed=0, n_init=10, tol=1e-9):
    """Lloyd iteration under the weighted distance; best of ``n_init`` seeded restarts.

    ``data`` is a sequence of StabilitySample or an (n, 2) array of
    (ZMPe, ZMPec); absolute values are clustered.
    """
    if len(data) and isinstance(data[0], StabilitySample):
        pts = np.array([[abs(s.zmp_error), abs(s.zmp_error_rate)] for s in data])
    else:
        pts = np.abs(np.asarray(data, dtype=float).reshape(-1, 2))
    if pts.shape[0] < k:
        raise InsufficientDataError(f"need at least {k} samples, got {pts.shape[0]}")
    unique = np.unique(pts, axis=0)
    if unique.shape[0] < k:
        raise InsufficientDataError(f"need at least {k} distinct samples, got {unique.shape[0]}")
    rng = np.random.default_rng(seed)
    best = None
    histories = []
    for _ in range(max(1, n_init)):
        init = _seed_centers(unique, k, rng)
        centers, history, iters = _lloyd(pts, init, max_iter, tol)
        histories.append(history)
        if best is None or history[-1] < best[1][-1]:
            best = (centers, history, iters)
    centers, history, iters = best
    order = np.lexsort((centers[:, 1], centers[:, 0]))
    return KMeansResult(centers[order], history[-1], iters, history, histories)


def train_model(datasets, seed=0, **kw):
    """ClusterModel from a dict axis -> data."""
    return ClusterModel({axis: kmeans_train(d, seed=seed, **kw).centers for axis, d in datasets.items()})


# -- dataset ------------------------------------------------------------------

def generate_dataset(simulate, noise_levels, n_samples, seed=0, decimate=10):
    """Collect (ZMPe, ZMPec) samples per axis from repeated noisy walking runs.

    ``simulate(noise, seed)`` returns a dict with arrays ``zmpe_x``,
    ``zmpec_x``, ``zmpe_y``, ``zmpec_y``; runs cycle through
    ``noise_levels`` with fresh seeds until ``n_samples`` per axis are
    gathered, keeping every ``decimate``-th tick.
    """
    if n_samples < 50:
        raise InsufficientDataError("dataset needs at least 50 samples")
    levels = list(noise_levels)
    rng = np.random.default_rng(seed)
    xs, ys = [], []
    count = 0
    run = 0
    while count < n_samples:
        noise = levels[run % len(levels)]
        out = simulate(noise, int(rng.integers(2 ** 31)))
        sl = slice(0, None, decimate)
        xs.append(np.column_stack([out["zmpe_x"][sl], out["zmpec_x"][sl]]))
        ys.append(np.column_stack([out["zmpe_y"][sl], out["zmpec_y"][sl]]))
        count += xs[-1].shape[0]
        run += 1
    return {"X": np.vstack(xs)[:n_samples], "Y": np.vstack(ys)[:n_samples]}


def dataset_samples(dataset):
    """Flatten a per-axis dataset dict into StabilitySample objects."""
    return [StabilitySample(float(e), float(ec), axis) for axis, arr in dataset.items() for e, ec in arr]


# -- model file ---------------------------------------------------------------

def dumps_model(model):
    lines = []
    for axis in AXES:
        if axis not in model.centers:
            continue
        lines.append(f"[{axis}]")
        lines.append("# level zmpe_center zmpec_center")
        for i, (e, ec) in enumerate(model.centers[axis]):
            lines.append(f"L{i + 1} {e:.10g} {ec:.10g}")
    return "\n".join(lines) + "\n"


def loads_model(text):
    centers = {}
    axis = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            axis = line[1:-1].strip().upper()
            if axis not in AXES:
                raise ConfigError(f"unknown axis section {line}", lineno)
            if axis in centers:
                raise ConfigError(f"duplicate section {line}", lineno)
            centers[axis] = {}
            continue
        if axis is None:
            raise ConfigError("row outside an axis section", lineno)
        parts = line.split()
        if len(parts) != 3:
            raise ConfigError("expected 'level zmpe zmpec'", lineno)
        label = parts[0].upper().lstrip("L")
        try:
            level = int(label)
            e, ec = float(parts[1]), float(parts[2])
        except ValueError:
            raise ConfigError(f"cannot parse row {raw.strip()!r}", lineno) from None
        if not 1 <= level <= N_LEVELS or level in centers[axis]:
            raise ConfigError(f"bad or repeated level {parts[0]}", lineno)
        centers[axis][level] = (e, ec)
    out = {}
    for axis, rows in centers.items():
        if len(rows) != N_LEVELS:
            raise ConfigError(f"axis {axis} needs {N_LEVELS} levels, found {len(rows)}")
        out[axis] = np.array([rows[i] for i in range(1, N_LEVELS + 1)])
    if not out:
        raise ConfigError("model file has no axis sections")
    try:
        return ClusterModel(out)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from None


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model))


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())
