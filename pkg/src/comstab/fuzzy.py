"""Mamdani fuzzy inference plus the two fuzzy controllers built on it.

The engine uses evenly spaced triangular sets that overlap at 0.5, min
t-norm for rule firing, max aggregation and centroid defuzzification on a
sampled output axis.  Output sets keep their full triangular support (the
edge sets extend half a step past the universe) so a single fully fired
rule defuzzifies exactly to its set's centre.

Controllers:

* :func:`fuzzy_pid_step` - positional PID whose gains are corrected on
  line from the steering-stability rule base (``TABLE_DK``).
* :func:`vufc_step` - variable-universe controller: the basis rule base
  (``TABLE_YD``) runs on a normalized universe whose input/output spans
  are stretched by scaling factors that come from a second rule base
  (``TABLE_SCALE``) driven by the stability level.
"""
from dataclasses import dataclass, field
import hashlib
import math

import numpy as np

from ._accel import kernel

SEVEN = ("NB", "NM", "NS", "ZO", "PS", "PM", "PB")
FIVE_FACTOR = ("VS", "S", "M", "B", "VB")
FIVE_LEVEL = ("L1", "L2", "L3", "L4", "L5")
ALIASES = {"ZE": "ZO"}

GRID_PER_STEP = 20


def canonical(label):
    label = label.strip().upper()
    return ALIASES.get(label, label)


@dataclass(frozen=True)
class FuzzyPartition:
    """Evenly spaced triangles over ``[lo, hi]``, one per label."""
    lo: float
    hi: float
    labels: tuple = SEVEN

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError("universe must satisfy lo < hi")
        if len(self.labels) < 2:
            raise ValueError("need at least two labels")
        object.__setattr__(self, "labels", tuple(canonical(lb) for lb in self.labels))

    @property
    def step(self):
        return (self.hi - self.lo) / (len(self.labels) - 1)

    @property
    def centers(self):
        return self.lo + self.step * np.arange(len(self.labels))

    def index(self, label):
        return self.labels.index(canonical(label))

    def center(self, label):
        return float(self.centers[self.index(label)])

    def clamp(self, x):
        return min(max(x, self.lo), self.hi)

    def memberships(self, x):
        """Degrees of membership of ``x`` (clamped) in every set."""
        x = self.clamp(float(x))
        return np.maximum(0.0, 1.0 - np.abs(x - self.centers) / self.step)

    def scaled(self, factor):
        return FuzzyPartition(self.lo * factor, self.hi * factor, self.labels)


@dataclass(frozen=True)
class RuleTable:
    """Label grid ``cells[row][col]``; a 1-D table has a single row."""
    row_labels: tuple
    col_labels: tuple
    cells: tuple
    row_var: str = ""
    col_var: str = ""

    def __post_init__(self):
        cells = tuple(tuple(canonical(c) for c in row) for row in self.cells)
        if len(cells) != len(self.row_labels):
            raise ValueError("rule table has wrong number of rows")
        for row in cells:
            if len(row) != len(self.col_labels):
                raise ValueError("rule table is incomplete")
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "row_labels", tuple(canonical(c) for c in self.row_labels))
        object.__setattr__(self, "col_labels", tuple(canonical(c) for c in self.col_labels))

    def lookup(self, row, col):
        return self.cells[self.row_labels.index(canonical(row))][self.col_labels.index(canonical(col))]

    def index_matrix(self, output_labels, transpose=False):
        idx = np.array([[output_labels.index(c) for c in row] for row in self.cells], dtype=np.int64)
        return np.ascontiguousarray(idx.T if transpose else idx)

    def to_text(self):
        width = max(len(c) for row in self.cells for c in row) + 1
        head = f"# rows: {self.row_var or 'row'}  cols: {self.col_var or 'col'}\n"
        lines = [" " * 4 + "".join(f"{c:>{width}}" for c in self.col_labels)]
        for lab, row in zip(self.row_labels, self.cells):
            lines.append(f"{lab:<4}" + "".join(f"{c:>{width}}" for c in row))
        return head + "\n".join(lines) + "\n"

    def checksum(self):
        return hashlib.sha256(self.to_text().encode()).hexdigest()

    @classmethod
    def from_text(cls, text, row_var="", col_var=""):
        rows = [ln.split() for ln in text.splitlines()
                if ln.strip() and not ln.lstrip().startswith("#")]
        if len(rows) < 2:
            raise ValueError("rule grid needs a header line and at least one row")
        col_labels = rows[0]
        row_labels = [r[0] for r in rows[1:]]
        cells = [r[1:] for r in rows[1:]]
        return cls(tuple(row_labels), tuple(col_labels), tuple(tuple(c) for c in cells),
                   row_var, col_var)


def _split_table(text, row_labels, col_labels, row_var, col_var, n_out=1):
    rows = [ln.split() for ln in text.strip().splitlines()]
    tables = []
    for k in range(n_out):
        cells = tuple(tuple(c.split("/")[k] for c in row) for row in rows)
        tables.append(RuleTable(row_labels, col_labels, cells, row_var, col_var))
    return tables


# Steering stability rule base, rows Kec, columns Ke, cells dKp/dKi/dKd.
_TABLE_DK_TEXT = """
PB/NB/PS PB/NB/NS PM/NM/NS PM/NM/NS PS/NS/NM PS/ZE/NM ZE/ZE/PM
PB/NB/PS PB/NB/NS PM/NM/NS PM/NM/NM PS/NS/NM ZE/ZE/NS ZE/ZE/ZE
PM/NB/ZE PM/NM/NS PS/NS/NM PS/NS/NM ZE/ZE/NM NS/PM/NS NS/PS/ZE
PM/NM/ZE PM/NM/NB PS/NS/NS ZE/ZE/NS NS/PS/PS NM/PM/NS NM/PS/ZE
PS/NM/ZE PS/NS/ZE ZE/ZE/ZE NS/PS/ZE NS/ZE/PS NM/PM/ZE NM/PB/PM
PS/ZE/PB ZE/ZE/PS NS/PS/PS NM/PS/PS NM/PM/PS NM/PB/PS NB/PS/PB
ZE/ZE/PB ZE/ZE/PM NS/PS/PM NM/PM/PM NM/PM/PS NB/PB/PS NB/PS/PB
"""

# Basis walking rule base, rows ZMPe, columns ZMPec, cells yd.
_TABLE_YD_TEXT = """
PB PB PB PM PM PS PS
PB PB PM PM PS PS PS
PM PM PS PS PS PS PS
PM PS PS ZO NS NS NM
NS NS NM NM NM NM NB
NS NM NM NB NB NB NB
NS NM NB NB NB NB NB
"""

# Scaling-factor rule base, rows zeta/xi/gamma, columns level.
_TABLE_SCALE_TEXT = """
VS S M B VB
VS S M B VB
VS S M B VB
"""

TABLE_DKP, TABLE_DKI, TABLE_DKD = _split_table(
    _TABLE_DK_TEXT, SEVEN, SEVEN, "Kec", "Ke", n_out=3)
(TABLE_YD,) = _split_table(_TABLE_YD_TEXT, SEVEN, SEVEN, "ZMPe", "ZMPec")
(TABLE_SCALE,) = _split_table(
    _TABLE_SCALE_TEXT, ("zeta", "xi", "gamma"), FIVE_LEVEL, "factor", "level")
TABLE_DK = (TABLE_DKP, TABLE_DKI, TABLE_DKD)


# -- kernels -----------------------------------------------------------------

@kernel
def _tri(x, lo, step, n, out):
    for j in range(n):
        m = 1.0 - abs(x - (lo + j * step)) / step
        out[j] = m if m > 0.0 else 0.0


@kernel
def _centroid(strength, out_mf, grid):
    num = 0.0
    den = 0.0
    n_out = out_mf.shape[0]
    for g in range(grid.shape[0]):
        agg = 0.0
        for k in range(n_out):
            s = strength[k]
            if s > 0.0:
                v = out_mf[k, g]
                if s < v:
                    v = s
                if v > agg:
                    agg = v
        num += agg * grid[g]
        den += agg
    if den <= 0.0:
        return 0.0
    return num / den


@kernel
def mamdani2(x1, lo1, hi1, n1, x2, lo2, hi2, n2, rules, out_mf, grid):
    """Two-input Mamdani inference; ``rules[i1, i2]`` is an output-set index."""
    if x1 < lo1:
        x1 = lo1
    elif x1 > hi1:
        x1 = hi1
    if x2 < lo2:
        x2 = lo2
    elif x2 > hi2:
        x2 = hi2
    mu1 = np.empty(n1)
    mu2 = np.empty(n2)
    _tri(x1, lo1, (hi1 - lo1) / (n1 - 1), n1, mu1)
    _tri(x2, lo2, (hi2 - lo2) / (n2 - 1), n2, mu2)
    strength = np.zeros(out_mf.shape[0])
    for i in range(n1):
        if mu1[i] <= 0.0:
            continue
        for j in range(n2):
            if mu2[j] <= 0.0:
                continue
            s = mu1[i] if mu1[i] < mu2[j] else mu2[j]
            k = rules[i, j]
            if s > strength[k]:
                strength[k] = s
    return _centroid(strength, out_mf, grid)


@kernel
def mamdani1(x, lo, hi, n, rules, out_mf, grid):
    if x < lo:
        x = lo
    elif x > hi:
        x = hi
    mu = np.empty(n)
    _tri(x, lo, (hi - lo) / (n - 1), n, mu)
    strength = np.zeros(out_mf.shape[0])
    for i in range(n):
        k = rules[i]
        if mu[i] > strength[k]:
            strength[k] = mu[i]
    return _centroid(strength, out_mf, grid)


def _output_axis(part):
    """Sampled output axis and membership matrix with full-support edge sets."""
    step = part.step
    n = len(part.labels)
    npts = (n + 1) * GRID_PER_STEP + 1
    grid = part.lo - step + step / GRID_PER_STEP * np.arange(npts)
    mf = np.maximum(0.0, 1.0 - np.abs(grid[None, :] - part.centers[:, None]) / step)
    return np.ascontiguousarray(grid), np.ascontiguousarray(mf)


class FuzzyEngine:
    """Inputs partitions + rule table -> crisp output.

    ``inputs`` are ordered as the call arguments; the rule table is mapped
    onto that order through its ``row_var``/``col_var`` names.
    """

    def __init__(self, inputs, output, table, input_names=None):
        self.inputs = tuple(inputs)
        self.output = output
        self.table = table
        self.grid, self.out_mf = _output_axis(output)
        if len(self.inputs) == 2:
            names = tuple(input_names or (table.row_var, table.col_var))
            transpose = names == (table.col_var, table.row_var) and names[0] != names[1]
            self.rules = table.index_matrix(output.labels, transpose=transpose)
            first, second = self.inputs
            want = (len(first.labels), len(second.labels))
            if self.rules.shape != want:
                raise ValueError("rule table shape does not match the input partitions")
        elif len(self.inputs) == 1:
            self.rules = np.array([output.labels.index(c) for c in table.cells[0]], dtype=np.int64)
        else:
            raise ValueError("only one- and two-input engines are supported")

    def __call__(self, *xs):
        return infer(self, *xs)


def infer(engine, *inputs):
    """Crisp output of ``engine`` for the given input values (clamped to universes)."""
    if len(engine.inputs) == 2:
        a, b = engine.inputs
        return mamdani2(float(inputs[0]), a.lo, a.hi, len(a.labels),
                        float(inputs[1]), b.lo, b.hi, len(b.labels),
                        engine.rules, engine.out_mf, engine.grid)
    (a,) = engine.inputs
    return mamdani1(float(inputs[0]), a.lo, a.hi, len(a.labels),
                    engine.rules, engine.out_mf, engine.grid)


# -- Fuzzy-PID -----------------------------------------------------------------

KE_UNIVERSE = (-0.1, 0.1)
KEC_UNIVERSE = (-0.05, 0.05)
DKP_UNIVERSE = (-15.0, 15.0)
DKI_UNIVERSE = (-1.0, 1.0)
DKD_UNIVERSE = (-15.0, 15.0)


def gain_engines(tables=TABLE_DK):
    ke = FuzzyPartition(*KE_UNIVERSE)
    kec = FuzzyPartition(*KEC_UNIVERSE)
    outs = (FuzzyPartition(*DKP_UNIVERSE), FuzzyPartition(*DKI_UNIVERSE),
            FuzzyPartition(*DKD_UNIVERSE))
    return tuple(FuzzyEngine((ke, kec), out, tab, input_names=("Ke", "Kec"))
                 for out, tab in zip(outs, tables))


_DEFAULT_GAIN_ENGINES = None


def default_gain_engines():
    global _DEFAULT_GAIN_ENGINES
    if _DEFAULT_GAIN_ENGINES is None:
        _DEFAULT_GAIN_ENGINES = gain_engines()
    return _DEFAULT_GAIN_ENGINES


@dataclass
class FuzzyPidState:
    kp0: float = 15.0
    ki0: float = 0.8
    kd0: float = 9.0
    integral: float = 0.0
    prev_error: float = 0.0
    u_min: float = -24.0
    u_max: float = 24.0
    output_gain: float = 1.0
    fuzzy: bool = True
    engines: tuple = field(default=None, repr=False)
    last_deltas: tuple = (0.0, 0.0, 0.0)

    def gains(self):
        dkp, dki, dkd = self.last_deltas
        return self.kp0 + dkp, self.ki0 + dki, self.kd0 + dkd


def fuzzy_pid_step(Ke, Kec, state, dt, fuzzy_inputs=None):
    """One positional PID tick with fuzzy-corrected gains; returns the voltage.

    ``Ke``/``Kec`` are the (quantized) deviation and its rate.  The gain
    corrections are inferred from ``fuzzy_inputs`` when given (a separately
    quantized (e, ec) pair), else from (Ke, Kec).  With ``state.fuzzy``
    false the corrections are forced to zero, giving the fixed
    (kp0, ki0, kd0) PID.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if state.fuzzy:
        engines = state.engines or default_gain_engines()
        fe, fec = (Ke, Kec) if fuzzy_inputs is None else fuzzy_inputs
        deltas = tuple(infer(eng, fe, fec) for eng in engines)
    else:
        deltas = (0.0, 0.0, 0.0)
    state.last_deltas = deltas
    kp = state.kp0 + deltas[0]
    ki = state.ki0 + deltas[1]
    kd = state.kd0 + deltas[2]
    g = state.output_gain
    candidate = state.integral + Ke * dt
    raw = g * (kp * Ke + ki * candidate + kd * Kec)
    u = min(max(raw, state.u_min), state.u_max)
    # clamping anti-windup: freeze the integrator while it pushes further into saturation
    if raw == u or (raw > state.u_max and g * ki * Ke < 0) or (raw < state.u_min and g * ki * Ke > 0):
        state.integral = candidate
    state.prev_error = Ke
    return u


# -- variable universe fuzzy control ----------------------------------------

FACTOR_UNIVERSE = (0.5, 1.5)
LEVEL_UNIVERSE = (0.0, 1.0)


def scale_engines(table=TABLE_SCALE):
    level = FuzzyPartition(*LEVEL_UNIVERSE, labels=FIVE_LEVEL)
    factor = FuzzyPartition(*FACTOR_UNIVERSE, labels=FIVE_FACTOR)
    engines = []
    for row in table.cells:
        tab = RuleTable(("x",), table.col_labels, (row,))
        engines.append(FuzzyEngine((level,), factor, tab))
    return tuple(engines)


def basis_engine(table=TABLE_YD):
    unit = FuzzyPartition(-1.0, 1.0)
    return FuzzyEngine((unit, unit), unit, table, input_names=("ZMPe", "ZMPec"))


@dataclass
class VufcState:
    """Base spans and current scaling factors of one axis."""
    e_span: float = 0.12
    ec_span: float = 0.06
    y_span: float = 0.35
    zeta: float = 1.0
    xi: float = 1.0
    gamma: float = 1.0
    graded: bool = True
    fixed_level: int = 3
    basis: object = field(default=None, repr=False)
    scalers: tuple = field(default=None, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.basis is None:
            self.basis = _default_basis()
        if self.scalers is None:
            self.scalers = _default_scalers()


_BASIS = None
_SCALERS = None


def _default_basis():
    global _BASIS
    if _BASIS is None:
        _BASIS = basis_engine()
    return _BASIS


def _default_scalers():
    global _SCALERS
    if _SCALERS is None:
        _SCALERS = scale_engines()
    return _SCALERS


def level_to_unit(level):
    if not 1 <= int(level) <= 5:
        raise ValueError(f"stability level must be 1..5, got {level}")
    return (int(level) - 1) / 4.0


def scale_universes(level, state):
    """Scaling factors (zeta, xi, gamma) for a stability level; updates ``state``."""
    level = int(level)
    hit = state._cache.get(level)
    if hit is None:
        x = level_to_unit(level)
        hit = tuple(infer(eng, x) for eng in state.scalers)
        state._cache[level] = hit
    state.zeta, state.xi, state.gamma = hit
    return hit


def vufc_step(zmp_e, zmp_ec, level, state):
    """Desired slider displacement from the ZMP deviation and its rate."""
    lvl = level if state.graded else state.fixed_level
    zeta, xi, gamma = scale_universes(lvl, state)
    e_n = zmp_e / (zeta * state.e_span)
    ec_n = zmp_ec / (xi * state.ec_span)
    return gamma * state.y_span * infer(state.basis, e_n, ec_n)


def is_partition_of_unity(part, xs, tol=1e-12):
    return all(math.isclose(part.memberships(x).sum(), 1.0, abs_tol=tol) for x in xs)
