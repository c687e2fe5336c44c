"""Hybrid-automaton supervisor choosing among the four operating modes.

Q1 steering stability control, Q2 walking stability control,
Q3 straight-line driving, Q4 parked.  Transitions only exist along the
edges 13, 31, 24, 42, 34, 43, 41 and 14; there is no direct Q1 <-> Q2 edge.
"""
from dataclasses import dataclass
from enum import Enum
import logging
import math

from .errors import NondeterminismError

log = logging.getLogger(__name__)


class Mode(Enum):
    Q1 = 1
    Q2 = 2
    Q3 = 3
    Q4 = 4


class Controller(Enum):
    STEERING = "fuzzy-pid"
    WALKING = "vufc-adrc"


@dataclass(frozen=True)
class Thresholds:
    delta: float = math.radians(0.5)   # rad
    ux: float = 0.05                   # m/s
    theta_rate: float = 0.01           # rad/s, leg joints only
    ydot: float = 0.001                # m/s

    def __post_init__(self):
        if min(self.delta, self.ux, self.theta_rate, self.ydot) <= 0:
            raise ValueError("thresholds must be positive")


@dataclass(frozen=True)
class GuardSignals:
    delta: bool = False
    ux: bool = False
    theta_rate: bool = False
    ydot: bool = False

    @classmethod
    def from_bits(cls, bits):
        return cls(*(bool(b) for b in bits))

    @property
    def bits(self):
        return int(self.delta), int(self.ux), int(self.theta_rate), int(self.ydot)


def derive_signals(delta, ux, theta_rate_max, ydot, thresholds=Thresholds()):
    return GuardSignals(abs(delta) > thresholds.delta, abs(ux) > thresholds.ux,
                        abs(theta_rate_max) > thresholds.theta_rate, abs(ydot) > thresholds.ydot)


# (source, target): guard
GUARDS = {
    (Mode.Q1, Mode.Q3): lambda s: not s.delta,
    (Mode.Q3, Mode.Q1): lambda s: s.delta and s.ydot,
    (Mode.Q2, Mode.Q4): lambda s: not s.theta_rate,
    (Mode.Q4, Mode.Q2): lambda s: s.theta_rate and s.ydot,
    (Mode.Q3, Mode.Q4): lambda s: not s.ux,
    (Mode.Q4, Mode.Q3): lambda s: s.ux,
    (Mode.Q1, Mode.Q4): lambda s: not s.ux,
    (Mode.Q4, Mode.Q1): lambda s: s.ux and s.delta and s.ydot,
}

# Invariant predicate per mode as (delta, ux, theta_rate, ydot)
INVARIANTS = {
    Mode.Q1: (1, 1, 0, 1),
    Mode.Q2: (0, 0, 1, 1),
    Mode.Q3: (0, 1, 0, 0),
    Mode.Q4: (0, 0, 0, 0),
}

# Outgoing edges per mode in priority order: toward Q4 first, then the more
# specific guard.  G(S41) implies G(S43); the conjunction wins.
PRIORITY = {
    Mode.Q1: (Mode.Q4, Mode.Q3),
    Mode.Q2: (Mode.Q4,),
    Mode.Q3: (Mode.Q4, Mode.Q1),
    Mode.Q4: (Mode.Q1, Mode.Q2, Mode.Q3),
}

# pairs of simultaneously enabled guards that are not conflicts (one refines the other)
_REFINEMENTS = {frozenset({(Mode.Q4, Mode.Q1), (Mode.Q4, Mode.Q3)})}


def satisfies_invariant(mode, signals):
    return signals.bits == INVARIANTS[mode]


def enabled_transitions(mode, signals):
    return [target for target in PRIORITY[mode] if GUARDS[(mode, target)](signals)]


@dataclass(frozen=True)
class AutomatonState:
    mode: Mode = Mode.Q4
    time_in_mode: float = math.inf
    conflicts: int = 0


def resolve(mode, signals, strict=False):
    """Target mode (or None) for the given signals, applying the priority order.

    Two enabled guards where neither refines the other are a genuine
    nondeterminism: logged, or raised when ``strict``.
    """
    targets = enabled_transitions(mode, signals)
    if not targets:
        return None, False
    conflict = False
    if len(targets) > 1:
        edges = frozenset((mode, t) for t in targets)
        conflict = not (len(targets) == 2 and edges in _REFINEMENTS)
        if conflict:
            msg = f"guards {sorted(t.name for t in targets)} enabled together in {mode.name}"
            if strict:
                raise NondeterminismError(msg)
            log.warning("%s; taking %s", msg, targets[0].name)
    return targets[0], conflict


def step(state, signals, dt=0.001, dwell=0.05, strict=False):
    """Advance one tick.  A mode is held for at least ``dwell`` seconds."""
    elapsed = state.time_in_mode + dt
    if elapsed < dwell - 1e-12:
        return AutomatonState(state.mode, elapsed, state.conflicts)
    target, conflict = resolve(state.mode, signals, strict)
    conflicts = state.conflicts + int(conflict)
    if target is None:
        return AutomatonState(state.mode, elapsed, conflicts)
    return AutomatonState(target, 0.0, conflicts)


def mode_output(state):
    mode = state.mode if isinstance(state, AutomatonState) else state
    if mode is Mode.Q1:
        return Controller.STEERING
    if mode is Mode.Q2:
        return Controller.WALKING
    return None


def run_trace(signal_trace, dt=0.001, dwell=0.05, initial=None):
    """Mode after every tick of a sequence of GuardSignals (or 4-bit tuples)."""
    state = initial or AutomatonState()
    modes = []
    for s in signal_trace:
        if not isinstance(s, GuardSignals):
            s = GuardSignals.from_bits(s)
        state = step(state, s, dt, dwell)
        modes.append(state.mode)
    return modes
