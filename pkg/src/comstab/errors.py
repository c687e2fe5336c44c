"""Exception types raised across the toolkit."""


class ComstabError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(ComstabError, ValueError):
    """Parameter set violates its invariants."""


class ComOutsideWheelbaseError(ComstabError):
    """Shifted COM leaves the wheelbase (a <= 0 or b <= 0)."""


class ZeroStiffnessError(ComstabError, ZeroDivisionError):
    pass


class OversteerSingularityError(ComstabError):
    """Yaw-rate gain evaluated at the oversteer critical speed."""


class SingularSystemError(ComstabError):
    pass


class ZeroYawRateError(ComstabError, ZeroDivisionError):
    pass


class UnreachableTargetError(ComstabError):
    """Leg IK target lies outside the reachable annulus."""


class BallisticPhaseError(ComstabError):
    """ZMP denominator is not positive (no ground reaction)."""


class InfeasibleBoundaryError(ComstabError):
    pass


class InsufficientDataError(ComstabError):
    pass


class StabilityMarginError(ComstabError):
    """Observer discretization outside the admitted step/bandwidth margin."""


class ZeroInputGainError(ComstabError, ZeroDivisionError):
    pass


class NondeterminismError(ComstabError):
    """Two outgoing guards enabled at once (reported, resolved by priority)."""


class ConfigError(ComstabError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
