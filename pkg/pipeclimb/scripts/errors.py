"""
Exception hierarchy shared by the simulator components and the CLI exit-code contract.
"""

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_TIMEOUT = 4


class PipeClimbError(Exception):
    """Base class for every error raised by the simulator."""


class ParameterError(PipeClimbError, ValueError):
    """A parameter violates a precondition or an invariant."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class RangeError(PipeClimbError, ValueError):
    """A value lies outside its admissible range."""


class InfeasibleConstraintError(PipeClimbError):
    """The differential constraint cannot be satisfied."""


class SolverError(PipeClimbError):
    """The torque-balance root finder did not converge."""

    def __init__(self, message, bracket=None, iterations=0):
        super().__init__(message)
        self.bracket = bracket
        self.iterations = iterations


class UndefinedPowerError(PipeClimbError):
    """Input torque is undefined at zero input speed with nonzero output power."""


class DegenerateSlipError(PipeClimbError, ValueError):
    """Slip is undefined for a zero requirement and a moving track."""


class AlignmentError(PipeClimbError, ValueError):
    """Two series do not share the same timestamps."""


class MetricUndefinedError(PipeClimbError, ValueError):
    """A metric is undefined for the given reference values."""


class ConfigError(PipeClimbError):
    """Scenario or command-line configuration is invalid; `key` names the culprit."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


def exit_code_for(exc):
    """
    Map an exception to the CLI exit code.

    Args:
        exc (BaseException): Raised error

    Returns:
        int: 2 for configuration/parameter problems, 3 for solver failures
    """
    if isinstance(exc, SolverError):
        return EXIT_SOLVER
    if isinstance(exc, (ConfigError, ParameterError, RangeError, InfeasibleConstraintError,
                        UndefinedPowerError, ValueError)):
        return EXIT_CONFIG
    return EXIT_SOLVER
