"""
Exception hierarchy for the capacity library.

Every failure raised by the numerical modules derives from CapacityError so
that the command line can map it onto an exit code.
"""


class CapacityError(Exception):
    """Base class for all library errors"""

    exit_code = 1


class InvalidDistribution(CapacityError, ValueError):
    """A pmf, reward table, outage curve or HARQ configuration is malformed"""

    exit_code = 2

    def __init__(self, message: str, key: str = None):
        # configuration field at fault, when there is one
        self.key = key
        super().__init__(message)


class ConfigError(CapacityError, ValueError):
    """A run configuration or inline micro-syntax could not be parsed"""

    exit_code = 2

    def __init__(self, message: str, key: str = None):
        self.key = key
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)


class NonConvergence(CapacityError):
    """Bisection budget or bracket expansion exhausted"""

    exit_code = 3


class EvaluatorDiverged(CapacityError):
    """A user supplied cumulant evaluator returned a non-finite value"""

    exit_code = 3


class TooLarge(CapacityError):
    """Finite-time enumeration would visit too many count vectors"""

    exit_code = 3


class CoincidentRoots(CapacityError):
    """Characteristic roots are too close for the determinant form"""

    exit_code = 3


class NeedsMonteCarlo(CapacityError):
    """No exact outage expression exists for this configuration"""

    exit_code = 2


class LatticeError(CapacityError):
    """VR interarrival times cannot be placed on a common integer lattice"""

    exit_code = 2


class GridTooLarge(CapacityError):
    """Rate search space exceeds the configured point budget"""

    exit_code = 2


class VarianceWarning(UserWarning):
    """Monte Carlo estimate has a relative standard error above threshold"""

    exit_code = 4
