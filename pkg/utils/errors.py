"""Error types"""


class DltError(Exception):
    """Base class for every error raised by dltcodes"""


class InvalidDistribution(DltError, ValueError):
    """A coefficient vector cannot form a degree distribution"""


class NegativeMass(InvalidDistribution):
    """A coefficient is negative"""


class NotNormalized(InvalidDistribution):
    """Coefficients do not sum to one within tolerance"""


class InvalidParameter(DltError, ValueError):
    """A scalar parameter is outside its valid range"""


class WrongPerspective(DltError, ValueError):
    """Node/edge conversion applied to the wrong perspective"""


class DomainError(DltError, ValueError):
    """Polynomial evaluated outside [0, 1]"""


class DegreeExceedsClass(DltError, ValueError):
    """Sampled source degree is larger than the class size and clamping is off"""


class ModeMismatch(DltError, RuntimeError):
    """Buffer operation does not match the buffer mode"""


class BuffersNotFull(DltError, RuntimeError):
    """Relay asked to combine before its buffers are loaded"""


class WindowsNotConfigured(DltError, ValueError):
    """Expanding-window combining requested without a window spec"""


class UnknownScope(DltError, ValueError):
    """Erasure-rate scope string is not recognised"""


class PayloadDisabled(DltError, RuntimeError):
    """Payload check requested on a graph-only decoder"""


class ArgumentOutOfRange(DltError, ValueError):
    """Bound argument falls outside [0, 1]"""


class InvalidGrid(DltError, ValueError):
    """LP discretization grid or target rate is invalid"""


class SolverFailed(DltError, RuntimeError):
    """Linear program did not reach an optimal solution"""

    def __init__(self, status, message=None):
        self.status = status
        super().__init__(message or f"LP solver finished with status '{status.value}'")


class ValidationFailed(DltError, RuntimeError):
    """Optimized distribution fails density-evolution validation"""


class ConfigInvalid(DltError, ValueError):
    """Experiment configuration is malformed or inconsistent"""


class NoCrossing(DltError, ValueError):
    """Erasure-rate curve never reaches the requested target"""
