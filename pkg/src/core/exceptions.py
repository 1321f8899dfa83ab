# src/core/exceptions.py


class QeosimError(Exception):
    """Base class for every error raised by the simulator."""


class ValidationError(QeosimError, ValueError):
    """A parameter violates a domain invariant."""

    def __init__(self, field: str, constraint: str):
        self.field = field
        self.constraint = constraint
        super().__init__(f"{field}: {constraint}")


class ConfigError(ValidationError):
    """Invalid or incomplete scenario configuration document."""


class TruncationError(QeosimError):
    """Sideband truncation too small for the requested modulation depth."""


class DimensionMismatchError(QeosimError, ValueError):
    """Matrices or vectors with different truncation half-widths were combined."""


class ConvergenceError(QeosimError):
    """Numerical integration did not converge under step halving."""


class ToleranceError(QeosimError):
    """A verification check exceeded its numerical tolerance."""

    def __init__(self, failures: dict):
        self.failures = failures
        names = ", ".join(sorted(failures))
        super().__init__(f"tolerance exceeded: {names}")


class CarrierRatioWarning(UserWarning):
    pass


class FockTruncationWarning(UserWarning):
    pass


class DegenerateEncodingWarning(UserWarning):
    pass


class OffOptimumWarning(UserWarning):
    pass
