"""Exception types shared across the package."""


class ScheduleDomainError(ValueError):
    """A tabulated schedule was queried outside its time range."""


class ModelValidationError(ValueError):
    """A Lindblad model violates its constraints (non-Hermitian H, negative rate)."""


class NotHermitianError(ValueError):
    """An operator required to be Hermitian is not, within tolerance."""


class ConfigError(ValueError):
    """Malformed run configuration; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field} {message}" if field else message)
        self.field = field


class IntegrationError(RuntimeError):
    """Non-finite values encountered during time stepping."""

    def __init__(self, message, step):
        super().__init__(message)
        self.step = step


class BlowupError(IntegrationError):
    """Trajectory magnitude exceeded the hard cap.

    Dissipative adjoint flow grows exponentially; growth is legitimate but
    overflow must be loud rather than silent.
    """

    def __init__(self, message, step, magnitude):
        super().__init__(message, step)
        self.magnitude = magnitude
