"""Exception hierarchy shared by the library and the command line."""


class PierceError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PierceError, ValueError):
    """Malformed input: bad digit sequence, bad probabilities, bad file."""


class DomainError(ValidationError):
    """Numeric argument outside the domain of an operation."""


class DepthShortfall(PierceError, ValueError):
    """A finite expansion ended before the requested number of digits."""

    def __init__(self, achieved, requested):
        self.achieved = achieved
        self.requested = requested
        super().__init__(
            f"expansion terminates after {achieved} digits, {requested} requested"
        )


class OrbitTerminated(PierceError):
    """The shift map was applied to a terminated single-digit expansion."""


class ResourceCapExceeded(PierceError, RuntimeError):
    """A computation would exceed its configured work limit."""
