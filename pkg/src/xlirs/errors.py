"""Exception hierarchy shared by the library and the CLI."""


class XlirsError(Exception):
    """Base class for every error raised by xlirs."""


class ValidationError(XlirsError, ValueError):
    """A value violates a domain invariant (geometry, node position, scenario)."""


class DomainError(XlirsError, ValueError):
    """A special function was called outside its real domain."""


class ConfigError(XlirsError):
    """A scenario file could not be parsed."""

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)


class ConvergenceError(XlirsError):
    """Adaptive quadrature ran out of refinement before meeting its tolerance.

    The best available estimate and its error bound are kept on the exception
    so callers can decide whether the result is still usable.
    """

    def __init__(self, message, value, error):
        super().__init__(f"{message} (best estimate {value!r}, error bound {error!r})")
        self.value = value
        self.error = error


class PreconditionError(XlirsError, ValueError):
    """A model's applicability condition does not hold for the scenario."""
