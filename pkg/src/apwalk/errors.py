"""Exception taxonomy shared across the package.

The CLI maps these onto process exit codes (usage/parameter problems -> 2,
capacity refusals -> 3, internal contract violations -> 4), so library code
should raise the most specific type that applies.
"""


class ParameterError(ValueError):
    """A caller-supplied argument is outside the documented domain."""


class CapacityError(RuntimeError):
    """The request is valid but exceeds a deliberate desk-scale cap."""


class FormatError(ValueError):
    """A document does not conform to the serialization schema.

    Carries an optional location (file/line or JSON path) for diagnostics.
    """

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(message if location is None else f"{location}: {message}")


class ContractViolation(RuntimeError):
    """An internal invariant failed; indicates a bug, not a usage error."""


class DegenerateProjectionError(RuntimeError):
    """A conditional state was requested from a (numerically) zero-mass projection."""
