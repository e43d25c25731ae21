"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class GluingError(Exception):
    exit_code = 1


class ParseError(GluingError, ValueError):
    """Input text does not follow the file grammar."""

    exit_code = 2


class ValidationError(GluingError, ValueError):
    """Input parsed but violates a model invariant."""

    exit_code = 3


class SizeCapError(GluingError):
    """A matrix would exceed the configured column cap."""

    exit_code = 4


class SignallingError(ValidationError):
    """Operation requires a non-signalling (consistently connected) model."""


class InvariantBreach(GluingError, AssertionError):
    """An internal consistency check failed. Always a bug."""

    exit_code = 70
