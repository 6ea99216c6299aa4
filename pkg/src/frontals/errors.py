"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems exit 1,
violated mathematical preconditions exit 2, I/O failures exit 3.
"""


class FrontalsError(Exception):
    """Base class for all package errors."""


class ConfigError(FrontalsError):
    """Bad user input: config files, expression syntax, flag validation."""


class MathPreconditionError(FrontalsError):
    """A documented mathematical precondition does not hold."""


class InflectionError(MathPreconditionError):
    """The unit tangent's derivative vanishes somewhere in the queried range."""


class TangentUndeterminedError(MathPreconditionError):
    """All derivative jets vanish up to the requested order; no tangent line."""


class GridTooCoarseError(MathPreconditionError):
    """Frame transport rejected a step because orthonormality drifted too far."""
