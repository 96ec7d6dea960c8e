"""Exception types shared across the package.

The CLI maps these to exit code 1 and the HTTP service maps them to
4xx/5xx responses, so raising the right class matters.
"""


class SizeDepthError(Exception):
    """Base class for all domain errors."""


class DecodeError(SizeDepthError):
    """Input bytes could not be decoded (image or PFM file)."""


class DimensionError(SizeDepthError):
    """A size, shape, or index is out of its valid range."""


class SchemaError(SizeDepthError):
    """A document violates its schema. Carries the offending field path."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


class ConflictError(SizeDepthError):
    """Two annotations target the same patch."""


class EmptyConstraintError(SizeDepthError):
    """No annotated patch, so the solve would be unconstrained."""


class UnderdeterminedError(SizeDepthError):
    """lambda = 0 with unannotated pixels leaves the system singular."""


class SolverError(SizeDepthError):
    """The iterative solve did not reach the requested residual."""

    def __init__(self, message, residual, iterations):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
