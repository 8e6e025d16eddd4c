"""Exception types shared across the package."""


class McgtaError(Exception):
    """Base class for all mcgta errors."""


class InvalidInput(McgtaError):
    """Arguments violate a documented precondition."""


class NotPositiveSemidefinite(McgtaError):
    """Matrix has an eigenvalue below the PSD tolerance."""


class InsufficientSamples(McgtaError):
    """Too few samples to estimate a model."""


class ConvergenceFailure(McgtaError):
    """Iterative solver did not converge.

    ``last_iterate`` holds the solver's final estimate when one exists.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class DegenerateBinning(McgtaError):
    """Pairwise distances cannot be partitioned into bins."""


class InsufficientData(McgtaError):
    """Too few nonempty bins to fit a curve."""


class GenerationFailure(McgtaError):
    """Synthetic generator could not satisfy its constraints."""


class ParseError(McgtaError):
    """Malformed input file.

    ``row`` is the 1-based file row where parsing failed, when known.
    """

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class CacheCorrupt(McgtaError):
    """Model cache payload does not match its header."""
