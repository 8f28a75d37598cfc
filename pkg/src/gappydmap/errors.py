"""Exception hierarchy shared by all modules.

Each class maps to one CLI exit code (see ``gappydmap.cli``).
"""


class GappyDmapError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class InvalidArgument(GappyDmapError, ValueError):
    exit_code = 2


class InvalidData(GappyDmapError, ValueError):
    """Input data contains NaN/inf or has an unusable shape."""

    exit_code = 2


class DegenerateData(GappyDmapError, ValueError):
    """Data is finite but geometrically degenerate (e.g. all points equal)."""

    exit_code = 4


class FormatError(GappyDmapError, ValueError):
    """A matrix or model file could not be parsed."""

    exit_code = 3


class NumericError(GappyDmapError, ArithmeticError):
    """An eigensolver or linear solve failed to meet its accuracy contract."""

    exit_code = 4

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class IllPosedError(GappyDmapError, ArithmeticError):
    exit_code = 5


class OutOfSupport(IllPosedError):
    """A query point is so far from the training data that all affinities underflow."""


class DataMismatch(GappyDmapError):
    """A model and a dataset were produced from different training data."""

    exit_code = 6
