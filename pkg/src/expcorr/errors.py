"""Exceptions raised by expcorr.

Every error carries an ``origin`` of the form ``"<module>.<operation>"`` so the command line
can tell the user where a computation gave up. Errors fall into three families, each with
its own exit code.
"""

from typing import ClassVar


class ExpcorrError(Exception):
    """Base class of all expcorr errors."""

    exit_code: ClassVar[int] = 1

    def __init__(self, message: str, *, origin: str = ""):
        """Create an error.

        :param message: Human readable description.
        :param origin: ``"<module>.<operation>"`` the error originates from.
        """
        super().__init__(message)
        self.origin = origin


class InputError(ExpcorrError):
    """The input is malformed (files, flags, table shapes)."""

    exit_code = 3


class FormatError(InputError):
    """A file or flag does not follow the expected format."""


class ShapeError(InputError):
    """Series, matrices or tables have incompatible shapes or missing columns."""


class OutOfRangeError(InputError):
    """A value falls outside explicitly given bin edges."""


class EmptyInputError(InputError):
    """Nothing is left to work on."""


class UnassignableRowError(InputError):
    """A row falls into no stratum and carries no override."""


class FileAccessError(InputError):
    """A file cannot be read, decoded or written."""


class DegenerateError(ExpcorrError):
    """The input is well-formed but mathematically degenerate."""

    exit_code = 4


class DegenerateInputError(DegenerateError):
    """A series has zero variance (or all values tied)."""


class StratumTooSmallError(DegenerateError):
    """A stratum holds fewer rows than a correlation needs."""


class DegeneratePredictorsError(DegenerateError):
    """The predictor correlation matrix is singular or ill-conditioned."""


class EmptySelectionError(DegenerateError):
    """A correspondence selection produced an empty set."""


class DegenerateFitError(DegenerateError):
    """A least-squares system is rank deficient."""


class DegenerateGeometryError(DegenerateFitError):
    """Sample locations do not determine the requested surface."""


class UnderdeterminedError(DegenerateFitError):
    """Fewer samples than unknown coefficients."""


class DegenerateFieldError(DegenerateError):
    """A field has (numerically) zero norm."""


class NothingToEliminateError(DegenerateError):
    """The variable to eliminate does not occur."""


class DegenerateEliminationError(DegenerateError):
    """A resultant vanishes identically (the inputs share a factor)."""


class IncompleteEliminationError(DegenerateError):
    """A coordinate survived the elimination pipeline."""


class NumericalIntegrityError(ExpcorrError):
    """A result violates a bound it must satisfy mathematically."""

    exit_code = 5
