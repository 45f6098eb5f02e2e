"""Exception types shared across the package."""


class RegaffError(Exception):
    """Base class for all library errors."""


class FieldMismatchError(RegaffError, ValueError):
    """Operands belong to different fields."""


class DimensionError(RegaffError, ValueError):
    """Shapes or lengths are incompatible."""


class SingularMatrixError(RegaffError, ValueError):
    """A matrix that had to be invertible is not."""


class InadmissibleError(RegaffError, ValueError):
    """Parameters fall outside the range where a construction exists."""


class FormatError(RegaffError, ValueError):
    """A text file or token could not be parsed.

    ``line`` is the 1-based line number when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
