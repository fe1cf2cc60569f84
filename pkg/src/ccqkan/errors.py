"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Argument has the wrong shape, range, or is non-finite."""


class DegenerateResultError(ValueError):
    """The computation is undefined for the given data (zero variance, no signal)."""


class DataParseError(ValueError):
    """A data file could not be parsed.

    ``line`` is the 1-based line number of the offending row, when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NonFiniteLossError(ArithmeticError):
    """A loss evaluation returned nan or inf."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
