"""Exception hierarchy shared by every module."""


class CashFlowError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(CashFlowError, ValueError):
    """Input violates an operation's contract."""


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateError(CashFlowError, ValueError):
    """Data is valid in form but statistically degenerate (zero variance, ...)."""


class CollinearityError(DegenerateError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"design matrix is rank deficient; column {column!r} is collinear")


class DomainError(CashFlowError, ValueError):
    """Value lies outside the domain of an inverse transform."""
