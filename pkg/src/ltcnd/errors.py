"""Exception hierarchy shared by every backend."""


class LTCError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(LTCError, ValueError):
    """A tolerance, dimension or geometric argument is out of its domain."""


class RejectedInputError(LTCError, ValueError):
    """A stream sample violates the stream contract (e.g. time went backwards)."""


class OutOfRangeError(LTCError, ValueError):
    """A reconstruction was requested outside the transmitted time range."""


class ParseError(LTCError, ValueError):
    """A stream file could not be read. ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ResourceCapError(LTCError):
    """An oracle grid would exceed its point budget."""


class InconclusiveOracleError(LTCError):
    """A brute-force oracle could not certify a verdict."""
