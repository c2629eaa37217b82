"""Exception types shared across the package."""


class GazeLinesError(Exception):
    """Base class for errors raised by gazelines."""


class DataFormatError(GazeLinesError):
    """A file or record does not match the expected format."""


class InsufficientDataError(GazeLinesError):
    """Too few usable samples to carry out the requested estimate."""


class SymbolRangeError(GazeLinesError, ValueError):
    """An observation symbol or line label lies outside the model's range."""


class NumericError(GazeLinesError):
    """A computation could not produce a usable numeric result."""
