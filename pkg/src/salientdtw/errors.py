class InvalidInputError(ValueError):
    """Raised when an argument violates an operation's preconditions."""


class BandInvariantError(InvalidInputError):
    """Raised when a band mask is not monotone, connected, or misses a corner."""


class DataError(ValueError):
    """Raised for unreadable or malformed dataset and cache files."""
