"""Exception taxonomy: data-dependent failures vs. command-line misuse."""


class SpeckledistError(Exception):
    """Base class for toolkit errors."""


class DataError(SpeckledistError, ValueError):
    """Input data is unreadable, malformed, or out of the declared bounds."""


class UsageError(SpeckledistError, ValueError):
    """Invalid flag combination or argument value."""
