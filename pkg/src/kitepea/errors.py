"""Exception hierarchy shared by every module."""


class KitepeaError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(KitepeaError, ValueError):
    """An operation was called with arguments violating its precondition."""


class Unavailable(KitepeaError):
    """A structural capability is missing for the requested instance."""


class NotEnumerableError(Unavailable):
    """Intervals of the instance cannot be listed exhaustively."""


class NotLatticeError(Unavailable):
    """The instance has no lattice operations."""


class WindowTooLargeError(UsageError):
    """An exhaustive check would exceed its configured size cap."""


class ConfigError(KitepeaError):
    """A run configuration failed validation.

    ``path`` names the offending field, e.g. ``"lambda"`` or ``"group.kind"``.
    """

    def __init__(self, path, message):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)
