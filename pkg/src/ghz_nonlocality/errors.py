"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """Raised when a dense computation would exceed the configured size cap."""


class ConsistencyError(RuntimeError):
    """Raised when an internal cross-check or asserted relation fails."""


class UnsupportedProtocolError(ValueError):
    """Raised when a protocol is requested outside its valid setting family."""
