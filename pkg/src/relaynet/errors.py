class NetworkParseError(ValueError):
    """Malformed network document; ``location`` is a JSON-path-like pointer."""

    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"{location}: {message}")


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured size cap."""


class ArgumentError(ValueError):
    """Inputs are well-formed but outside an operation's domain."""
