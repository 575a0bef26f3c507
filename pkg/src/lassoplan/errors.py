"""Exception types shared across the package."""


class LassoplanError(Exception):
    """Base class for errors raised by this package."""


class ModelError(LassoplanError, ValueError):
    """Invalid mobility model or query against one (unknown state, bad edge)."""


class NotATransitionError(ModelError):
    """A requested team move is not a transition for at least one robot."""


class AutomatonParseError(LassoplanError, ValueError):
    """Malformed automaton document. Carries a location string."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class ExplicitProductTooLarge(LassoplanError):
    """The explicit product graph would exceed the configured node cap."""


class ConfigError(LassoplanError, ValueError):
    """Invalid experiment or CLI configuration."""
