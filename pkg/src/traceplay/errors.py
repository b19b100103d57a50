"""Exception types shared across the package."""


class TraceError(Exception):
    """Base class for every error raised by this package."""


class RangeError(TraceError, IndexError):
    """An event index, line number or node id is out of range."""


class SequenceError(TraceError):
    """An event was applied out of sequence during replay."""


class StateError(TraceError):
    """Internal consistency failure (e.g. an event names an unknown node)."""


class PrefsError(TraceError):
    """Preferences file could not be loaded or failed validation."""
