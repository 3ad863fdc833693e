"""Exception hierarchy for the engine."""


class AlpipeError(Exception):
    """Base class for all engine errors."""


class ConfigurationError(AlpipeError):
    """Unknown template/strategy/learner name or bad configuration value."""


class UnsatisfiableSplitError(AlpipeError):
    """A dataset class has no instance in the train split."""


class ProtocolViolationError(AlpipeError):
    """Oracle consulted for an index it must not answer."""


class ParseError(AlpipeError):
    """Malformed ARFF/CSV/config input; message names the offending line."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FetchError(AlpipeError):
    """Dataset download failed and no cached copy exists."""


class IntegrityError(AlpipeError):
    """Cached dataset payload does not match its recorded checksum."""


class PreprocessingError(AlpipeError):
    """Preprocessing statistics cannot be computed or schema mismatch."""


class FitError(AlpipeError):
    """Learner training failed (bad inputs, bridge failure, timeout)."""


class ContextError(AlpipeError):
    """Query strategy invoked with an incomplete QueryContext."""


class StatisticsError(AlpipeError):
    """Statistical routine called with insufficient samples."""


class StoreConflictError(AlpipeError):
    """A differing run record already exists at the same store key."""


class StoreError(AlpipeError):
    """Run store I/O failure."""


class BridgeError(FitError):
    """External-learner protocol desync, timeout, or child death."""
