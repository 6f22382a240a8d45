"""Exception hierarchy shared by every crossvote module."""


class CrossvoteError(Exception):
    """Base class for all library errors."""


class ConfigError(CrossvoteError, ValueError):
    """A configuration object or config file is invalid."""


class PlacementError(CrossvoteError):
    """The fleet could not be placed on its loop without overlap."""


class DimensionError(CrossvoteError, ValueError):
    """Array, network or objective-set shapes do not line up."""


class CheckpointError(CrossvoteError):
    """A checkpoint file is corrupt, truncated or of an unknown version."""


class EmptyTraceError(CrossvoteError, ValueError):
    """Metrics were requested for a trace without any recorded seconds."""
