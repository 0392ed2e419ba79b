class VexnormError(Exception):
    """Base class of every error raised by vexnorm."""


class ArgumentError(VexnormError, ValueError):
    """A precondition of an operation is violated."""


class ResourceError(VexnormError):
    """The requested computation exceeds the configured budget."""


class ConfigurationError(VexnormError):
    """Experiment settings cannot produce a meaningful result."""


class DataError(VexnormError):
    """Input data is unusable (zero source norm, symbol outside BMO, ...)."""


class ConstructionError(VexnormError):
    """A test-family member falls outside its source space."""
