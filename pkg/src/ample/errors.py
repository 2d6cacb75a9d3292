"""Exception types shared across the package."""


class AmpleError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(AmpleError, ValueError):
    """An argument violates a documented precondition."""


class InconsistentStateError(AmpleError):
    """A value object fails its own structural invariants."""


class ConfigError(AmpleError):
    """A config document is malformed or fails validation.

    ``path`` locates the offending element ("sweep.samples", "ring.pairing[1][0]", ...);
    empty for document-level problems such as malformed JSON.
    """

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
