"""Exception types shared across the package."""


class BlockEntropyError(Exception):
    """Base class for all package errors."""


class ConfigError(BlockEntropyError, ValueError):
    """Invalid model or experiment configuration.

    ``path`` names the offending field, e.g. ``model.components[1].weight``.
    """

    def __init__(self, message, path=""):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class ResourceError(BlockEntropyError):
    """A computation would exceed its configured size budget."""

    def __init__(self, message, required=None, budget=None):
        self.required = required
        self.budget = budget
        super().__init__(message)


class DecodeError(BlockEntropyError):
    """A k-block payload could not be decoded.

    ``section`` is one of ``header``, ``codebook``, ``body``, ``tail``.
    """

    def __init__(self, section, message):
        self.section = section
        super().__init__(f"{section}: {message}")
