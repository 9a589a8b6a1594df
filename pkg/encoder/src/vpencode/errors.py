"""Exception taxonomy for the extraction sidecar."""


class EncodeError(Exception):
    """Base class for everything this package raises on purpose."""


class InvalidInputError(EncodeError):
    """Caller handed us arguments that can never work."""


class DecodeError(EncodeError):
    """A video file could not be opened or read as frames."""


class EncoderError(EncodeError):
    """The embedding model failed or is unavailable."""
