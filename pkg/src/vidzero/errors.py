"""Exception hierarchy shared across the package.

Input/validation problems derive from ``InputError`` (CLI exit code 1),
backend/transport problems from ``BackendError`` (CLI exit code 2).
"""


class VidZeroError(Exception):
    """Base class for all errors raised by this package."""


class InputError(VidZeroError):
    """Invalid arguments, files, or data shapes supplied by the caller."""


class BackendError(VidZeroError):
    """A generative or embedding backend could not produce a usable result."""


# -- vector math ---------------------------------------------------------

class DimMismatchError(InputError):
    """Operands live in embedding spaces of different dimension."""


class ZeroVectorError(InputError):
    """A (near-)zero vector where a direction is required."""


class EmptyListError(InputError):
    """An aggregate over zero vectors."""


# -- stores --------------------------------------------------------------

class RaggedMatrixError(InputError):
    """Rows of differing lengths passed where a rectangular matrix is required."""


class DuplicateIdError(InputError):
    """Two rows share the same id."""


class UnknownIdError(InputError):
    """Lookup of an id the store does not contain."""


class CorruptStoreError(InputError):
    """Manifest and binary payload disagree, or the payload is malformed."""


class UnsupportedVersionError(InputError):
    """Store format version this code does not understand."""


class SchemaError(InputError):
    """A JSON document does not match its schema.

    ``path`` names the offending field, e.g. ``.classes.X.attributes``.
    """

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# -- generative clients --------------------------------------------------

class UnboundPlaceholderError(InputError):
    """A prompt template placeholder was left unbound."""


class InvalidInputError(InputError):
    """Caller violated an operation precondition."""


class InvalidClassNameError(InvalidInputError):
    """Empty or whitespace-only class name."""


class BackendUnavailableError(BackendError):
    """Backend still failing after the configured retry budget."""


class EmptyResponseError(BackendError):
    """Backend kept returning empty text."""


class MissingFixtureError(BackendError):
    """A fixture-file backend has no entry for the requested key."""


class DuplicateAssignmentError(InputError):
    """A class assigned to two different hierarchy parents."""


# -- classifier / eval ---------------------------------------------------

class EmbedderError(BackendError):
    """Text embedder failed or returned vectors violating its contract."""


class EmptyClassifierError(InputError):
    """Classification against a classifier with no classes."""


class MissingLabelError(InputError):
    """A prediction has no ground-truth label."""


class EmptyGridError(InputError):
    """Ablation grid with no lattice points."""
