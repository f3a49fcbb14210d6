"""Exception types shared across the package.

Everything raised on purpose derives from :class:`RandsuiteError`, so callers
can catch one base class.  Most subclasses also derive from ``ValueError``
because they signal bad input values.
"""


class RandsuiteError(Exception):
    """Base class for all errors raised by randsuite."""


class InvalidCharacter(RandsuiteError, ValueError):
    """A character outside the encoding's alphabet was found while parsing."""


class EmptyInput(RandsuiteError, ValueError):
    """Parsing produced zero bits."""


class LengthMismatch(RandsuiteError, ValueError):
    """A decoded sample does not match the declared bit length.

    Attributes
    ----------
    path : str | None
        Offending file, when known.
    declared : int | None
        Expected number of bits.
    actual : int | None
        Number of bits actually decoded.
    """

    def __init__(self, message, *, path=None, declared=None, actual=None):
        super().__init__(message)
        self.path = path
        self.declared = declared
        self.actual = actual


class DuplicateIndex(RandsuiteError, ValueError):
    """Two samples claim the same sample_index within one source."""


class ManifestError(RandsuiteError, ValueError):
    """A manifest file is structurally invalid (schema, encoding, paths)."""


class EmptySet(RandsuiteError, ValueError):
    """An operation that needs at least one sample got an empty sample set."""


class EmptySequence(RandsuiteError, ValueError):
    """An operation that needs at least one bit got an empty sequence."""


class SampleTooShort(RandsuiteError, ValueError):
    """A sequence is shorter than the test's minimum meaningful length.

    Attributes
    ----------
    min_length : int
    actual : int
    sample_index : int | None
        Filled in by the suite runner when known.
    """

    def __init__(self, message, *, min_length, actual, sample_index=None):
        super().__init__(message)
        self.min_length = min_length
        self.actual = actual
        self.sample_index = sample_index


class BlockTooLarge(RandsuiteError, ValueError):
    """Block size exceeds the sequence length."""


class PatternTooLong(RandsuiteError, ValueError):
    """Pattern length is too large for the sequence length."""


class TooFewSamples(RandsuiteError, ValueError):
    """The p-value uniformity check needs more samples.

    Attributes
    ----------
    min_count : int
    actual : int
    """

    def __init__(self, message, *, min_count, actual):
        super().__init__(message)
        self.min_count = min_count
        self.actual = actual


class DomainError(RandsuiteError, ValueError):
    """An argument is outside a function's mathematical domain."""


class NonFiniteInput(RandsuiteError, ValueError):
    """NaN or infinity where a finite real is required."""


class IndexOutOfRange(RandsuiteError, ValueError):
    """A sample index falls outside the range a noise model covers."""
