"""Exception hierarchy shared by all attreval modules."""


class AttrEvalError(Exception):
    """Base class for all attreval-specific errors."""


class FormatError(AttrEvalError):
    """A file does not conform to a supported on-disk format."""


class CorruptedFileError(FormatError):
    """A file has the right format header but a damaged payload."""


class ValidationError(AttrEvalError):
    """Inputs violate a documented invariant (shape, alignment, ids...)."""


class InsufficientDataError(ValidationError):
    """Too few observations for the requested computation."""


class DegenerateSampleError(AttrEvalError):
    """A paired sample collapses (e.g. all differences are zero)."""
