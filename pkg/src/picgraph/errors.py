"""Exception types shared across the package."""


class PicgraphError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(PicgraphError):
    """Matrix or vector dimensions are incompatible."""


class BackendMismatch(PicgraphError):
    """An operation received groups with incompatible backends."""


class UnsupportedBackend(PicgraphError):
    """The requested computation is not available for this group backend."""


class MissingWitness(PicgraphError):
    """A free-group operation needs an explicit inverse witness."""


class WrongParent(PicgraphError):
    """A group element does not belong to the expected group."""


class NotAutomorphism(PicgraphError):
    """The map is not an automorphism (source differs from target)."""


class Mismatch(PicgraphError):
    """Two maps cannot be chained or compared."""


class UnknownEdge(PicgraphError):
    """An edge id is not present in the presentation."""


class NotComposable(PicgraphError):
    """Two groupoid arrows have mismatched source/target."""


class ParseError(PicgraphError):
    """An input document failed to parse; carries a location string."""

    def __init__(self, message, location=""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location
        self.reason = message
