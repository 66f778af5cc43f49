"""Exception types shared across the package.

Every error carries a stable ``kind`` string (the class name) that the HTTP
layer maps into the ``error_kind`` field of error response bodies.
"""


class ParcelSteerError(Exception):
    """Base class for all package errors."""

    @property
    def kind(self) -> str:
        return type(self).__name__


# ---------------------------------------------------------------------------
# volume I/O

class MalformedHeader(ParcelSteerError):
    """File is not a readable single-file little-endian NIfTI-1 volume."""


class UnsupportedDatatype(ParcelSteerError):
    """Header datatype code outside the supported subset."""


class NonFiniteSample(ParcelSteerError):
    """A NaN or infinity was found in a scan; position stored as (x, y, z, t)."""

    def __init__(self, position):
        self.position = tuple(int(p) for p in position)
        super().__init__(f"non-finite sample at (x, y, z, t) = {self.position}")


class DimsMismatch(ParcelSteerError):
    """Atlas spatial dims do not match the scan they are bound to."""


class UnknownLabel(ParcelSteerError):
    """Atlas grid contains a label absent from the metadata table."""

    def __init__(self, label):
        self.label = int(label)
        super().__init__(f"label {self.label} present in volume but not in metadata table")


class DuplicateLabel(ParcelSteerError):
    """Metadata table lists the same label_id twice."""


# ---------------------------------------------------------------------------
# signal kernels

class ZeroVariance(ParcelSteerError):
    """Correlation of a constant time-course is undefined."""


class LengthMismatch(ParcelSteerError):
    """Time-courses of different lengths cannot be correlated."""


class InvalidRange(ParcelSteerError):
    """Filter range with lo > hi."""


# ---------------------------------------------------------------------------
# parcellation engine

class EmptyAtlas(ParcelSteerError):
    """Atlas volume contains no nonzero labels."""


class ThresholdOutOfRange(ParcelSteerError):
    """Correlation-distance threshold outside [0, 2]."""


class NotALeaf(ParcelSteerError):
    """Operation requires a leaf node."""


class SingletonLeaf(ParcelSteerError):
    """Leaf with one member cannot be expanded."""


class ThresholdNotTighter(ParcelSteerError):
    """Expand threshold must be strictly below the node's formation threshold."""


class SameNode(ParcelSteerError):
    """Merge requires two distinct leaves."""


class ForbiddenKind(ParcelSteerError):
    """Collapse applies only to cluster nodes, never root/hemisphere/network/leaf."""


class IndexOutOfRange(ParcelSteerError):
    """Slice index outside the plane's axis extent."""


class NoHierarchy(ParcelSteerError):
    """Session has no initialized hierarchy yet."""
