"""Exception types shared across the package."""


class Tess4dError(Exception):
    """Base class for all package errors."""


class InvalidGeometryError(Tess4dError):
    """Geometry constructor parameters violate a precondition."""


class TopologyError(Tess4dError):
    """Entity incidence query or relation is inconsistent."""


class InputError(Tess4dError, ValueError):
    """Caller-supplied data violates an operation precondition."""


class ConstraintRecoveryError(Tess4dError):
    """A required boundary segment could not be recovered without
    introducing a boundary Steiner point."""


class ConformityError(Tess4dError):
    """A surface that must be closed/conforming is not."""


class OrientationError(Tess4dError):
    """A simplex with non-positive orientation was produced."""


class UnsupportedCapError(Tess4dError):
    """Cap meshing requested for a geometry that only runs in open mode."""


class MeshParseError(Tess4dError):
    """Mesh file is malformed; carries a location hint in the message."""


class CapacityError(Tess4dError):
    """A count exceeds the capacity of the target format."""
