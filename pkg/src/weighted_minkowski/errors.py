"""Exception types raised across the package."""


class GeometryError(Exception):
    """Base class for all errors raised by weighted_minkowski."""


class UnboundedBody(GeometryError):
    """The normals do not positively span the space."""


class DegenerateInput(GeometryError):
    """Two normals coincide, pairing is broken, or an offset is not positive."""


class DimensionTooLarge(GeometryError):
    pass


class DegenerateGenerators(GeometryError):
    """Zonotope generators do not span the ambient space."""


class NonHomogeneousDensity(GeometryError):
    """An operation that needs a homogeneous density got e.g. the Gaussian."""


class DomainError(GeometryError, ValueError):
    pass


class FaceCollapsed(GeometryError):
    """A face stayed empty for too many consecutive solver iterations."""


class NoConvergence(GeometryError):
    pass


class RejectedPair(GeometryError):
    """A supplied counterexample pair violates one of the certification clauses."""


class CheckFailed(GeometryError, AssertionError):
    """A numerical verification did not hold within its tolerance."""
