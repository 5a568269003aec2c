"""Exception hierarchy.

Config-type errors map to CLI exit code 2, geometry errors to exit code 3.
"""


class LieAppError(Exception):
    """Base class for all library errors."""


class ConfigError(LieAppError):
    """Invalid user input (bad names, parameters, files)."""


class UnknownSurface(ConfigError):
    pass


class BadParams(ConfigError):
    pass


class SchemaError(ConfigError):
    pass


class AllZeroCoefficients(ConfigError):
    pass


class GeometryError(LieAppError):
    """The geometric data violate a structural requirement."""


class DegeneratePair(GeometryError):
    pass


class NoNullVectors(GeometryError):
    pass


class UmbilicEverywhere(GeometryError):
    pass


class ProjectionSingular(GeometryError):
    pass


class TauNotInWedgeF(GeometryError):
    pass


class FrameDegenerate(GeometryError):
    pass


class AssociateSingular(GeometryError):
    pass


class DependentQuantities(GeometryError):
    pass


class DegenerateGInfinity(GeometryError):
    pass


class NotApproximatelyFlat(GeometryError):
    pass


class RegularityViolation(GeometryError):
    pass


class SingularIntersection(GeometryError):
    pass
