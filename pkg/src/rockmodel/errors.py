"""Exception hierarchy shared by all rockmodel modules."""


class RockModelError(Exception):
    """Base class for every error raised by this package."""


class InvalidCoordinateError(RockModelError, ValueError):
    pass


class OutOfFrameError(RockModelError, ValueError):
    """A point lies beyond the tangent-plane validity radius of a frame."""


class InvalidPolygonError(RockModelError, ValueError):
    pass


class InvertedAltitudeError(RockModelError, ValueError):
    pass


class WrongPlaneError(RockModelError, ValueError):
    pass


class EmptyIntervalError(RockModelError, ValueError):
    pass


class OrthogonalityError(RockModelError, ValueError):
    """Both solids handed to an orthogonal intersection sweep along the same axis."""


class ResourceLimitError(RockModelError):
    pass


class OpenMeshError(RockModelError, ValueError):
    pass


class KmlError(RockModelError, ValueError):
    pass


class KmlParseError(KmlError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CoordinateError(KmlError):
    pass


class OpenRingError(KmlError):
    pass


class DegenerateRingError(KmlError):
    pass


class ProjectError(RockModelError):
    """Bad project file, missing input, or missing build artifact."""


class GeometryWarning(UserWarning):
    """Emitted when input geometry is auto-corrected (e.g. ring orientation)."""


class SubdivisionError(InvalidPolygonError):
    """A subdivision failed validation; ``diagnostics`` lists every violation."""

    def __init__(self, message, diagnostics=()):
        self.diagnostics = list(diagnostics)
        super().__init__(message)
