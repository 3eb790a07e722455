"""Exception hierarchy shared by the numerical modules and the CLI."""

from typing import Optional


class QmfsError(Exception):
    """Base class for every error raised on purpose by this package."""

    @property
    def name(self) -> str:
        return type(self).__name__


class ZeroDivisorError(QmfsError):
    """Inversion of a zero divisor (or of zero) in the biquaternion algebra."""


class WaveNumberError(QmfsError):
    """Wave number violates alpha != 0, Im(alpha) >= 0."""


class SingularPointError(QmfsError):
    """Kernel evaluated at (or too close to) its singularity."""


class UnsupportedSurfaceError(QmfsError):
    pass


class ScaleError(QmfsError):
    """Auxiliary surface would touch or cross the boundary."""


class ChiralSingularityError(QmfsError):
    """1 + alpha*beta or 1 - alpha*beta vanishes."""


class BranchError(QmfsError):
    """No admissible square-root branch for the medium."""


class NonVectorialError(QmfsError):
    """A field expected to be purely vectorial carries a scalar part."""


class NodeSourceCollisionError(QmfsError):
    pass


class TangentialityError(QmfsError):
    """Boundary data has a normal component."""


class SingularSystemError(QmfsError):
    pass


class QuadratureError(QmfsError):
    pass


class ConfigError(QmfsError):
    def __init__(self, message: str, field_path: Optional[str] = None):
        self.field_path = field_path
        if field_path:
            message = f"{field_path}: {message}"
        super().__init__(message)
