"""Centralised exception hierarchy for polyvem."""


class PolyVemError(Exception):
    """Base exception for all polyvem errors."""


class MeshError(PolyVemError):
    """Raised when mesh topology is invalid (non-manifold, open, orphaned)."""


class GeometryError(MeshError):
    """Raised when a face or element has degenerate or non-planar geometry."""


class MeshFormatError(PolyVemError):
    """Raised when a mesh document cannot be decoded."""


class QuadratureError(PolyVemError):
    """Raised when a quadrature rule meets a non-star-shaped cell or face."""


class MaterialError(PolyVemError):
    """Raised when elastic constants are invalid or D is not positive definite."""


class ElementError(PolyVemError):
    """Raised when element operators cannot be formed from the given inputs."""


class AssemblyError(PolyVemError):
    """Raised when the global system cannot be assembled or constrained."""


class SingularSystemError(AssemblyError):
    """Raised when no displacement constraints make the system well posed."""


class SolverError(PolyVemError):
    """Raised when the linear solve does not reach the requested residual."""

    def __init__(self, message: str, residual: float | None = None) -> None:
        super().__init__(message)
        self.residual = residual


class AnalysisError(PolyVemError):
    """Raised when an error measure or study is undefined for its inputs."""


class ConfigError(PolyVemError):
    """Raised when a run configuration is inconsistent with the command."""
