"""Exception types raised across the package."""


class ShapeError(ValueError):
    """Array or vector dimensions do not match."""


class GridSizeError(ValueError):
    """Grid too small for the requested operator's boundary closures."""


class UnsupportedOperation(NotImplementedError):
    """The operator family lacks the requested capability."""


class ConsistencyError(ValueError):
    """Metric terms and quadrature come from different operators."""


class InfeasibleError(ValueError):
    """Pinned values are incompatible with the accuracy conditions."""


class SingularSystemError(ArithmeticError):
    """An exact linear system is singular or inconsistent."""
