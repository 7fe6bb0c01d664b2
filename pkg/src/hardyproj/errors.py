"""Exception types shared across the package."""


class HardyProjError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(HardyProjError, ValueError):
    pass


class GridTooSmall(HardyProjError, ValueError):
    """Requested quadrature grid cannot certify the computation."""


class PreconditionError(HardyProjError, ValueError):
    pass


class InconsistentLift(HardyProjError, RuntimeError):
    """Negative-frequency part of a lift left the subspace (grid aliasing)."""


class LacunaryError(HardyProjError, ValueError):
    """The supplied (a, lambda) prefix cannot complete the packing."""

    def __init__(self, level, msg):
        self.level = level
        super().__init__(f"level {level}: {msg}")
