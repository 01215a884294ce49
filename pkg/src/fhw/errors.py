"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the documented domain of an operation."""


class ConsistencyError(RuntimeError):
    """Internal consistency violated (e.g. broken Hermitian symmetry)."""


class MultiplierError(RuntimeError):
    """A Fourier multiplier produced NaN on the lattice."""

    def __init__(self, message, xi=None):
        super().__init__(message)
        self.xi = xi


class PreconditionError(ValueError):
    """Structural precondition of an operation not met."""


class ModuloPolynomialsError(ValueError):
    """Negative-order operation requested on a field with nonzero mean."""


class BlowUpError(RuntimeError):
    """Time marching produced non-finite or threshold-exceeding values."""

    def __init__(self, message, last_valid_index):
        super().__init__(message)
        self.last_valid_index = last_valid_index


class NonconvergenceError(RuntimeError):
    """Picard iteration diverged; carries the diagnostic report."""

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


class FitWindowError(ValueError):
    """Requested fit window is empty or degenerate."""
