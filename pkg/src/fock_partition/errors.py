"""Exception types raised across the package."""


class DomainError(ValueError):
    """A parameter lies outside the domain of the requested operation."""


class CutoffError(DomainError):
    """The Fock cutoff is too small for the requested accuracy."""

    def __init__(self, message, suggested=None):
        super().__init__(message)
        self.suggested = suggested


class DegenerateStateError(ArithmeticError):
    """A state map produced an all-zero weight vector."""


class ConvergenceError(ArithmeticError):
    """A series or quadrature failed to converge."""


class QuadratureError(ConvergenceError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
