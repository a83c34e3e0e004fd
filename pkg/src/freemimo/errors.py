"""Exception types shared across the library."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConvergenceError(RuntimeError):
    """An iterative numerical procedure failed to converge or to bracket."""


class QuadratureError(ConvergenceError):
    """Adaptive quadrature exhausted its refinement budget."""
