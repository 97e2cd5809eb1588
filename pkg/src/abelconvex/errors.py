"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent input (dimension mismatch, NaN, empty lists)."""


class NotInteriorError(ValueError):
    """A target moment lies on the relative boundary of, or outside, the orbit image.

    Such values are never attained at a finite group element; they are reached
    only in the limit, through flow limits.
    """

    def __init__(self, message, membership=None):
        super().__init__(message)
        self.membership = membership


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual, iterations):
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")
        self.residual = residual
        self.iterations = iterations
