"""Exception types shared across the package."""


class ZeroReferenceError(ValueError):
    """The reference amplitude (vacuum population) vanishes.

    Raised when a nilpotential is requested for a state with
    ``|amps[0]|`` at or below the configured guard, or when taking the
    logarithm of a polynomial whose constant term is zero.  Apply a
    local rotation first (see ``su_reduction.prerotate``).
    """


class ConvergenceError(RuntimeError):
    """A feedback flow did not reach its tolerance within the step cap."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ReconstructionError(RuntimeError):
    """Canonic-amplitude reconstruction failed for every branch choice.

    Carries a ``diagnostics`` dict describing the invariant set and the
    branch residuals; typically signals a special or degenerate orbit
    where the closed-form reconstruction does not apply.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
