"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class ConvergenceError(ArithmeticError):
    """A numerical procedure exhausted its budget.

    The best estimate reached so far is kept on ``estimate`` so callers can
    decide whether it is good enough.
    """

    def __init__(self, message, estimate=float("nan"), error=float("nan")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class UnsupportedParameters(ValueError):
    """Parameter pattern that the evaluator deliberately does not handle."""


class ScenarioMismatch(ValueError):
    """Evaluator called with an eavesdropper layout of another scenario."""
