"""Exception and warning classes shared across the package."""


class HMLError(Exception):
    """Base class for all errors raised by :mod:`hml`."""


class ConfigurationError(HMLError, ValueError):
    """Missing or inconsistent input parameters."""

    def __init__(self, message, path=None):
        super().__init__(message if path is None else f"{path}: {message}")
        self.path = path


class PhysicsDomainError(HMLError, ValueError):
    """Inputs outside the physical validity range of a formula."""


class ConvergenceError(HMLError, RuntimeError):
    """A numerical procedure failed to reach its tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class ValidityWarning(UserWarning):
    """An approximation is used outside its stated validity regime."""
