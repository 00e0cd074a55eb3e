"""Exceptions raised by the hydrolfc package."""


class DomainError(ValueError):
    """Raised when an operation is given values outside its domain."""


class ScenarioError(ValueError):
    """Raised for malformed scenario configurations."""


class DivergenceError(RuntimeError):
    """Raised when a closed-loop run leaves the configured frequency bound."""

    def __init__(self, message, artifacts=None):
        super().__init__(message)
        self.artifacts = artifacts
