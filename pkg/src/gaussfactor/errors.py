"""Exception types shared by every module."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ResourceError(RuntimeError):
    """A computation would exceed its configured work budget."""


class ConvergenceError(RuntimeError):
    """A numerical integration failed to reach its tolerance."""
