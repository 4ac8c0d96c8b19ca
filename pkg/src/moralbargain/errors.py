"""Exception types shared across the package."""


class MoralBargainError(Exception):
    """Base class for package errors."""


class ValidationError(MoralBargainError, ValueError):
    """Bad inputs: out-of-range parameters, malformed files, schema violations."""


class DomainError(ValidationError):
    """Evaluation outside a function's domain (e.g. negative monetary payoff)."""


class IndeterminateError(MoralBargainError):
    """A quantity is not pinned down by the model at the requested parameters."""


class ConvergenceError(MoralBargainError, RuntimeError):
    """A numeric routine failed to reach its required tolerance."""
