"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """Input lies outside the region where a formula or envelope is valid."""


class BracketError(ValueError):
    """The requested level is not attained inside the supplied bracket."""


class NoRootError(RuntimeError):
    """The tilted-mean equation has no admissible root in the searchable range."""


class ConvergenceError(RuntimeError):
    """An iterative limit evaluation failed to stabilize."""


class ModelError(ValueError):
    """Invalid model parameters (e.g. traffic intensity at or above 1)."""


class CycleOverflow(RuntimeError):
    """A single regeneration cycle exceeded the event budget."""


class BudgetError(RuntimeError):
    """Projected simulation cost exceeds the configured cap."""
