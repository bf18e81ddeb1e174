"""Exception hierarchy.

Domain errors (bad inputs, out-of-range parameters) map to CLI exit code 1;
budget errors (memory, enumeration, search) map to exit code 2.
"""


class DomainError(ValueError):
    """An input lies outside the domain where an operation is defined."""


class RangeBoundError(DomainError):
    """Coefficients or N exceed the limits that keep lattice coordinates in 64 bits."""


class DivergenceError(DomainError):
    """A series used by the exponent calculus does not converge."""


class PoleError(DivergenceError):
    """The closed-form series sums have a pole (or lie past it) at this p."""


class BudgetError(RuntimeError):
    """A pre-flight estimate or explicit budget was exceeded."""


class MemoryBudgetError(BudgetError):
    pass


class EnumerationBudgetError(BudgetError):
    pass


class SearchBudgetExceeded(BudgetError):
    """The witness search ran out of budget before finishing: inconclusive."""
