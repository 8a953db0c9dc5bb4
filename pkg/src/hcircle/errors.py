"""Exception hierarchy shared across the package.

Validation errors signal bad inputs or violated preconditions (CLI exit
code 2); numeric errors signal a computation that could not be completed
to contract (CLI exit code 3).
"""


class ValidationError(ValueError):
    """Input rejected: precondition or invariant violated at construction."""


class NumericError(RuntimeError):
    """A numeric routine failed to meet its contract."""


class NonConvergenceError(NumericError):
    """Series or iteration hit its term/iteration cap before converging."""


class PoleError(NumericError):
    """Evaluation requested at (or too close to) a pole."""


class BudgetExceededError(NumericError):
    """Enumeration or quadrature exceeded its configured work budget."""


class DedupCollisionError(NumericError):
    """Two floating group elements too close to separate, too far to merge."""


class CoverageError(NumericError):
    """A supplied table does not cover the range the computation needs."""


class MomentConditionError(NumericError):
    """Test function fails the vanishing u^{-1/2}-moment requirement."""
