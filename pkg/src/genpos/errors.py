"""Exception taxonomy shared by all modules.

The CLI maps these onto stable exit codes: precondition/parse failures
exit 2, geometric degeneracies exit 3, perturbation retry exhaustion
exit 4, verification disagreement exit 1.
"""


class GenposError(Exception):
    """Base class for all library errors."""


class PreconditionError(GenposError, ValueError):
    """An operation was called outside its contract (exit code 2)."""


class AmbientMismatchError(PreconditionError):
    """Operands live in different ambient dimensions."""


class EmptyFlatError(PreconditionError):
    """An operation requires a nonempty affine flat."""


class NotSkewError(PreconditionError):
    """Flats or carrier lines that must be pairwise skew are not."""


class NotDisjointError(PreconditionError):
    """Subspaces that must intersect only at the origin do not."""


class NotContainedError(PreconditionError):
    """A subspace is not contained in the direct sum it must lie in."""


class InfeasibleStratumError(PreconditionError):
    """Integer parameters violate the stratum feasibility inequalities."""


class CaseHypothesisError(PreconditionError):
    """A perturbation case was requested with hypotheses that do not hold."""


class DegeneracyError(GenposError, RuntimeError):
    """Numerically degenerate geometric configuration (exit code 3)."""


class DegenerateSystemError(DegeneracyError):
    """The quadric coefficient system has nullspace dimension != 1."""


class DegeneratePointError(DegeneracyError):
    """No two distinct real ruling directions exist at the point."""


class InfiniteFamilyError(DegeneracyError):
    """A whole one-parameter family of solutions exists; the count is not finite."""


class IndeterminateRankError(DegeneracyError):
    """A rank decision is unstable under tolerance perturbation."""


class RetryBudgetError(GenposError, RuntimeError):
    """Perturbation retries were exhausted without satisfying the predicates (exit code 4)."""
