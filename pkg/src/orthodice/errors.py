"""Exception types raised by orthodice.

Every domain error derives from :class:`OrthoDiceError`; the CLI maps these to
exit code 1 and prints the class name on stderr.
"""


class OrthoDiceError(ValueError):
    """Base class for domain errors."""


class IndexNotInI(OrthoDiceError):
    """Canonical index is not a positive integer coprime to 3."""


class InvalidSideCount(OrthoDiceError):
    """Side count is below 5 or shares a factor with 6."""


class InvalidSupport(OrthoDiceError):
    """Support pair violates 0 <= m <= n, or is (0, 0)."""


class DomainTooSmall(OrthoDiceError):
    """Closed form requested outside its domain of validity."""


class SupportTooLarge(OrthoDiceError):
    """Exact pmf requested for a support above the configured cap."""


class InvalidThinning(OrthoDiceError):
    """Thinning parameter outside (0, 1]."""


class InvalidPartition(OrthoDiceError):
    """Suit counts do not form a valid partition of the hand."""


class DegenerateMomentMatrix(OrthoDiceError):
    """Hankel moment matrix is not positive definite at the requested order."""


class TimeOutOfRange(OrthoDiceError):
    """Evaluation time lies outside [0, T]."""


class SingularEvaluationPoint(OrthoDiceError):
    """Potential evaluated inside the mass support without softening."""
