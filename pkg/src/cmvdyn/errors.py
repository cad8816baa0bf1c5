"""Exception hierarchy shared across the package."""


class CmvdynError(Exception):
    """Base class for all package-specific errors."""


class CoefficientDomainError(CmvdynError, ValueError):
    """A Verblunsky coefficient or similar parameter lies outside its domain."""


class MissingCoefficientError(CmvdynError, LookupError):
    """A required coefficient (Verblunsky entry or coin) is not available."""


class WindowAlignmentError(CmvdynError, ValueError):
    """A lattice window is misaligned or incompatible with the band pattern."""


class TruncationError(CmvdynError):
    """A finitely supported state touched a window edge and the operator
    cannot be extended."""


class ResourceBudgetError(CmvdynError):
    """A computation would exceed its memory or length budget.

    ``admissible`` carries the largest feasible value of the offending
    parameter when one can be reported.
    """

    def __init__(self, message, admissible=None):
        super().__init__(message)
        self.admissible = admissible


class NumericalError(CmvdynError):
    """A numerical subroutine (eigensolver, linear solve, fit) failed or
    produced data inconsistent with its contract."""


class GaugeDegenerateError(CmvdynError, ValueError):
    """The CGMV phase extraction is undefined for a coin with a vanishing
    diagonal entry (or a unimodular off-diagonal entry)."""


class CapabilityError(CmvdynError):
    """An input object lacks optional data required by the operation
    (e.g. a discrete measure without stored eigenvectors)."""
