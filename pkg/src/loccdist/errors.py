"""Exception types shared across the package."""


class LoccdistError(Exception):
    """Base class for all package-specific errors."""


class ParseError(LoccdistError):
    """Input file is malformed or structurally invalid."""


class DimensionMismatch(LoccdistError):
    """Vector/matrix shapes or declared dimensions are inconsistent."""


class NotOrthonormal(LoccdistError):
    """A state family fails the orthonormality check.

    ``pair`` holds the indices of the worst offending Gram entry and
    ``overlap`` its magnitude.
    """

    def __init__(self, message, pair=None, overlap=None):
        super().__init__(message)
        self.pair = pair
        self.overlap = overlap


class NotHermitian(LoccdistError):
    """Matrix is not Hermitian within tolerance."""


class NoConvergence(LoccdistError):
    """An iterative linear-algebra routine failed to converge."""


class ShapeMismatch(LoccdistError):
    """Two operands do not share a common shape."""


class NotUnit(LoccdistError):
    """Vector is not normalized within tolerance."""


class PreconditionViolated(LoccdistError):
    """A documented precondition of an operation does not hold."""


class TargetOutsideRange(LoccdistError):
    """Requested target lies outside the 2x2 numerical range."""


class BasisNotVerified(LoccdistError):
    """A distinguishing basis failed verification during compilation."""


class SearchFailed(LoccdistError):
    """Zero-vector search missed its residual target within budget.

    Existence of a zero vector is guaranteed by convexity of the joint
    numerical range, so hitting this means a numerical defect rather than
    a genuinely infeasible instance. The best candidate is attached for
    diagnosis.
    """

    def __init__(self, message, best_vector=None, best_residual=None,
                 partial_basis=None):
        super().__init__(message)
        self.best_vector = best_vector
        self.best_residual = best_residual
        self.partial_basis = partial_basis
