"""Exception types shared across the package."""


class RankDeficientError(ValueError):
    """Least-squares system matrix is (numerically) rank deficient."""


class NotSymmetricError(ValueError):
    """Matrix expected to be symmetric is not, within tolerance."""


class NotOrthonormalError(ValueError):
    """Matrix expected to have orthonormal columns does not, within tolerance."""


class ConvergenceError(RuntimeError):
    """An iterative numerical routine (eigensolver, SVD) failed to converge."""


class DomainError(ValueError):
    """Closed-form evaluator called outside its mathematical domain."""


class ParseError(ValueError):
    """CSV ingestion failure, carrying the offending 1-based line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
