"""Exception types shared across the package."""


class QmahlerError(Exception):
    """Base class for all package errors."""


class DomainError(QmahlerError, ValueError):
    """Mathematically invalid input (zero divisor, wrong field, bad argument)."""


class FieldMismatchError(DomainError):
    """Operands belong to different fields."""


class UnsupportedFieldError(DomainError):
    """Field outside the supported scope of an operation."""


class InconsistentFactorizationError(DomainError):
    """Input factorization data violates the required ideal identity."""


class NotPrincipalError(DomainError):
    """An ideal required to be principal is not."""


class GuardExceededError(DomainError):
    """A tractability guard (size bound) was exceeded."""


class IndeterminateComparisonError(QmahlerError, ArithmeticError):
    """A certified comparison could not be decided at maximum precision."""
