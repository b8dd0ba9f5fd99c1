"""Exact arithmetic, balancedness and t-metric Mahler measures for quadratic
number fields, with a FastAPI service and a thin CLI client."""

from .errors import (
    DomainError,
    FieldMismatchError,
    GuardExceededError,
    InconsistentFactorizationError,
    IndeterminateComparisonError,
    NotPrincipalError,
    QmahlerError,
    UnsupportedFieldError,
)
from .qfield import (
    QQ,
    FieldElement,
    HeightValue,
    QuadField,
    RationalField,
    field_for_spec,
    mahler_measure_over,
    parse_element,
    quad_field,
    weil_height,
)

__version__ = "0.1.0"

__all__ = [
    "QQ",
    "DomainError",
    "FieldElement",
    "FieldMismatchError",
    "GuardExceededError",
    "HeightValue",
    "InconsistentFactorizationError",
    "IndeterminateComparisonError",
    "NotPrincipalError",
    "QmahlerError",
    "QuadField",
    "RationalField",
    "UnsupportedFieldError",
    "field_for_spec",
    "mahler_measure_over",
    "parse_element",
    "quad_field",
    "weil_height",
    "__version__",
]
