"""Class-number facts: Minkowski-bound principality certification, class
numbers of imaginary quadratic fields via reduced binary quadratic forms, and
minimal-height generators of principal fractional ideals.

For imaginary fields the boolean Minkowski check and the reduced-form count
are computed independently and cross-checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import gmpy2
from gmpy2 import mpfr

from sympy import primerange

from .errors import DomainError, NotPrincipalError, UnsupportedFieldError
from .ideals import (
    FractionalIdealRatio,
    Ideal,
    IntegralIdeal,
    RationalIdeal,
    prime_split,
)
from .qfield import Field, FieldElement, weil_height
from .realnum import Comparison, LogExpr, certified_ceil_ratio, certified_floor_ratio
from .units import (
    _torsion_normalize,
    fundamental_unit,
    norm_form_solutions,
    unit_group,
)


@dataclass(frozen=True)
class ClassInfo:
    field: Field
    minkowski_bound: Fraction
    class_number_one: bool
    class_number: Optional[int] = None
    nonprincipal_witness: Optional[IntegralIdeal] = None

    def __post_init__(self):
        if self.class_number is not None:
            if (self.class_number == 1) != self.class_number_one:
                raise DomainError("class number inconsistent with principality check")


def minkowski_bound(field: Field) -> Fraction:
    """A rational upper bound for the Minkowski constant of the field."""
    if field.is_rational:
        return Fraction(1)
    disc = abs(field.discriminant)
    with gmpy2.context(precision=64, round=gmpy2.RoundUp):
        root = gmpy2.sqrt(mpfr(disc))
        if field.is_real:
            bound = root / 2
        else:
            bound = 2 * root / gmpy2.const_pi()
    n, d = bound.as_integer_ratio()
    return Fraction(int(n), int(d))


def is_principal(ideal: Ideal) -> Optional[FieldElement]:
    """A generator of the ideal, or None (certified by exhausting the
    unit-reduced coefficient region for elements of matching norm)."""
    if isinstance(ideal, RationalIdeal):
        return ideal.field.element(ideal.g)
    field = ideal.field
    if ideal.is_unit_ideal:
        return field.one
    for g in norm_form_solutions(field, ideal.norm):
        # membership is unit-invariant, so the normalized representative decides
        if ideal.contains_element(g):
            return g
    return None


def class_number_one(field: Field) -> bool:
    return class_info(field).class_number_one


def class_number(field: Field) -> int:
    """Class number via reduced primitive forms; imaginary quadratic only."""
    if field.is_rational:
        return 1
    if field.is_real:
        raise UnsupportedFieldError(
            "class numbers beyond the boolean check are only computed for d < 0"
        )
    disc = field.discriminant  # fundamental, < 0
    count = 0
    b = disc % 2
    while 3 * b * b <= -disc:
        m4 = b * b - disc
        m = m4 // 4
        for a in range(max(b, 1), math.isqrt(m) + 1):
            if m % a:
                continue
            c = m // a
            if math.gcd(a, b, c) != 1:
                continue
            count += 1 if (b == 0 or a == b or a == c) else 2
        b += 2
    return count


@lru_cache(maxsize=None)
def class_info(field: Field) -> ClassInfo:
    bound = minkowski_bound(field)
    if field.is_rational:
        return ClassInfo(field, bound, True, 1)
    witness = None
    limit = math.floor(bound)
    for p in primerange(2, limit + 1):
        for prime in prime_split(field, p):
            if prime.split_type == "inert":
                continue
            if is_principal(prime.ideal) is None:
                witness = prime.ideal
                break
        if witness is not None:
            break
    one = witness is None
    number = None
    if not field.is_real:
        number = class_number(field)
        if (number == 1) != one:
            raise DomainError(
                f"form count {number} disagrees with Minkowski principality for d={field.d}"
            )
    elif one:
        number = 1
    return ClassInfo(field, bound, one, number, witness)


def minimal_height_generator(ratio: FractionalIdealRatio) -> FieldElement:
    """Generator of the principal fractional ideal with minimal Weil height.

    Rank 0: any generator (heights agree), torsion-normalized.  Rank 1: the
    height is convex in the unit exponent; the argmin candidates come from the
    two breakpoints and the result is certified against its neighbors.
    """
    field = ratio.field
    g_num = is_principal(ratio.numerator)
    g_den = is_principal(ratio.denominator)
    if g_num is None or g_den is None:
        raise NotPrincipalError(f"ratio {ratio} is not a ratio of principal ideals")
    g = g_num / g_den
    if field.is_rational:
        return field.from_fraction(abs(g.rational_value()))
    if not field.is_real:
        return _torsion_normalize(g)
    if unit_group(field).rank != 1:
        raise UnsupportedFieldError("generator search requires rank <= 1")
    if g.is_unit:
        return field.one
    eps = fundamental_unit(field)
    e = LogExpr.log(eps.embedding_surd(0))
    s1, s2 = g.arch_abs_surds()
    a, b = LogExpr.log(s1), LogExpr.log(s2)
    cands: set[int] = set()
    for low, high in ((certified_floor_ratio(-a, e), certified_ceil_ratio(-a, e)),
                      (certified_floor_ratio(b, e), certified_ceil_ratio(b, e))):
        cands.update((low - 1, low, high, high + 1))
    best_ell, best_h = None, None
    for ell in sorted(cands, key=lambda l: (abs(l), -l)):
        h = weil_height(g * eps**ell)
        if best_h is None or h.compare(best_h) is Comparison.LESS:
            best_ell, best_h = ell, h
    for ell in (best_ell - 1, best_ell + 1):
        if weil_height(g * eps**ell).compare(best_h) is Comparison.LESS:
            raise DomainError("height minimum failed its neighbor certification")
    out = g * eps**best_ell
    return out if out.embedding_surd(0).sign() > 0 else -out
