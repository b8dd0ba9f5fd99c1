"""Unit groups of quadratic fields and the balancedness machinery.

The fundamental unit comes from the continued-fraction expansion of the
reduced quadratic irrational attached to the ring of integers; balancing
windows are the integer intervals of unit exponents that lift all archimedean
absolute values of an algebraic integer above 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .errors import DomainError, IndeterminateComparisonError, GuardExceededError
from .qfield import Field, FieldElement, QuadField
from .realnum import (
    Comparison,
    LogExpr,
    Surd,
    certified_ceil_ratio,
    certified_floor_ratio,
    compare_adaptive,
)

# box-enumeration guard for balance decisions on fields with huge fundamental units
_BALANCE_WORK_CAP = 10**7


@dataclass(frozen=True)
class UnitGroup:
    """O_K^x: torsion order, rank, and a fundamental unit when rank = 1."""

    field: Field
    torsion_order: int
    rank: int
    fundamental_unit: Optional[FieldElement]

    def torsion(self) -> list[FieldElement]:
        return roots_of_unity(self.field)


@dataclass(frozen=True)
class BalanceVerdict:
    balanced: bool
    criterion_holds: bool
    witness: Optional[FieldElement] = None
    detail: dict = dc_field(default_factory=dict)


def roots_of_unity(field: Field) -> list[FieldElement]:
    """All torsion units; w = 4 for d = -1, w = 6 for d = -3, else {1, -1}."""
    one = field.one
    if not field.is_rational and field.d == -1:
        i = field.omega
        return [one, i, -one, -i]
    if not field.is_rational and field.d == -3:
        zeta = field.omega  # (1+sqrt(-3))/2, a primitive sixth root of unity
        return [zeta**k for k in range(6)]
    return [one, -one]


@lru_cache(maxsize=None)
def fundamental_unit(field: QuadField) -> FieldElement:
    """Generator of O_K^x modulo torsion with sigma1(eps) > 1, by the
    continued-fraction expansion of the reduced irrational omega + m."""
    if not field.is_real:
        raise DomainError("fundamental unit requires a real quadratic field")
    d = field.d
    # omega = (P0 + sqrt(d)) / Q0
    if field.omega_is_half:
        p0, q0 = 1, 2
        shift = (math.isqrt(d) - 1) // 2
    else:
        p0, q0 = 0, 1
        shift = math.isqrt(d)
    # alpha = omega + shift is reduced: alpha > 1 and -1 < conj(alpha) < 0
    P, Q = p0 + shift * q0, q0
    start = (P, Q)
    root = math.isqrt(d)
    q_prev, q_cur = 1, 0  # q_{-2}, q_{-1}
    while True:
        a = (P + root) // Q
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        P = a * Q - P
        Q = (d - P * P) // Q
        if (P, Q) == start:
            break
    # eps = q_{l-1} * alpha + q_{l-2} = (q_cur*shift + q_prev) + q_cur*omega
    eps = field.element(q_cur * shift + q_prev, q_cur)
    if abs(eps.norm()) != 1:
        raise DomainError("continued fraction did not produce a unit")
    s = eps.embedding_surd(0)
    if s.compare_rational(1) <= 0:
        raise DomainError("fundamental unit candidate is not > 1")
    return eps


@lru_cache(maxsize=None)
def unit_group(field: Field) -> UnitGroup:
    if field.is_rational:
        return UnitGroup(field, 2, 0, None)
    if field.is_real:
        return UnitGroup(field, 2, 1, fundamental_unit(field))
    w = 4 if field.d == -1 else 6 if field.d == -3 else 2
    return UnitGroup(field, w, 0, None)


def _approx_log_abs(s: Surd) -> float:
    """Rough log|s|, safe for coordinates far beyond float range."""

    def log_frac(f: Fraction) -> float:
        return (f.numerator.bit_length() - f.denominator.bit_length()) * math.log(2)

    parts = []
    if s.a:
        parts.append(log_frac(abs(s.a)))
    if s.b:
        parts.append(log_frac(abs(s.b)) + 0.5 * math.log(s.d))
    return max(parts) if parts else float("-inf")


def unit_decompose(x: FieldElement) -> Optional[tuple[FieldElement, int]]:
    """x = zeta * eps**m with torsion zeta; None when x is not a unit."""
    if x.is_zero or not x.is_unit:
        return None
    ug = unit_group(x.field)
    if ug.rank == 0:
        return (x, 0)
    eps = ug.fundamental_unit
    log_eps = _approx_log_abs(eps.embedding_surd(0))
    m = round(_approx_log_abs(x.embedding_surd(0)) / log_eps)
    y = x * eps**-m
    # adjust so that |sigma1(y)| is exactly 1 (y torsion); the first guess can
    # be off by ~2|m| when conjugate cancellation hides the true magnitude
    for _ in range(4 * abs(m) + 64):
        sy = y.embedding_surd(0)
        mag = sy * sy  # sigma1(y)^2 compares exactly against 1
        c = mag.compare_rational(1)
        if c == 0:
            break
        if c > 0:
            y, m = y * eps.inverse(), m + 1
        else:
            y, m = y * eps, m - 1
    else:
        raise DomainError("unit exponent search did not converge")
    if y not in roots_of_unity(x.field):
        return None
    return (y, m)


def arch_log_norms(x: FieldElement) -> list[LogExpr]:
    """log ||sigma_i(x)|| as lazy expressions (real quadratic fields)."""
    return [LogExpr.log(s) for s in x.arch_abs_surds()]


@dataclass(frozen=True)
class Window:
    """Integer interval [lo, hi] of balancing unit exponents; empty when lo > hi."""

    lo: int
    hi: int

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi

    def __contains__(self, ell: int) -> bool:
        return self.lo <= ell <= self.hi

    def __iter__(self):
        return iter(range(self.lo, self.hi + 1))


def balancing_window(x: FieldElement, eps: Optional[FieldElement] = None) -> Window:
    """Exponents l with |eps**l * x|_v >= 1 at both archimedean places.

    Requires a rank-1 field and integral x != 0.  Endpoint ties (an absolute
    value exactly 1) can only happen for unit x, which is resolved exactly.
    """
    field = x.field
    if field.is_rational or not field.is_real:
        raise DomainError("balancing windows require a real quadratic field")
    if x.is_zero:
        raise DomainError("window of zero")
    if not x.is_integral:
        raise DomainError("window inputs must be algebraic integers")
    if eps is None:
        eps = fundamental_unit(field)
    dec = unit_decompose(x)
    if dec is not None:
        _, m = dec
        return Window(-m, -m)
    s1, s2 = x.arch_abs_surds()
    e = LogExpr.log(eps.embedding_surd(0))
    lo = certified_ceil_ratio(-LogExpr.log(s1), e)
    hi = certified_floor_ratio(LogExpr.log(s2), e)
    return Window(lo, hi)


def min_nonunit_norm(field: Field) -> int:
    """Smallest |Norm(y)| >= 2 over non-units y in O_K; always <= 4 (y = 2)."""
    if field.is_rational:
        return 2
    for n in (2, 3):
        if norm_form_solutions(field, n):
            return n
    return 4


def norm_form_solutions(field: QuadField, n: int) -> list[FieldElement]:
    """Integral elements with |Norm| = n, up to units and sign.

    Solutions are found by a bounded coefficient search (quadratic formula in
    the 1-coordinate for each omega-coordinate) and canonically normalized.
    """
    if n <= 0:
        raise DomainError("norm target must be positive")
    t, nw = field.omega_trace, field.omega_norm
    disc = field.discriminant
    sols: set[FieldElement] = set()
    if not field.is_real:
        # positive definite: N(u + v*omega) = ((2u + tv)^2 + |disc| v^2) / 4
        vmax = math.isqrt(4 * n // abs(disc))
        for v in range(-vmax, vmax + 1):
            delta = 4 * n - abs(disc) * v * v
            if delta < 0:
                continue
            r = math.isqrt(delta)
            if r * r != delta:
                continue
            for sgn in ((1, -1) if r else (1,)):
                num = sgn * r - t * v
                if num % 2 == 0:
                    sols.add(_torsion_normalize(field.element(num // 2, v)))
        return sorted(sols, key=lambda z: (z.p, z.q))
    eps = fundamental_unit(field)
    try:
        s_eps = float(eps.embedding_surd(0))
        if math.isinf(s_eps):
            raise OverflowError
    except OverflowError:
        raise GuardExceededError(
            f"norm-form search too large for d = {field.d}: huge fundamental unit"
        ) from None
    # normalized region: sigma1(x)^2 in [n, n * s_eps^2), so |sigma_i| <= s_bound
    s_bound = math.sqrt(n) * s_eps + 1
    vmax = int(2 * s_bound / math.sqrt(field.d)) + 2
    if vmax * 4 > _BALANCE_WORK_CAP:
        raise GuardExceededError(
            f"norm-form search too large for d = {field.d} (fundamental unit {eps})"
        )
    for v in range(-vmax, vmax + 1):
        for target in (n, -n):
            # u^2 + t u v + nw v^2 = target  =>  (2u + tv)^2 = disc*v^2 + 4*target
            delta = disc * v * v + 4 * target
            if delta < 0:
                continue
            r = math.isqrt(delta)
            if r * r != delta:
                continue
            for sgn in ((1, -1) if r else (1,)):
                num = sgn * r - t * v
                if num % 2 == 0:
                    x = field.element(num // 2, v)
                    if not x.is_zero and abs(x.norm()) == n:
                        sols.add(_unit_normalize(x, eps, n))
    return sorted(sols, key=lambda z: (z.p, z.q))


def _torsion_normalize(x: FieldElement) -> FieldElement:
    """Canonical associate modulo roots of unity (imaginary quadratic / Q)."""
    best = None
    for zeta in roots_of_unity(x.field):
        y = x * zeta
        key = (y.trace(), Fraction(y.q, y.den))
        if best is None or key > best[0]:
            best = (key, y)
    return best[1]


def _unit_normalize(x: FieldElement, eps: FieldElement, n: int) -> FieldElement:
    """Canonical representative of x modulo <eps, -1>: sigma1 > 0 and
    sigma1(x)^2 in [n, n*sigma1(eps)^2)."""
    se2 = eps.embedding_surd(0)
    se2 = se2 * se2
    log_s1 = _approx_log_abs(x.embedding_surd(0))
    jump = math.floor((2 * log_s1 - math.log(n)) / _approx_log_abs(se2))
    y = x * eps ** (-jump)
    for _ in range(4 * abs(jump) + 64):
        s2 = y.embedding_surd(0)
        s2 = s2 * s2
        if s2.compare_rational(Fraction(n)) < 0:
            y = y * eps
        elif (s2 * se2.inverse()).compare_rational(Fraction(n)) >= 0:
            y = y * eps.inverse()
        else:
            break
    else:
        raise DomainError("unit normalization did not converge")
    if y.embedding_surd(0).sign() < 0:
        y = -y
    return y


def prelim_balanced_criterion(field: QuadField) -> bool:
    """Sufficient condition for balancedness: h(eps) > 0 and
    [K:Q] h(eps) <= log min_nonunit_norm (proof form of the rank-1 lemma)."""
    if not field.is_real:
        raise DomainError("criterion applies to rank-1 fields")
    eps = fundamental_unit(field)
    s = eps.embedding_surd(0)  # sigma1(eps) > 1, so h(eps) > 0 automatically
    m = min_nonunit_norm(field)
    return s.compare_rational(m) <= 0


def criterion_detail(field: QuadField) -> dict:
    """Both readings of the criterion's lower bound, for reporting."""
    eps = fundamental_unit(field)
    s = eps.embedding_surd(0)
    m = min_nonunit_norm(field)
    try:
        strict = (
            compare_adaptive(LogExpr.log(s), LogExpr.constant(1))
            is Comparison.GREATER
        )
    except IndeterminateComparisonError:
        strict = False
    return {
        "min_nonunit_norm": m,
        "upper_bound_holds": s.compare_rational(m) <= 0,
        "strict_lower_bound_holds": strict,
        "criterion_holds": s.compare_rational(m) <= 0,
    }


def is_field_balanced(field: Field) -> BalanceVerdict:
    """Decide balancedness, with a witness when the field is unbalanced."""
    if field.is_rational or not field.is_real:
        # single archimedean place: the product formula forces |x|_w >= 1
        return BalanceVerdict(
            balanced=True,
            criterion_holds=False,
            witness=None,
            detail={"basis": "single archimedean place"},
        )
    detail = criterion_detail(field)
    if detail["criterion_holds"]:
        detail["basis"] = "rank-1 sufficient criterion"
        return BalanceVerdict(balanced=True, criterion_holds=True, detail=detail)
    witness = _unbalanced_witness(field)
    if witness is not None:
        detail["basis"] = f"witness of norm {witness.norm()} with empty window"
        return BalanceVerdict(
            balanced=False, criterion_holds=False, witness=witness, detail=detail
        )
    detail["basis"] = "exhaustive window check below the unit bound"
    return BalanceVerdict(balanced=True, criterion_holds=False, detail=detail)


def _unbalanced_witness(field: QuadField) -> Optional[FieldElement]:
    """Search the unit-normalized region directly for an empty-window element.

    Every x with an empty window has an associate y with ||sigma1(y)|| in
    [1, sigma1(eps)) and ||sigma2(y)|| < 1 (then ceil = 0 > floor <= -1), and
    such a y has |sigma2| < 1 <= |sigma1|, so its omega-coordinate v pins the
    1-coordinate u to an interval of length 2: an O(sigma1(eps)) scan.
    """
    eps = fundamental_unit(field)
    s_eps = eps.embedding_surd(0)
    try:
        s_eps_f = float(s_eps)
        if math.isinf(s_eps_f):
            raise OverflowError
    except OverflowError:
        raise GuardExceededError(
            f"balance search too large for d = {field.d}: huge fundamental unit"
        ) from None
    d = field.d
    omega2 = (1 - math.sqrt(d)) / 2 if field.omega_is_half else -math.sqrt(d)
    vmax = int((s_eps_f + 2) / math.sqrt(d)) + 2
    if vmax > _BALANCE_WORK_CAP:
        raise GuardExceededError(
            f"balance search too large for d = {d} (fundamental unit {eps})"
        )
    for v in range(-vmax, vmax + 1):
        center = -v * omega2
        for u in range(math.floor(center - 1) - 1, math.ceil(center + 1) + 2):
            x = field.element(u, v)
            if x.is_zero or abs(x.norm()) < 2:
                continue
            s1, s2 = x.arch_abs_surds()
            if s2.compare_rational(1) >= 0:
                continue
            if s1.compare_rational(1) < 0 or (s1 - s_eps).sign() >= 0:
                continue
            return x if x.embedding_surd(0).sign() > 0 else -x
    return None
