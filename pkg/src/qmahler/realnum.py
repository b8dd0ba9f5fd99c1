"""Adaptive-precision certified real arithmetic for log comparisons.

Values are rational linear combinations of logarithms of positive real
algebraic numbers (rationals or quadratic surds a + b*sqrt(d)), plus a
rational constant.  Evaluation produces enclosing intervals with exact dyadic
endpoints via MPFR directed rounding; comparisons refine precision adaptively
and use an exact multiplicative cancellation test so that equal values are
certified as ties at any tolerance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import gmpy2
from gmpy2 import mpfr, mpq

from .errors import DomainError, IndeterminateComparisonError

DEFAULT_PRECISION_BITS = 128
MAX_PRECISION_BITS = 4096
DEFAULT_TIE_TOLERANCE = Fraction(1, 10**12)

# exact-cancellation test gives up beyond this many result bits
_EXACT_PRODUCT_BIT_CAP = 1 << 16

Rat = Union[int, Fraction]


def _down(bits: int):
    return gmpy2.context(precision=bits, round=gmpy2.RoundDown)


def _up(bits: int):
    return gmpy2.context(precision=bits, round=gmpy2.RoundUp)


def _frac(x: mpfr) -> Fraction:
    n, d = x.as_integer_ratio()
    return Fraction(int(n), int(d))


def _dyadic(x: Fraction, bits: int, round_up: bool) -> Fraction:
    """Round x outward to a dyadic rational with 2**-bits resolution."""
    if x.denominator & (x.denominator - 1) == 0:
        return x
    scaled = x * (1 << bits)
    n = -((-scaled.numerator) // scaled.denominator) if round_up else scaled.numerator // scaled.denominator
    return Fraction(n, 1 << bits)


@dataclass(frozen=True)
class Surd:
    """Exact real number a + b*sqrt(d), rational a, b; d >= 0 squarefree (d=0: rational)."""

    a: Fraction
    b: Fraction
    d: int

    @staticmethod
    def rational(x: Rat) -> "Surd":
        return Surd(Fraction(x), Fraction(0), 0)

    def __post_init__(self):
        if self.d < 0:
            raise DomainError("Surd must be real (d >= 0)")
        if self.d == 0 and self.b != 0:
            raise DomainError("d = 0 surd must be rational")
        if not isinstance(self.a, Fraction):
            object.__setattr__(self, "a", Fraction(self.a))
        if not isinstance(self.b, Fraction):
            object.__setattr__(self, "b", Fraction(self.b))
        if self.d == 1:  # sqrt(1) = 1 folds into the rational part
            object.__setattr__(self, "a", self.a + self.b)
            object.__setattr__(self, "b", Fraction(0))
            object.__setattr__(self, "d", 0)
        if self.b == 0 and self.d != 0:
            object.__setattr__(self, "d", 0)

    @property
    def is_rational(self) -> bool:
        return self.b == 0 or self.d == 0

    def rational_value(self) -> Fraction:
        if not self.is_rational:
            raise DomainError("not a rational value")
        return self.a

    def conjugate(self) -> "Surd":
        return Surd(self.a, -self.b, self.d)

    def compare_rational(self, r: Rat) -> int:
        """Exact sign of self - r."""
        return Surd(self.a - Fraction(r), self.b, self.d).sign()

    def __add__(self, other: "Surd") -> "Surd":
        if self.is_rational:
            return Surd(self.a + other.a, other.b, other.d)
        if other.is_rational:
            return Surd(self.a + other.a, self.b, self.d)
        if self.d != other.d:
            raise DomainError("cannot add surds over different radicands")
        return Surd(self.a + other.a, self.b + other.b, self.d)

    def __sub__(self, other: "Surd") -> "Surd":
        return self + Surd(-other.a, -other.b, other.d)

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(d)."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a**2 against b**2 d
        n = a * a - b * b * self.d
        if n == 0:
            return 0
        big_is_a = n > 0
        return (1 if a > 0 else -1) if big_is_a else (1 if b > 0 else -1)

    def __mul__(self, other: "Surd") -> "Surd":
        if self.is_rational:
            return Surd(self.a * other.a, self.a * other.b, other.d)
        if other.is_rational:
            return Surd(self.a * other.a, self.b * other.a, self.d)
        if self.d != other.d:
            raise DomainError("cannot multiply surds over different radicands")
        return Surd(
            self.a * other.a + self.b * other.b * self.d,
            self.a * other.b + self.b * other.a,
            self.d,
        )

    def inverse(self) -> "Surd":
        if self.is_rational:
            if self.a == 0:
                raise ZeroDivisionError("surd inverse of 0")
            return Surd.rational(1 / self.a)
        n = self.a * self.a - self.b * self.b * self.d
        if n == 0:
            raise ZeroDivisionError("surd inverse of 0")
        return Surd(self.a / n, -self.b / n, self.d)

    def __pow__(self, k: int) -> "Surd":
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        out = Surd.rational(1)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def bit_size(self) -> int:
        return sum(
            x.numerator.bit_length() + x.denominator.bit_length() for x in (self.a, self.b)
        )

    def __float__(self) -> float:
        def to_float(f: Fraction) -> float:
            try:
                return float(f)
            except OverflowError:
                return math.inf if f > 0 else -math.inf

        return to_float(self.a) + to_float(self.b) * math.sqrt(self.d)

    def __str__(self) -> str:
        if self.is_rational:
            return str(self.a)
        return f"{self.a}+{self.b}*sqrt({self.d})"


@dataclass(frozen=True)
class RealInterval:
    """Enclosure [lo, hi] with exact dyadic endpoints."""

    lo: Fraction
    hi: Fraction
    precision_bits: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise DomainError("interval with lo > hi")

    @staticmethod
    def of(lo: Rat, hi: Rat, bits: int = DEFAULT_PRECISION_BITS) -> "RealInterval":
        lo, hi = Fraction(lo), Fraction(hi)
        return RealInterval(_dyadic(lo, bits + 8, False), _dyadic(hi, bits + 8, True), bits)

    @staticmethod
    def exact(x: Rat, bits: int = DEFAULT_PRECISION_BITS) -> "RealInterval":
        return RealInterval.of(x, x, bits)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __float__(self) -> float:
        return float(self.midpoint)

    def contains(self, x: Rat) -> bool:
        return self.lo <= x <= self.hi

    def intersects(self, other: "RealInterval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def is_positive(self) -> bool:
        return self.lo > 0

    def is_negative(self) -> bool:
        return self.hi < 0

    def __add__(self, other: "RealInterval") -> "RealInterval":
        bits = min(self.precision_bits, other.precision_bits)
        return RealInterval.of(self.lo + other.lo, self.hi + other.hi, bits)

    def __neg__(self) -> "RealInterval":
        return RealInterval(-self.hi, -self.lo, self.precision_bits)

    def __sub__(self, other: "RealInterval") -> "RealInterval":
        return self + (-other)

    def scale(self, c: Rat) -> "RealInterval":
        c = Fraction(c)
        if c >= 0:
            return RealInterval.of(self.lo * c, self.hi * c, self.precision_bits)
        return RealInterval.of(self.hi * c, self.lo * c, self.precision_bits)

    def divide(self, other: "RealInterval") -> "RealInterval":
        if not (other.is_positive() or other.is_negative()):
            raise DomainError("division by an interval containing 0")
        corners = [
            self.lo / other.lo, self.lo / other.hi, self.hi / other.lo, self.hi / other.hi,
        ]
        bits = min(self.precision_bits, other.precision_bits)
        return RealInterval.of(min(corners), max(corners), bits)

    def clamp_nonnegative(self) -> "RealInterval":
        if self.lo >= 0:
            return self
        return RealInterval(Fraction(0), max(self.hi, Fraction(0)), self.precision_bits)


def _surd_log_bounds(s: Surd, bits: int) -> tuple[mpfr, mpfr]:
    """Directed bounds for log(s); s must be strictly positive."""
    if s.is_rational:
        q = mpq(s.a.numerator, s.a.denominator)
        if q <= 0:
            raise DomainError(f"log of non-positive value {s.a}")
        with _down(bits):
            lo = gmpy2.log(mpfr(q))
        with _up(bits):
            hi = gmpy2.log(mpfr(q))
        return lo, hi
    if s.sign() <= 0:
        raise DomainError(f"log of non-positive surd {s}")
    a = mpq(s.a.numerator, s.a.denominator)
    b = mpq(s.b.numerator, s.b.denominator)
    work = bits
    while True:
        with _down(work):
            rt_lo = gmpy2.sqrt(mpfr(s.d))
        with _up(work):
            rt_hi = gmpy2.sqrt(mpfr(s.d))
        with _down(work):
            v_lo = mpfr(a) + mpfr(b) * (rt_hi if s.b < 0 else rt_lo)
        with _up(work):
            v_hi = mpfr(a) + mpfr(b) * (rt_lo if s.b < 0 else rt_hi)
        if v_lo > 0:
            break
        work *= 2  # tiny positive surd: refine until the enclosure clears 0
    with _down(bits):
        lo = gmpy2.log(v_lo)
    with _up(bits):
        hi = gmpy2.log(v_hi)
    return lo, hi


LogArg = Union[Surd, Fraction, int]


def _as_surd(x: LogArg) -> Surd:
    return x if isinstance(x, Surd) else Surd.rational(x)


@dataclass(frozen=True)
class LogExpr:
    """sum(c_i * log(a_i)) + const with rational c_i, const and positive surd a_i."""

    terms: tuple[tuple[Fraction, Surd], ...] = ()
    const: Fraction = Fraction(0)

    @staticmethod
    def zero() -> "LogExpr":
        return LogExpr()

    @staticmethod
    def constant(c: Rat) -> "LogExpr":
        return LogExpr((), Fraction(c))

    @staticmethod
    def log(arg: LogArg, coeff: Rat = 1) -> "LogExpr":
        s = _as_surd(arg)
        if s.sign() <= 0:
            raise DomainError(f"log of non-positive value {s}")
        c = Fraction(coeff)
        if c == 0 or s == Surd.rational(1):
            return LogExpr()
        return LogExpr(((c, s),))

    def _merged(self, other: "LogExpr", sign: int) -> "LogExpr":
        acc: dict[Surd, Fraction] = {}
        for c, s in self.terms:
            acc[s] = acc.get(s, Fraction(0)) + c
        for c, s in other.terms:
            acc[s] = acc.get(s, Fraction(0)) + sign * c
        terms = tuple((c, s) for s, c in acc.items() if c != 0)
        return LogExpr(terms, self.const + sign * other.const)

    def __add__(self, other: "LogExpr") -> "LogExpr":
        return self._merged(other, 1)

    def __sub__(self, other: "LogExpr") -> "LogExpr":
        return self._merged(other, -1)

    def scale(self, c: Rat) -> "LogExpr":
        c = Fraction(c)
        if c == 0:
            return LogExpr()
        return LogExpr(tuple((c * ci, s) for ci, s in self.terms), c * self.const)

    def __neg__(self) -> "LogExpr":
        return self.scale(-1)

    def is_structurally_zero(self) -> bool:
        return not self.terms and self.const == 0

    def is_exactly_zero(self) -> bool | None:
        """True/False when decidable exactly, None when the test is inconclusive.

        A nonzero rational constant plus logs of algebraic numbers can never
        cancel (Lindemann), so only the const == 0 case needs the product test.
        """
        if not self.terms:
            return self.const == 0
        if self.const != 0:
            return False
        denom = math.lcm(*(c.denominator for c, _ in self.terms))
        groups: dict[int, list[tuple[int, Surd]]] = {}
        size = 0
        for c, s in self.terms:
            e = int(c * denom)
            size += abs(e) * max(1, s.bit_size())
            groups.setdefault(s.d if not s.is_rational else 0, []).append((e, s))
        if size > _EXACT_PRODUCT_BIT_CAP:
            return None
        rational_part = Fraction(1)
        for d, items in groups.items():
            prod = Surd.rational(1)
            for e, s in items:
                prod = prod * (s**e)
            if prod.is_rational:
                rational_part *= prod.rational_value()
            else:
                return False  # an irrational factor survives in the d-group
        return rational_part == 1

    def __float__(self) -> float:
        total = float(self.const)
        for c, s in self.terms:
            v = float(s)
            if not (0 < v < math.inf):
                # coordinates beyond float range: take the certified route
                return float(eval_log_expr(self, 64).midpoint)
            total += float(c) * math.log(v)
        return total


def eval_log_expr(expr: LogExpr, precision_bits: int = DEFAULT_PRECISION_BITS) -> RealInterval:
    """Enclosure of expr with width <= 2**(2-precision_bits) * max(1, |value|)."""
    if precision_bits <= 0:
        raise DomainError("precision_bits must be positive")
    if not expr.terms:
        return RealInterval.of(expr.const, expr.const, precision_bits)
    work = precision_bits + 32
    while True:
        lo_parts, hi_parts = [], []
        for c, s in expr.terms:
            llo, lhi = _surd_log_bounds(s, work)
            cq = mpq(c.numerator, c.denominator)
            with _down(work):
                lo_parts.append(mpfr(cq) * (lhi if c < 0 else llo))
            with _up(work):
                hi_parts.append(mpfr(cq) * (llo if c < 0 else lhi))
        cq = mpq(expr.const.numerator, expr.const.denominator)
        with _down(work):
            lo = mpfr(cq)
            for part in lo_parts:
                lo += part
        with _up(work):
            hi = mpfr(cq)
            for part in hi_parts:
                hi += part
        flo, fhi = _frac(lo), _frac(hi)
        width = fhi - flo
        same_sign = flo > 0 or fhi < 0
        magnitude = min(abs(flo), abs(fhi)) if same_sign else Fraction(0)
        if width <= Fraction(4, 2**precision_bits) * max(Fraction(1), magnitude):
            return RealInterval(flo, fhi, precision_bits)
        work *= 2


class Comparison(enum.Enum):
    LESS = "less"
    GREATER = "greater"
    TIE = "tie"


def compare_adaptive(
    a: LogExpr,
    b: LogExpr,
    tie_tolerance: Rat = DEFAULT_TIE_TOLERANCE,
    start_bits: int = DEFAULT_PRECISION_BITS,
    max_bits: int = MAX_PRECISION_BITS,
) -> Comparison:
    """Certified three-way comparison of two log expressions.

    LESS/GREATER are returned only off disjoint enclosures; TIE means the
    difference is either exactly zero or provably below tie_tolerance.
    """
    tol = Fraction(tie_tolerance)
    if tol <= 0:
        raise DomainError("tie_tolerance must be positive")
    diff = a - b
    if diff.is_structurally_zero() or diff.is_exactly_zero():
        return Comparison.TIE
    bits = start_bits
    while True:
        iv = eval_log_expr(diff, bits)
        if iv.is_positive():
            return Comparison.GREATER
        if iv.is_negative():
            return Comparison.LESS
        if -tol < iv.lo and iv.hi < tol:
            return Comparison.TIE
        if bits >= max_bits:
            raise IndeterminateComparisonError(
                f"comparison undecided at {max_bits} bits (difference within {float(iv.width):.3e})"
            )
        bits = min(2 * bits, max_bits)


def sign_of(
    expr: LogExpr,
    start_bits: int = DEFAULT_PRECISION_BITS,
    max_bits: int = MAX_PRECISION_BITS,
) -> int:
    """Exact sign of an expression known (by the caller) not to be zero."""
    if expr.is_structurally_zero():
        return 0
    bits = start_bits
    while True:
        iv = eval_log_expr(expr, bits)
        if iv.is_positive():
            return 1
        if iv.is_negative():
            return -1
        if expr.is_exactly_zero():
            return 0
        if bits >= max_bits:
            raise IndeterminateComparisonError(f"sign undecided at {max_bits} bits")
        bits = min(2 * bits, max_bits)


def certified_floor_ratio(
    num: LogExpr,
    den: LogExpr,
    start_bits: int = DEFAULT_PRECISION_BITS,
    max_bits: int = MAX_PRECISION_BITS,
) -> int:
    """floor(num/den) for den != 0, certified; caller must rule out exact-integer ratios."""
    bits = start_bits
    while True:
        div = eval_log_expr(den, bits)
        if div.is_positive() or div.is_negative():
            ratio = eval_log_expr(num, bits).divide(div)
            flo, fhi = math.floor(ratio.lo), math.floor(ratio.hi)
            if flo == fhi:
                return flo
        if bits >= max_bits:
            raise IndeterminateComparisonError(
                f"floor of ratio undecided at {max_bits} bits (integer-boundary tie?)"
            )
        bits = min(2 * bits, max_bits)


def certified_ceil_ratio(
    num: LogExpr,
    den: LogExpr,
    start_bits: int = DEFAULT_PRECISION_BITS,
    max_bits: int = MAX_PRECISION_BITS,
) -> int:
    return -certified_floor_ratio(-num, den, start_bits, max_bits)


def interval_rational_power(
    iv: RealInterval, t: Fraction, bits: int = DEFAULT_PRECISION_BITS
) -> RealInterval:
    """[lo, hi]**t for a nonnegative interval and positive rational t."""
    t = Fraction(t)
    if t <= 0:
        raise DomainError("exponent must be positive")
    if iv.lo < 0:
        raise DomainError("negative base for rational power")
    p, q = t.numerator, t.denominator

    def _root(x: Fraction, up: bool) -> Fraction:
        xp = x**p
        ctx = _up(bits + 8) if up else _down(bits + 8)
        with ctx:
            r = gmpy2.rootn(mpfr(mpq(xp.numerator, xp.denominator)), q)
        return _frac(r)

    return RealInterval(_root(iv.lo, False), _root(iv.hi, True), bits)
