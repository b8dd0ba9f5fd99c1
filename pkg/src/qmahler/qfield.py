"""Exact arithmetic in Q and quadratic fields Q(sqrt(d)).

Elements are stored as (p + q*omega)/den with integer coordinates over the
ring of integers basis (1, omega), omega = (1+sqrt(d))/2 when d = 1 mod 4 and
sqrt(d) otherwise.  Heights carry an exact (1/n)*log(m) form whenever the
field has a single archimedean place (and in the detectable real cases), plus
a lazily evaluable log expression for certified numeric work.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from .arith import is_squarefree
from .errors import DomainError, FieldMismatchError, UnsupportedFieldError
from .realnum import (
    DEFAULT_PRECISION_BITS,
    Comparison,
    LogExpr,
    RealInterval,
    Surd,
    compare_adaptive,
    eval_log_expr,
    interval_rational_power,
)


@dataclass(frozen=True)
class RationalField:
    """The field Q, the degenerate d = 0 base case."""

    d: int = 0

    @property
    def degree(self) -> int:
        return 1

    @property
    def is_rational(self) -> bool:
        return True

    @property
    def is_real(self) -> bool:
        return True

    @property
    def discriminant(self) -> int:
        return 1

    @property
    def signature(self) -> tuple[int, int]:
        return (1, 0)

    # omega is unused for Q; zero trace/norm keep the shared multiplication rule valid
    @property
    def omega_trace(self) -> int:
        return 0

    @property
    def omega_norm(self) -> int:
        return 0

    def element(self, p: int, q: int = 0, den: int = 1) -> "FieldElement":
        return FieldElement.make(self, p, q, den)

    def from_fraction(self, x: Union[int, Fraction]) -> "FieldElement":
        x = Fraction(x)
        return FieldElement.make(self, x.numerator, 0, x.denominator)

    @property
    def one(self) -> "FieldElement":
        return self.element(1)

    @property
    def zero(self) -> "FieldElement":
        return self.element(0)

    def __str__(self) -> str:
        return "Q"


QQ = RationalField()


@dataclass(frozen=True)
class QuadField:
    """Quadratic field Q(sqrt(d)) with its maximal order Z[omega]."""

    d: int

    def __post_init__(self):
        if self.d in (0, 1):
            raise DomainError("d must be a squarefree integer != 0, 1")
        if not is_squarefree(self.d):
            raise DomainError(f"d = {self.d} is not squarefree")

    @property
    def degree(self) -> int:
        return 2

    @property
    def is_rational(self) -> bool:
        return False

    @property
    def is_real(self) -> bool:
        return self.d > 0

    @property
    def discriminant(self) -> int:
        return self.d if self.d % 4 == 1 else 4 * self.d

    @property
    def signature(self) -> tuple[int, int]:
        return (2, 0) if self.d > 0 else (0, 1)

    @property
    def omega_is_half(self) -> bool:
        return self.d % 4 == 1

    # omega satisfies omega**2 = omega_trace*omega - omega_norm
    @property
    def omega_trace(self) -> int:
        return 1 if self.omega_is_half else 0

    @property
    def omega_norm(self) -> int:
        return (1 - self.d) // 4 if self.omega_is_half else -self.d

    def element(self, p: int, q: int = 0, den: int = 1) -> "FieldElement":
        return FieldElement.make(self, p, q, den)

    def from_fraction(self, x: Union[int, Fraction]) -> "FieldElement":
        x = Fraction(x)
        return FieldElement.make(self, x.numerator, 0, x.denominator)

    def from_sqrt_coords(self, a: Fraction, b: Fraction) -> "FieldElement":
        """Element a + b*sqrt(d) with rational a, b."""
        a, b = Fraction(a), Fraction(b)
        if self.omega_is_half:
            # a + b*sqrt(d) = (a - b) + 2b*omega
            p, q = a - b, 2 * b
        else:
            p, q = a, b
        den = p.denominator * q.denominator // math.gcd(p.denominator, q.denominator)
        return FieldElement.make(self, int(p * den), int(q * den), den)

    @property
    def omega(self) -> "FieldElement":
        return self.element(0, 1)

    @property
    def sqrt_gen(self) -> "FieldElement":
        """The element sqrt(d)."""
        return self.element(-1, 2) if self.omega_is_half else self.element(0, 1)

    @property
    def one(self) -> "FieldElement":
        return self.element(1)

    @property
    def zero(self) -> "FieldElement":
        return self.element(0)

    def __str__(self) -> str:
        return f"Q(sqrt({self.d}))"


Field = Union[QuadField, RationalField]


@lru_cache(maxsize=None)
def quad_field(d: int) -> QuadField:
    return QuadField(d)


def field_for_spec(d: Union[int, str]) -> Field:
    """Resolve a CLI/service field spec: 'Q' or a squarefree integer d."""
    if isinstance(d, str):
        if d.strip().upper() == "Q":
            return QQ
        d = int(d)
    return quad_field(d)


@dataclass(frozen=True)
class FieldElement:
    """(p + q*omega)/den in canonical reduced coordinates."""

    field: Field
    p: int
    q: int
    den: int

    @staticmethod
    def make(field: Field, p: int, q: int = 0, den: int = 1) -> "FieldElement":
        if den == 0:
            raise ZeroDivisionError("element with zero denominator")
        if field.is_rational and q != 0:
            raise DomainError("rational field elements must have q = 0")
        if den < 0:
            p, q, den = -p, -q, -den
        g = math.gcd(p, q, den)
        if g > 1:
            p, q, den = p // g, q // g, den // g
        return FieldElement(field, p, q, den)

    # -- predicates ------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.p == 0 and self.q == 0

    @property
    def is_one(self) -> bool:
        return self.p == self.den and self.q == 0

    @property
    def is_integral(self) -> bool:
        return self.den == 1

    @property
    def is_rational_value(self) -> bool:
        return self.q == 0

    @property
    def is_unit(self) -> bool:
        """Unit of the ring of integers."""
        return self.is_integral and abs(self.norm()) == 1

    # -- arithmetic ------------------------------------------------------

    def _check(self, other: "FieldElement"):
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement.make(
            self.field,
            self.p * other.den + other.p * self.den,
            self.q * other.den + other.q * self.den,
            self.den * other.den,
        )

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.field, -self.p, -self.q, self.den)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return self + (-other)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        t, n = self.field.omega_trace, self.field.omega_norm
        p1, q1, p2, q2 = self.p, self.q, other.p, other.q
        return FieldElement.make(
            self.field,
            p1 * p2 - n * q1 * q2,
            p1 * q2 + q1 * p2 + t * q1 * q2,
            self.den * other.den,
        )

    def conjugate(self) -> "FieldElement":
        return FieldElement.make(
            self.field, self.p + self.q * self.field.omega_trace, -self.q, self.den
        )

    def inverse(self) -> "FieldElement":
        if self.is_zero:
            raise ZeroDivisionError("division by zero element")
        if self.field.is_rational:
            return FieldElement.make(self.field, self.den, 0, self.p)
        t, n = self.field.omega_trace, self.field.omega_norm
        nrm = self.p * self.p + t * self.p * self.q + n * self.q * self.q
        return FieldElement.make(
            self.field,
            (self.p + self.q * t) * self.den,
            -self.q * self.den,
            nrm,
        )

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return self * other.inverse()

    def __pow__(self, k: int) -> "FieldElement":
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        out = self.field.one
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- invariants ------------------------------------------------------

    def norm(self) -> Fraction:
        if self.field.is_rational:
            return Fraction(self.p, self.den)
        t, n = self.field.omega_trace, self.field.omega_norm
        return Fraction(
            self.p * self.p + t * self.p * self.q + n * self.q * self.q,
            self.den * self.den,
        )

    def trace(self) -> Fraction:
        if self.field.is_rational:
            return Fraction(self.p, self.den)
        return Fraction(2 * self.p + self.field.omega_trace * self.q, self.den)

    def rational_value(self) -> Fraction:
        if self.q != 0:
            raise DomainError("element is not rational")
        return Fraction(self.p, self.den)

    # -- embeddings ------------------------------------------------------

    def sqrt_coords(self) -> tuple[int, int, int]:
        """(A, B, C) with x = (A + B*sqrt(d))/C, gcd-reduced, C > 0."""
        if self.field.is_rational:
            return self.p, 0, self.den
        if self.field.omega_is_half:
            a, b, c = 2 * self.p + self.q, self.q, 2 * self.den
        else:
            a, b, c = self.p, self.q, self.den
        g = math.gcd(a, b, c)
        return a // g, b // g, c // g

    def embedding_surd(self, which: int = 0) -> Surd:
        """sigma_i(x) as an exact surd; sigma_0 sends sqrt(d) to the positive root."""
        if self.field.is_rational:
            return Surd.rational(Fraction(self.p, self.den))
        if not self.field.is_real:
            raise DomainError("real embeddings require a real field")
        a, b, c = self.sqrt_coords()
        b = b if which == 0 else -b
        return Surd(Fraction(a, c), Fraction(b, c), self.field.d)

    def arch_abs_surds(self) -> list[Surd]:
        """|sigma_i(x)| for real places as exact positive surds (real fields only)."""
        out = []
        for i in range(2 if not self.field.is_rational else 1):
            s = self.embedding_surd(i)
            sg = s.sign()
            if sg == 0:
                raise DomainError("zero element has no absolute values")
            out.append(s if sg > 0 else Surd(-s.a, -s.b, s.d))
        return out

    def __float__(self) -> float:
        if self.field.is_rational or self.field.is_real:
            return float(self.embedding_surd(0))
        raise DomainError("imaginary quadratic element has no canonical real value")

    # -- printing --------------------------------------------------------

    def __str__(self) -> str:
        a, b, c = self.sqrt_coords()
        if b == 0:
            return str(a) if c == 1 else f"{a}/{c}"
        d = self.field.d
        root = f"sqrt({d})"
        if b == 1:
            bpart = root
        elif b == -1:
            bpart = f"-{root}"
        else:
            bpart = f"{b}*{root}"
        if a == 0:
            inner = bpart
        else:
            inner = f"{a}+{bpart}" if not bpart.startswith("-") else f"{a}{bpart}"
        return f"({inner})/{c}" if c != 1 else inner

    def __repr__(self) -> str:
        return f"<{self} in {self.field}>"


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(sqrt)|(w)|([()+\-*/]))")


def _tokenize(text: str) -> list:
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise DomainError(f"cannot parse element near {text[pos:]!r}")
        tokens.append(m.group(m.lastindex))
        pos = m.end()
    return tokens


class _Parser:
    """Recursive descent for: [(] sum [)] [/ INT]; terms over sqrt(d) or w."""

    def __init__(self, tokens: list):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise DomainError(f"unexpected token {tok!r} in element expression")
        self.i += 1
        return tok

    def parse_int(self) -> int:
        sign = 1
        while self.peek() in ("+", "-"):
            if self.take() == "-":
                sign = -sign
        tok = self.take()
        if not tok.isdigit():
            raise DomainError(f"expected integer, got {tok!r}")
        return sign * int(tok)

    def parse_sum(self) -> list[tuple[int, Optional[int], bool]]:
        """Terms as (coefficient, d-or-None for sqrt, is_w)."""
        terms = []
        first = True
        while True:
            tok = self.peek()
            if tok is None or tok in (")", "/"):
                break
            sign = 1
            if tok in ("+", "-"):
                while self.peek() in ("+", "-"):
                    if self.take() == "-":
                        sign = -sign
            elif not first:
                raise DomainError("missing operator in element expression")
            first = False
            coeff, radicand, is_w = sign, None, False
            tok = self.peek()
            if tok is not None and tok.isdigit():
                coeff *= int(self.take())
                if self.peek() == "*":
                    self.take()
                    tok = self.peek()
                else:
                    tok = self.peek()
                    if tok not in ("sqrt", "w"):
                        terms.append((coeff, None, False))
                        continue
            if self.peek() == "sqrt":
                self.take()
                self.take("(")
                radicand = self.parse_int()
                self.take(")")
            elif self.peek() == "w":
                self.take()
                is_w = True
            terms.append((coeff, radicand, is_w))
        return terms


def parse_element(text: str, field: Optional[Field] = None) -> FieldElement:
    """Parse `a`, `a/b`, `a+b*sqrt(d)` or `(p+q*w)/m` (and natural variants)."""
    tokens = _tokenize(text)
    parser = _Parser(tokens)
    if parser.peek() == "(":
        parser.take()
        terms = parser.parse_sum()
        parser.take(")")
    else:
        terms = parser.parse_sum()
    den = 1
    if parser.peek() == "/":
        parser.take()
        den = parser.parse_int()
    if parser.peek() is not None:
        raise DomainError(f"trailing tokens in element expression {text!r}")
    if den == 0:
        raise ZeroDivisionError("zero denominator in element expression")

    radicands = {d for _, d, _ in terms if d is not None}
    uses_w = any(w for _, _, w in terms)
    if len(radicands) > 1:
        raise DomainError("mixed radicands in element expression")
    if uses_w and radicands:
        raise DomainError("cannot mix w and sqrt() in one expression")
    if radicands:
        d = radicands.pop()
        target = quad_field(d)
        if field is not None and not field.is_rational and field != target:
            raise FieldMismatchError(f"expression lives in {target}, expected {field}")
        if field is not None and field.is_rational:
            pass  # quadratic element over base Q is allowed for measure computations
        field = target
    if uses_w:
        if field is None or field.is_rational:
            raise DomainError("w-form expressions need an explicit quadratic field")
    if field is None:
        field = QQ

    rat = sum(c for c, d, w in terms if d is None and not w)
    if field.is_rational:
        return FieldElement.make(field, rat, 0, den)
    if uses_w:
        q = sum(c for c, _, w in terms if w)
        return FieldElement.make(field, rat, q, den)
    b = sum(c for c, d, _ in terms if d is not None)
    return field.from_sqrt_coords(Fraction(rat, den), Fraction(b, den))


# -- heights ---------------------------------------------------------------


@dataclass(frozen=True)
class HeightValue:
    """A nonnegative log-scale value: optional exact (1/n)*log(m), a lazily
    evaluable expression when available, else a fixed certified enclosure."""

    expr: Optional[LogExpr]
    exact_log: Optional[tuple[int, int]] = None  # (n, m): value = (1/n) * log m
    numeric: Optional[RealInterval] = None  # used when expr is absent

    def __post_init__(self):
        if self.exact_log is not None:
            n, m = self.exact_log
            if n not in (1, 2) or m < 1:
                raise DomainError(f"invalid exact height form (1/{n})*log({m})")
        if self.expr is None and self.numeric is None:
            raise DomainError("height value needs an expression or an enclosure")

    @staticmethod
    def zero() -> "HeightValue":
        return HeightValue(LogExpr.zero(), (1, 1))

    @staticmethod
    def exact(n: int, m: int) -> "HeightValue":
        if m == 1:
            return HeightValue.zero()
        if n == 2 and (r := math.isqrt(m)) ** 2 == m:
            n, m = 1, r
        return HeightValue(LogExpr.log(m, Fraction(1, n)), (n, m))

    @property
    def is_exact(self) -> bool:
        return self.exact_log is not None

    @property
    def exact_form(self) -> Optional[str]:
        if self.exact_log is None:
            return None
        n, m = self.exact_log
        return f"log({m})" if n == 1 else f"(1/{n})·log({m})"

    def interval(self, bits: int = DEFAULT_PRECISION_BITS) -> RealInterval:
        if self.expr is None:
            return self.numeric
        return eval_log_expr(self.expr, bits).clamp_nonnegative()

    def __float__(self) -> float:
        if self.expr is None:
            return float(self.numeric)
        return float(self.expr)

    def scale_degree(self, k: int) -> "HeightValue":
        if k == 1:
            return self
        if self.exact_log is not None:
            n, m = self.exact_log
            if k % n == 0:
                return HeightValue.exact(1, m ** (k // n))
            return HeightValue.exact(n, m**k)
        if self.expr is None:
            raise DomainError("cannot scale a fixed-precision height")
        return HeightValue(self.expr.scale(k), None)

    def __add__(self, other: "HeightValue") -> "HeightValue":
        if self.exact_log is not None and other.exact_log is not None:
            n1, m1 = self.exact_log
            n2, m2 = other.exact_log
            n = math.lcm(n1, n2)
            return HeightValue.exact(n, m1 ** (n // n1) * m2 ** (n // n2))
        if self.expr is None or other.expr is None:
            raise DomainError("cannot add fixed-precision heights symbolically")
        return HeightValue(self.expr + other.expr, None)

    def compare(self, other: "HeightValue", tie_tolerance=None) -> Comparison:
        if self.exact_log is not None and other.exact_log is not None:
            n1, m1 = self.exact_log
            n2, m2 = other.exact_log
            lhs, rhs = m1**n2, m2**n1
            if lhs == rhs:
                return Comparison.TIE
            return Comparison.LESS if lhs < rhs else Comparison.GREATER
        if self.expr is None or other.expr is None:
            a, b = self.interval(), other.interval()
            if a.hi < b.lo:
                return Comparison.LESS
            if b.hi < a.lo:
                return Comparison.GREATER
            return Comparison.TIE  # resolution limited by the stored precision
        kwargs = {} if tie_tolerance is None else {"tie_tolerance": tie_tolerance}
        return compare_adaptive(self.expr, other.expr, **kwargs)

    def leq(self, other: "HeightValue", tie_tolerance=None) -> bool:
        return self.compare(other, tie_tolerance) in (Comparison.LESS, Comparison.TIE)


def _coprime_split_norms(x: FieldElement) -> tuple[int, int]:
    from . import ideals  # deferred: ideals depends on this module

    ratio = ideals.coprime_split(x)
    return ratio.numerator.norm, ratio.denominator.norm


def weil_height(x: FieldElement) -> HeightValue:
    """h(x) = sum over places of log max(1, |x|_v)."""
    if x.is_zero:
        raise DomainError("height of zero")
    if x.is_rational_value:
        r = x.rational_value()
        return HeightValue.exact(1, max(abs(r.numerator), r.denominator))
    num_norm, den_norm = _coprime_split_norms(x)
    if not x.field.is_real:
        return HeightValue.exact(2, max(num_norm, den_norm))
    s1, s2 = x.arch_abs_surds()
    flags = []
    for s in (s1, s2):
        sg = Surd(s.a - 1, s.b, s.d).sign()
        if sg == 0:
            # |sigma(x)| = 1 forces x = +-1, already handled as rational
            raise DomainError("unexpected unit-circle embedding")
        flags.append(sg > 0)
    if all(flags):
        return HeightValue.exact(2, num_norm)
    if not any(flags):
        return HeightValue.exact(2, den_norm)
    big = s1 if flags[0] else s2
    expr = LogExpr.log(big, Fraction(1, 2)) + LogExpr.log(den_norm, Fraction(1, 2))
    return HeightValue(expr, None)


def mahler_measure_over(base: Field, x: FieldElement) -> HeightValue:
    """m_K(x) = [K(x):K] * h(x) for x in K or a quadratic extension of Q."""
    if x.is_zero:
        raise DomainError("measure of zero")
    h = weil_height(x)
    if base.is_rational:
        degree = 1 if x.is_rational_value else 2
        return h.scale_degree(degree)
    if x.is_rational_value or x.field == base:
        return h
    raise UnsupportedFieldError(
        f"element of {x.field} is not in {base}: relative quadratic towers unsupported"
    )


def abs_values(
    x: FieldElement, bits: int = DEFAULT_PRECISION_BITS
) -> list[tuple[str, RealInterval]]:
    """Normalized absolute values |x|_v: every archimedean place plus the
    finite places with nonzero valuation (the rest are exactly 1)."""
    from . import ideals  # deferred

    if x.is_zero:
        raise DomainError("absolute values of zero")
    out: list[tuple[str, RealInterval]] = []
    if x.field.is_rational:
        r = abs(x.rational_value())
        out.append(("infty", RealInterval.of(r, r, bits)))
    elif x.field.is_real:
        for i, s in enumerate(x.arch_abs_surds()):
            iv = interval_rational_power(_surd_value_interval(s, bits), Fraction(1, 2), bits)
            out.append((f"sigma{i + 1}", iv))
    else:
        n = abs(x.norm())
        iv = interval_rational_power(RealInterval.of(n, n, bits), Fraction(1, 2), bits)
        out.append(("complex", iv))
    vec = ideals.coprime_split(x).valuations()
    for prime, e in vec.items():
        val = Fraction(prime.residue_norm) ** Fraction(-e)  # N(P)^{-e}, then 1/degree root
        iv = interval_rational_power(
            RealInterval.of(val, val, bits), Fraction(1, x.field.degree), bits
        )
        out.append((str(prime), iv))
    return out


def _surd_value_interval(s: Surd, bits: int) -> RealInterval:
    if s.is_rational:
        return RealInterval.of(s.a, s.a, bits)
    lo = Fraction(0)
    hi = Fraction(0)
    # enclose sqrt(d) by integer-scaled isqrt bounds: exact and directed
    scale = 1 << (bits + 8)
    r = math.isqrt(s.d * scale * scale)
    rt_lo, rt_hi = Fraction(r, scale), Fraction(r + 1, scale)
    if s.b >= 0:
        lo, hi = s.a + s.b * rt_lo, s.a + s.b * rt_hi
    else:
        lo, hi = s.a + s.b * rt_hi, s.a + s.b * rt_lo
    return RealInterval.of(lo, hi, bits)
