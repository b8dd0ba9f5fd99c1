"""Ideal arithmetic in the ring of integers of a quadratic field, plus the
rational degenerate case over Z.

Integral ideals are stored in Hermite normal form a*Z + (b + c*omega)*Z with
c | a, c | b, 0 <= b < a; norm = a*c.  Containment tests go through HNF
membership, never factorization.  The refinement algorithm realizes
I_n = J_n + (I_1 ... I_{n-1})^{-1} I sequentially and checks its own
postconditions.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence, Union

from .arith import factorize, is_prime, kronecker, sqrt_mod_prime
from .errors import (
    DomainError,
    FieldMismatchError,
    InconsistentFactorizationError,
)
from .qfield import QQ, Field, FieldElement, QuadField, RationalField, parse_element


def _hnf_from_rows(rows: Sequence[tuple[int, int]]) -> tuple[int, int, int]:
    """HNF (a, b, c) of the Z-module spanned by coordinate rows (x, y) = x + y*omega."""
    c, bx = 0, 0
    xs: list[int] = []
    for x, y in rows:
        if y == 0:
            xs.append(x)
            continue
        if c == 0:
            c, bx = abs(y), x if y > 0 else -x
            continue
        g, s, t = _xgcd(c, y)
        # new second generator with omega-coefficient g; leftover is omega-free
        nx = s * bx + t * x
        xs.append(bx * (y // g) - x * (c // g))
        c, bx = g, nx
    a = 0
    for x in xs:
        a = math.gcd(a, abs(x))
    if a == 0 or c == 0:
        raise DomainError("zero module is not an ideal")
    b = bx % a
    return a, b, c


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_s, s = s, old_s - qt * s
        old_t, t = t, old_t - qt * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@dataclass(frozen=True)
class IntegralIdeal:
    """Nonzero integral ideal of O_K in HNF: a*Z + (b + c*omega)*Z."""

    field: QuadField
    a: int
    b: int
    c: int

    def __post_init__(self):
        a, b, c = self.a, self.b, self.c
        if a <= 0 or c <= 0 or not (0 <= b < a) or a % c or b % c:
            raise DomainError(f"not an HNF triple: [{a}, {b}+{c}w]")
        # closure under multiplication by omega
        t, n = self.field.omega_trace, self.field.omega_norm
        for x, y in ((a, 0), (b, c)):
            wx, wy = -n * y, x + t * y
            if not self._member(wx, wy):
                raise DomainError(f"[{a}, {b}+{c}w] is not closed under omega")

    def _member(self, x: int, y: int) -> bool:
        if y % self.c:
            return False
        return (x - (y // self.c) * self.b) % self.a == 0

    @staticmethod
    def from_rows(field: QuadField, rows: Sequence[tuple[int, int]]) -> "IntegralIdeal":
        return IntegralIdeal(field, *_hnf_from_rows(rows))

    @staticmethod
    def from_generators(gens: Sequence[FieldElement]) -> "IntegralIdeal":
        if not gens:
            raise DomainError("no generators")
        field = gens[0].field
        if field.is_rational:
            raise DomainError("use RationalIdeal over Q")
        t, n = field.omega_trace, field.omega_norm
        rows = []
        for g in gens:
            if g.field != field:
                raise FieldMismatchError("generators from different fields")
            if not g.is_integral:
                raise DomainError(f"generator {g} is not integral")
            rows.append((g.p, g.q))
            rows.append((-n * g.q, g.p + t * g.q))  # g * omega
        return IntegralIdeal.from_rows(field, rows)

    @staticmethod
    def principal(g: FieldElement) -> "IntegralIdeal":
        return IntegralIdeal.from_generators([g])

    @staticmethod
    def unit_ideal(field: QuadField) -> "IntegralIdeal":
        return IntegralIdeal(field, 1, 0, 1)

    @property
    def norm(self) -> int:
        return self.a * self.c

    @property
    def is_unit_ideal(self) -> bool:
        return self.a == 1 and self.c == 1

    def generators(self) -> tuple[FieldElement, FieldElement]:
        return self.field.element(self.a), self.field.element(self.b, self.c)

    def contains_element(self, g: FieldElement) -> bool:
        if g.field != self.field:
            raise FieldMismatchError("element from another field")
        if not g.is_integral:
            return False
        return self._member(g.p, g.q)

    def contains(self, other: "IntegralIdeal") -> bool:
        """other is a subset of self (self divides other)."""
        self._check(other)
        return self._member(other.a, 0) and self._member(other.b, other.c)

    def _check(self, other: "IntegralIdeal"):
        if self.field != other.field:
            raise FieldMismatchError("ideals from different fields")

    def __mul__(self, other: "IntegralIdeal") -> "IntegralIdeal":
        self._check(other)
        t, n = self.field.omega_trace, self.field.omega_norm
        rows = []
        for x1, y1 in ((self.a, 0), (self.b, self.c)):
            for x2, y2 in ((other.a, 0), (other.b, other.c)):
                rows.append(
                    (x1 * x2 - n * y1 * y2, x1 * y2 + y1 * x2 + t * y1 * y2)
                )
        return IntegralIdeal.from_rows(self.field, rows)

    def __add__(self, other: "IntegralIdeal") -> "IntegralIdeal":
        """Ideal sum = gcd."""
        self._check(other)
        return IntegralIdeal.from_rows(
            self.field,
            [(self.a, 0), (self.b, self.c), (other.a, 0), (other.b, other.c)],
        )

    def __pow__(self, k: int) -> "IntegralIdeal":
        if k < 0:
            raise DomainError("negative ideal power is fractional")
        out = IntegralIdeal.unit_ideal(self.field)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def intersection(self, other: "IntegralIdeal") -> "IntegralIdeal":
        """gcd*lcm = product: intersection = (self*other) / (self+other)."""
        self._check(other)
        return (self * other).divide_exact(self + other)

    def conjugate(self) -> "IntegralIdeal":
        t = self.field.omega_trace
        return IntegralIdeal.from_rows(
            self.field, [(self.a, 0), (self.b + self.c * t, -self.c)]
        )

    def divide_exact(self, other: "IntegralIdeal") -> "IntegralIdeal":
        """self / other, requiring other | self."""
        self._check(other)
        prod = self * other.conjugate()
        n = other.norm
        if prod.a % n or prod.b % n or prod.c % n:
            raise DomainError("ideal division is not exact")
        return IntegralIdeal(self.field, prod.a // n, prod.b // n, prod.c // n)

    def is_coprime(self, other: "IntegralIdeal") -> bool:
        return (self + other).is_unit_ideal

    def inverse(self) -> "FractionalIdealRatio":
        return FractionalIdealRatio.reduced(
            IntegralIdeal.unit_ideal(self.field), self
        )

    def valuation(self, prime: "PrimeIdeal") -> int:
        """v_P(self) by repeated exact division."""
        v, cur = 0, self
        while prime.ideal.contains(cur):
            cur = cur.divide_exact(prime.ideal)
            v += 1
        return v

    def factor(self) -> "ValuationVector":
        entries = {}
        for p in sorted(factorize(self.norm)):
            for prime in prime_split(self.field, p):
                v = self.valuation(prime)
                if v:
                    entries[prime] = v
        vec = ValuationVector(entries)
        if vec.to_ideal(self.field) != self:
            raise DomainError("factorization recomposition failed")
        return vec

    def __str__(self) -> str:
        return f"[{self.a}, {self.b}+{self.c}*w]"

    def __repr__(self) -> str:
        return f"<ideal {self} of {self.field}, norm {self.norm}>"


@dataclass(frozen=True)
class RationalIdeal:
    """Nonzero ideal g*Z of Z, g a positive integer."""

    g: int
    field: RationalField = QQ

    def __post_init__(self):
        if self.g <= 0:
            raise DomainError("rational ideal needs a positive generator")

    @staticmethod
    def principal(x: FieldElement) -> "RationalIdeal":
        if not x.is_integral:
            raise DomainError("generator must be an integer")
        return RationalIdeal(abs(x.p))

    @staticmethod
    def unit_ideal(field: RationalField = QQ) -> "RationalIdeal":
        return RationalIdeal(1)

    @property
    def norm(self) -> int:
        return self.g

    @property
    def is_unit_ideal(self) -> bool:
        return self.g == 1

    def generators(self) -> tuple[FieldElement]:
        return (QQ.element(self.g),)

    def contains_element(self, x: FieldElement) -> bool:
        return x.is_integral and x.p % self.g == 0

    def contains(self, other: "RationalIdeal") -> bool:
        return other.g % self.g == 0

    def __mul__(self, other: "RationalIdeal") -> "RationalIdeal":
        return RationalIdeal(self.g * other.g)

    def __add__(self, other: "RationalIdeal") -> "RationalIdeal":
        return RationalIdeal(math.gcd(self.g, other.g))

    def __pow__(self, k: int) -> "RationalIdeal":
        if k < 0:
            raise DomainError("negative ideal power is fractional")
        return RationalIdeal(self.g**k)

    def intersection(self, other: "RationalIdeal") -> "RationalIdeal":
        return RationalIdeal(math.lcm(self.g, other.g))

    def conjugate(self) -> "RationalIdeal":
        return self

    def divide_exact(self, other: "RationalIdeal") -> "RationalIdeal":
        if self.g % other.g:
            raise DomainError("ideal division is not exact")
        return RationalIdeal(self.g // other.g)

    def is_coprime(self, other: "RationalIdeal") -> bool:
        return math.gcd(self.g, other.g) == 1

    def inverse(self) -> "FractionalIdealRatio":
        return FractionalIdealRatio.reduced(RationalIdeal(1), self)

    def valuation(self, prime: "RationalPrime") -> int:
        v, n = 0, self.g
        while n % prime.p == 0:
            n //= prime.p
            v += 1
        return v

    def factor(self) -> "ValuationVector":
        return ValuationVector(
            {rational_prime(p): e for p, e in factorize(self.g).items()}
        )

    def __str__(self) -> str:
        return f"({self.g})"

    def __repr__(self) -> str:
        return f"<ideal {self} of Q>"


Ideal = Union[IntegralIdeal, RationalIdeal]


@lru_cache(maxsize=1 << 16)
def rational_prime(p: int) -> "RationalPrime":
    return RationalPrime(p)


@dataclass(frozen=True)
class RationalPrime:
    """Prime p of Z, dressed with the interface of a prime ideal."""

    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise DomainError(f"{self.p} is not prime")

    @property
    def residue_norm(self) -> int:
        return self.p

    @property
    def ideal(self) -> RationalIdeal:
        return RationalIdeal(self.p)

    @property
    def split_type(self) -> str:
        return "rational"

    def sort_key(self):
        return (self.p, 0)

    def __str__(self) -> str:
        return f"({self.p})"


@dataclass(frozen=True)
class PrimeIdeal:
    """Prime ideal of O_K above the rational prime p."""

    p: int
    split_type: str  # split | inert | ramified
    ideal: IntegralIdeal

    @property
    def field(self) -> QuadField:
        return self.ideal.field

    @property
    def residue_norm(self) -> int:
        return self.ideal.norm

    @property
    def ramification(self) -> int:
        return 2 if self.split_type == "ramified" else 1

    def sort_key(self):
        return (self.p, self.ideal.b)

    def __str__(self) -> str:
        if self.split_type == "inert":
            return f"({self.p})"
        # (p, omega - r) with r recovered from HNF b = (-r) mod a
        r = (-self.ideal.b) % self.ideal.a
        return f"({self.p}, w-{r})" if r else f"({self.p}, w)"


PrimeLike = Union[PrimeIdeal, RationalPrime]


@lru_cache(maxsize=None)
def prime_split(field: QuadField, p: int) -> tuple[PrimeIdeal, ...]:
    """Prime ideals of O_K above p, via the Kronecker symbol of the discriminant."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    disc = field.discriminant
    chi = kronecker(disc, p)
    t, n = field.omega_trace, field.omega_norm
    if chi == -1:
        ideal = IntegralIdeal(field, p, 0, p)
        return (PrimeIdeal(p, "inert", ideal),)
    # roots of x^2 - t x + n mod p
    if p == 2:
        roots = [r for r in (0, 1) if (r * r - t * r + n) % 2 == 0]
    else:
        s = sqrt_mod_prime(disc % p, p)
        if s is None:
            raise DomainError("inconsistent Kronecker symbol")  # unreachable
        inv2 = pow(2, -1, p)
        roots = sorted({(t + s) * inv2 % p, (t - s) * inv2 % p})
    kind = "ramified" if chi == 0 else "split"
    primes = tuple(
        PrimeIdeal(p, kind, IntegralIdeal(field, p, (-r) % p, 1)) for r in roots
    )
    if chi == 0 and len(primes) != 1 or chi == 1 and len(primes) != 2:
        raise DomainError("prime splitting inconsistent with Kronecker symbol")
    return primes


def primes_above(field: Field, p: int) -> tuple[PrimeLike, ...]:
    if field.is_rational:
        return (RationalPrime(p),)
    return prime_split(field, p)


class ValuationVector(Mapping):
    """Finite exponent vector over prime ideals; no zero entries, sorted keys."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[PrimeLike, int]):
        cleaned = {p: int(e) for p, e in entries.items() if e != 0}
        self._entries = dict(sorted(cleaned.items(), key=lambda kv: kv[0].sort_key()))

    def __getitem__(self, key):
        return self._entries[key]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def get(self, key, default=0):
        return self._entries.get(key, default)

    def __eq__(self, other):
        return isinstance(other, ValuationVector) and self._entries == other._entries

    def __hash__(self):
        return hash(tuple(self._entries.items()))

    def scale(self, k: int) -> "ValuationVector":
        return ValuationVector({p: k * e for p, e in self._entries.items()})

    def __add__(self, other: "ValuationVector") -> "ValuationVector":
        out = dict(self._entries)
        for p, e in other.items():
            out[p] = out.get(p, 0) + e
        return ValuationVector(out)

    def __sub__(self, other: "ValuationVector") -> "ValuationVector":
        return self + other.scale(-1)

    def positive_part(self) -> "ValuationVector":
        return ValuationVector({p: e for p, e in self._entries.items() if e > 0})

    def negative_part(self) -> "ValuationVector":
        """Exponents of the denominator, as positive numbers."""
        return ValuationVector({p: -e for p, e in self._entries.items() if e < 0})

    def dominates(self, other: "ValuationVector") -> bool:
        """Componentwise >=, i.e. the ideal of self is contained in that of other."""
        keys = set(self) | set(other)
        return all(self.get(p) >= other.get(p) for p in keys)

    def norm(self) -> int:
        """Norm of the (integral) ideal with these exponents; requires e >= 0."""
        out = 1
        for p, e in self._entries.items():
            if e < 0:
                raise DomainError("norm of a vector with negative exponents")
            out *= p.residue_norm**e
        return out

    def to_ideal(self, field: Field) -> Ideal:
        out = unit_ideal(field)
        for p, e in self._entries.items():
            if e < 0:
                raise DomainError("negative exponent does not give an integral ideal")
            out = out * p.ideal**e
        return out

    def __str__(self) -> str:
        if not self._entries:
            return "(1)"
        return " * ".join(
            f"{p}^{e}" if e != 1 else f"{p}" for p, e in self._entries.items()
        )


def unit_ideal(field: Field) -> Ideal:
    if field.is_rational:
        return RationalIdeal(1)
    return IntegralIdeal.unit_ideal(field)


def principal_ideal(x: FieldElement) -> Ideal:
    if x.field.is_rational:
        return RationalIdeal.principal(x)
    return IntegralIdeal.principal(x)


@dataclass(frozen=True)
class FractionalIdealRatio:
    """Coprime ratio J/J' of integral ideals; unique in a Dedekind domain."""

    numerator: Ideal
    denominator: Ideal

    def __post_init__(self):
        if not self.numerator.is_coprime(self.denominator):
            raise DomainError("ratio is not in coprime form")

    @staticmethod
    def reduced(num: Ideal, den: Ideal) -> "FractionalIdealRatio":
        g = num + den
        if not g.is_unit_ideal:
            num, den = num.divide_exact(g), den.divide_exact(g)
        return FractionalIdealRatio(num, den)

    @property
    def field(self) -> Field:
        return self.numerator.field

    @property
    def is_integral(self) -> bool:
        return self.denominator.is_unit_ideal

    def __mul__(self, other: "FractionalIdealRatio") -> "FractionalIdealRatio":
        return FractionalIdealRatio.reduced(
            self.numerator * other.numerator, self.denominator * other.denominator
        )

    def inverse(self) -> "FractionalIdealRatio":
        return FractionalIdealRatio(self.denominator, self.numerator)

    def equals_ratio(self, num: Ideal, den: Ideal) -> bool:
        """Equality with num/den as fractional ideals (no coprimality required)."""
        return self.numerator * den == num * self.denominator

    def valuations(self) -> ValuationVector:
        return self.numerator.factor() - self.denominator.factor()

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


def ideal_inverse(x: Ideal) -> FractionalIdealRatio:
    return x.inverse()


def is_coprime(x: Ideal, y: Ideal) -> bool:
    return x.is_coprime(y)


def coprime_split(x: FieldElement) -> FractionalIdealRatio:
    """x*O_K as a coprime ratio J/J', from numerator and denominator parts."""
    if x.is_zero:
        raise DomainError("coprime split of zero")
    if x.field.is_rational:
        r = x.rational_value()
        return FractionalIdealRatio(
            RationalIdeal(abs(r.numerator)), RationalIdeal(r.denominator)
        )
    y = x.field.element(x.p, x.q)  # numerator as an integral element
    num = IntegralIdeal.principal(y)
    den = IntegralIdeal.principal(x.field.element(x.den))
    return FractionalIdealRatio.reduced(num, den)


def element_valuations(x: FieldElement) -> ValuationVector:
    return coprime_split(x).valuations()


def refine_factorization(ideal: Ideal, parts: Sequence[Ideal]) -> list[Ideal]:
    """Refine ideal = I into [I_1 ... I_N] with prod I_n = I and J_n inside I_n.

    Implements I_n = J_n + (I_1 ... I_{n-1})^{-1} I, processing parts in the
    given order.  Requires prod(parts) inside I.
    """
    if not parts:
        raise DomainError("need at least one part to refine against")
    product = parts[0]
    for j in parts[1:]:
        product = product * j
    if not ideal.contains(product):
        detail = _containment_failure_detail(ideal, product)
        raise InconsistentFactorizationError(
            f"product of parts is not contained in the target ideal ({detail})"
        )
    remaining = ideal
    out: list[Ideal] = []
    for j in parts:
        i_n = j + remaining
        out.append(i_n)
        remaining = remaining.divide_exact(i_n)
    if not remaining.is_unit_ideal:
        raise DomainError("refinement did not exhaust the target ideal")
    check = out[0]
    for i_n in out[1:]:
        check = check * i_n
    if check != ideal or any(not i_n.contains(j) for i_n, j in zip(out, parts)):
        raise DomainError("refinement postcondition failed")
    return out


def _containment_failure_detail(ideal: Ideal, product: Ideal) -> str:
    iv = ideal.factor()
    pv = product.factor()
    for p in set(iv) | set(pv):
        if pv.get(p) < iv.get(p):
            return f"offending prime {p}: v(target) = {iv.get(p)} > v(product) = {pv.get(p)}"
    return "no offending prime found"


# -- parsing ----------------------------------------------------------------

_HNF_RE = re.compile(r"^\[\s*(-?\d+)\s*,\s*(-?\d+)?\s*\+?\s*(?:(-?\d+)\s*\*\s*)?w\s*\]$")


def parse_ideal(text: str, field: Field) -> Ideal:
    """Parse `[a, b+c*w]` HNF form or `(g)` / `(g1, g2)` generator form."""
    text = text.strip()
    if text.startswith("["):
        if field.is_rational:
            raise DomainError("HNF form needs a quadratic field")
        m = _HNF_RE.match(text)
        if not m:
            raise DomainError(f"cannot parse HNF ideal {text!r}")
        a = int(m.group(1))
        b = int(m.group(2) or 0)
        c = int(m.group(3)) if m.group(3) is not None else 1
        return IntegralIdeal(field, a, b, c)
    if text.startswith("(") and text.endswith(")"):
        gens_text = text[1:-1]
        gens = [parse_element(part, field) for part in _split_top_level(gens_text)]
        if field.is_rational:
            out = RationalIdeal.principal(gens[0])
            for g in gens[1:]:
                out = out + RationalIdeal.principal(g)
            return out
        return IntegralIdeal.from_generators(gens)
    raise DomainError(f"cannot parse ideal {text!r}")


def _split_top_level(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]
