"""Height-reducing replacement: the class-number-1 construction and the
lambda-power variant.

Given alpha in K and relative-norm data (beta_n, e_n, m_K(alpha_n)) with
(alpha O_K)^g = prod (beta_n O_K)^{e_n}, the coprime splits of alpha and the
beta_n are refined so the numerator (and denominator) ideals multiply exactly
to those of alpha; generators are extracted and balanced by unit multiples,
which yields gamma_n with h(gamma_n) <= m_K(alpha_n) and a unit gamma_0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .classgrp import class_info, is_principal
from .errors import (
    DomainError,
    InconsistentFactorizationError,
    NotPrincipalError,
    UnsupportedFieldError,
)
from .ideals import (
    FractionalIdealRatio,
    Ideal,
    ValuationVector,
    coprime_split,
    element_valuations,
    refine_factorization,
)
from .qfield import (
    QQ,
    Comparison,
    Field,
    FieldElement,
    HeightValue,
    mahler_measure_over,
    weil_height,
)
from .units import balancing_window, fundamental_unit, is_field_balanced


@dataclass(frozen=True)
class DescentDatum:
    """Relative-norm datum for one factor: beta_n, e_n = [E:K(alpha_n)], m_K(alpha_n)."""

    beta: FieldElement
    rel_degree_exp: int
    source_measure: HeightValue

    def __post_init__(self):
        if self.beta.is_zero:
            raise DomainError("descent datum with zero norm")
        if self.rel_degree_exp < 1:
            raise DomainError("relative degree exponent must be >= 1")
        if weil_height(self.beta).compare(self.source_measure) is Comparison.GREATER:
            raise DomainError("source measure below the height of its relative norm")


def norm_descent(alpha_n: FieldElement) -> DescentDatum:
    """Descend one factor to base Q: beta = Norm_{Q(a)/Q}(a), e = [E:Q(a)]
    for E = the field the element is presented in."""
    if alpha_n.is_zero:
        raise DomainError("cannot descend zero")
    measure = mahler_measure_over(QQ, alpha_n)
    if alpha_n.is_rational_value:
        e = alpha_n.field.degree  # [E:Q] since Q(alpha_n) = Q
        beta = QQ.from_fraction(alpha_n.rational_value())
    else:
        e = 1  # E = Q(alpha_n)
        beta = QQ.from_fraction(alpha_n.norm())
    return DescentDatum(beta, e, measure)


def in_field_data(factors: Sequence[FieldElement]) -> list[DescentDatum]:
    """Descent data for a factorization already inside the base field (E = K)."""
    return [DescentDatum(f, 1, weil_height(f)) for f in factors]


@dataclass(frozen=True)
class HeightCertificate:
    index: int
    height: HeightValue
    bound: HeightValue
    comparison: Comparison
    exact: bool

    @property
    def holds(self) -> bool:
        return self.comparison in (Comparison.LESS, Comparison.TIE)


@dataclass(frozen=True)
class ReplacementResult:
    field: Field
    alpha: FieldElement
    data: tuple[DescentDatum, ...]
    gamma0: FieldElement
    gammas: tuple[FieldElement, ...]
    certificates: tuple[HeightCertificate, ...]
    numerators: tuple[Ideal, ...]
    denominators: tuple[Ideal, ...]


@dataclass(frozen=True)
class PowerReplacementResult:
    field: Field
    alpha: FieldElement
    data: tuple[DescentDatum, ...]
    lam: int
    gamma0_lambda: FieldElement
    gamma_lambda_values: tuple[FieldElement, ...]
    certificates: tuple[HeightCertificate, ...]
    numerators: tuple[Ideal, ...]
    denominators: tuple[Ideal, ...]


def _infer_common_exponent(
    alpha: FieldElement, data: Sequence[DescentDatum]
) -> tuple[int, ValuationVector, ValuationVector]:
    """g with g*v(alpha) = sum e_n v(beta_n), verified componentwise."""
    v_alpha = element_valuations(alpha)
    total = ValuationVector({})
    for datum in data:
        total = total + element_valuations(datum.beta).scale(datum.rel_degree_exp)
    if not v_alpha:
        if total:
            raise InconsistentFactorizationError(
                "alpha is a unit but the factor valuations are nontrivial"
            )
        return 1, v_alpha, total
    prime, e = next(iter(v_alpha.items()))
    s = total.get(prime)
    if s == 0 or s % e or s // e < 1:
        raise InconsistentFactorizationError(
            f"no integral common exponent at prime {prime}: {s} vs {e}"
        )
    g = s // e
    if total != v_alpha.scale(g):
        for p in set(total) | set(v_alpha):
            if total.get(p) != g * v_alpha.get(p):
                raise InconsistentFactorizationError(
                    f"valuation identity fails at {p}: {total.get(p)} != {g} * {v_alpha.get(p)}"
                )
    for datum in data:
        if datum.rel_degree_exp > g:
            raise InconsistentFactorizationError(
                f"relative degree {datum.rel_degree_exp} exceeds the common exponent {g}"
            )
    return g, v_alpha, total


def _require_field(field: Field, alpha: FieldElement, data: Sequence[DescentDatum]):
    if alpha.field != field or alpha.is_zero:
        raise DomainError("alpha must be a nonzero element of the base field")
    for datum in data:
        if datum.beta.field != field:
            raise DomainError("descent data must lie in the base field")
    if not data:
        raise DomainError("need at least one factor")


def _refined_ideals(
    field: Field, alpha: FieldElement, data: Sequence[DescentDatum]
) -> tuple[list[Ideal], list[Ideal], FractionalIdealRatio, list[FractionalIdealRatio]]:
    _infer_common_exponent(alpha, data)
    ratio = coprime_split(alpha)
    parts = [coprime_split(d.beta) for d in data]
    nums = refine_factorization(ratio.numerator, [p.numerator for p in parts])
    dens = refine_factorization(ratio.denominator, [p.denominator for p in parts])
    return nums, dens, ratio, parts


def _balancing_unit(field: Field, r: FieldElement) -> FieldElement:
    """A unit u with |u*r|_v >= 1 at all archimedean places (r integral)."""
    if field.is_rational or not field.is_real:
        return field.one  # single place: the product formula already gives |r| >= 1
    window = balancing_window(r)
    if window.is_empty:
        raise DomainError(f"no balancing unit for {r}: field is not balanced")
    ell = min(window, key=lambda l: (abs(l), -l))
    return fundamental_unit(field) ** ell


def _generator(ideal: Ideal) -> FieldElement:
    g = is_principal(ideal)
    if g is None:
        raise NotPrincipalError(f"ideal {ideal} is not principal")
    return g


def _certificates(
    gammas: Sequence[FieldElement],
    data: Sequence[DescentDatum],
    scale: int = 1,
    tie_tolerance=None,
) -> tuple[HeightCertificate, ...]:
    """Compare h(gamma_n) (or h(gamma_n^lam) against lam * measure) per index."""
    out = []
    for i, (g, datum) in enumerate(zip(gammas, data)):
        h = weil_height(g)
        bound = datum.source_measure.scale_degree(scale)
        cmp = h.compare(bound, tie_tolerance)
        out.append(
            HeightCertificate(i, h, bound, cmp, h.is_exact and bound.is_exact)
        )
        if cmp is Comparison.GREATER:
            raise DomainError(f"height bound violated at index {i}: {h} > {bound}")
    return tuple(out)


def replacement(
    field: Field,
    alpha: FieldElement,
    data: Sequence[DescentDatum],
    tie_tolerance=None,
) -> ReplacementResult:
    """The class-number-1 replacement: gamma_0 * prod gamma_n = alpha with
    gamma_0 a unit and h(gamma_n) <= m_K(alpha_n) per index."""
    _require_field(field, alpha, data)
    if not class_info(field).class_number_one:
        raise UnsupportedFieldError(
            "field has class number > 1: use power_replacement"
        )
    if not is_field_balanced(field).balanced:
        raise UnsupportedFieldError("field is not balanced")
    nums, dens, _, splits = _refined_ideals(field, alpha, data)
    gammas = []
    for i_n, i_den, datum, split in zip(nums, dens, data, splits):
        c, c_den = _generator(i_n), _generator(i_den)
        d, d_den = _generator(split.numerator), _generator(split.denominator)
        y = datum.beta * d_den / d
        if not y.is_unit:
            raise DomainError("generator mismatch: y_n is not a unit")
        r, r_den = y * d / c, d_den / c_den
        if not (r.is_integral and r_den.is_integral):
            raise DomainError("containment failed: remainders are not integral")
        u = _balancing_unit(field, r)
        u_den = _balancing_unit(field, r_den)
        gammas.append((c / u) / (c_den / u_den))
    gamma0 = alpha
    for g in gammas:
        gamma0 = gamma0 / g
    if not gamma0.is_unit:
        raise DomainError("gamma_0 is not a unit: construction failed")
    certs = _certificates(gammas, data, tie_tolerance=tie_tolerance)
    return ReplacementResult(
        field, alpha, tuple(data), gamma0, tuple(gammas), certs, tuple(nums), tuple(dens)
    )


def power_replacement(
    field: Field,
    lam: int,
    alpha: FieldElement,
    data: Sequence[DescentDatum],
    tie_tolerance=None,
) -> PowerReplacementResult:
    """The lambda-power replacement: gamma_0^lam * prod gamma_n^lam = alpha^lam
    with every lambda-power ideal principal and (1/lam) h(gamma_n^lam) bounded
    by the source measures."""
    _require_field(field, alpha, data)
    if lam < 1:
        raise DomainError("lambda must be a positive integer")
    if not is_field_balanced(field).balanced:
        raise UnsupportedFieldError("field is not balanced")
    nums, dens, _, splits = _refined_ideals(field, alpha, data)
    gammas = []
    pow_nums, pow_dens = [], []
    for i_n, i_den, datum, split in zip(nums, dens, data, splits):
        i_pow, i_den_pow = i_n**lam, i_den**lam
        pow_nums.append(i_pow)
        pow_dens.append(i_den_pow)
        try:
            c, c_den = _generator(i_pow), _generator(i_den_pow)
        except NotPrincipalError as exc:
            raise NotPrincipalError(
                f"{exc}: lambda = {lam} is not a multiple of the ideal's class order"
            ) from exc
        d = _generator(split.numerator**lam)
        d_den = _generator(split.denominator**lam)
        y = datum.beta**lam * d_den / d
        if not y.is_unit:
            raise DomainError("generator mismatch: y_n is not a unit")
        r, r_den = y * d / c, d_den / c_den
        if not (r.is_integral and r_den.is_integral):
            raise DomainError("containment failed: remainders are not integral")
        u = _balancing_unit(field, r)
        u_den = _balancing_unit(field, r_den)
        gammas.append((c / u) / (c_den / u_den))
    gamma0 = alpha**lam
    for g in gammas:
        gamma0 = gamma0 / g
    if not gamma0.is_unit:
        raise DomainError("gamma_0^lambda is not a unit: construction failed")
    certs = _certificates(gammas, data, scale=lam, tie_tolerance=tie_tolerance)
    return PowerReplacementResult(
        field,
        alpha,
        tuple(data),
        lam,
        gamma0,
        tuple(gammas),
        certs,
        tuple(pow_nums),
        tuple(pow_dens),
    )


@dataclass(frozen=True)
class CertificateCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class CertificateReport:
    checks: tuple[CertificateCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CertificateCheck]:
        return [c for c in self.checks if not c.passed]


def certify(result) -> CertificateReport:
    """Independent re-verification of a replacement result; failures are
    reported, never raised."""
    checks: list[CertificateCheck] = []
    is_power = isinstance(result, PowerReplacementResult)
    lam = result.lam if is_power else 1
    target = result.alpha**lam
    gammas = result.gamma_lambda_values if is_power else result.gammas
    gamma0 = result.gamma0_lambda if is_power else result.gamma0
    product = gamma0
    for g in gammas:
        product = product * g
    checks.append(
        CertificateCheck(
            "product_identity",
            product == target,
            f"gamma0 * prod = {product}, alpha^{lam} = {target}",
        )
    )
    checks.append(
        CertificateCheck(
            "gamma0_unit",
            gamma0.is_integral and abs(gamma0.norm()) == 1,
            f"gamma0 = {gamma0}, norm {gamma0.norm()}",
        )
    )
    for cert in result.certificates:
        checks.append(
            CertificateCheck(
                f"height_bound[{cert.index}]",
                cert.holds,
                f"{cert.height.exact_form or float(cert.height):} <= "
                f"{cert.bound.exact_form or float(cert.bound)} ({'exact' if cert.exact else 'interval'})",
            )
        )
    # no-cancellation: per-index coprime splits must reproduce the refined ideals
    try:
        split_alpha = coprime_split(result.alpha)
        num_prod = result.numerators[0]
        for i in result.numerators[1:]:
            num_prod = num_prod * i
        den_prod = result.denominators[0]
        for i in result.denominators[1:]:
            den_prod = den_prod * i
        ok = num_prod == split_alpha.numerator**lam and den_prod == split_alpha.denominator**lam
        checks.append(
            CertificateCheck(
                "no_cancellation_product",
                ok,
                f"prod numerators = {num_prod}, prod denominators = {den_prod}",
            )
        )
        per_index = True
        for g, i_num, i_den in zip(gammas, result.numerators, result.denominators):
            sp = coprime_split(g)
            if sp.numerator != i_num or sp.denominator != i_den:
                per_index = False
        checks.append(
            CertificateCheck("no_cancellation_per_index", per_index)
        )
    except Exception as exc:  # report, never throw
        checks.append(CertificateCheck("no_cancellation_product", False, str(exc)))
    return CertificateReport(tuple(checks))
