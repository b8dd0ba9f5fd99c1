"""Pure request -> response functions behind the HTTP endpoints; the CLI
calls these directly when no server is configured."""

from __future__ import annotations

from fractions import Fraction

from .. import classgrp, ideals, qfield, replace, tmetric, units, verify
from ..errors import DomainError, UnsupportedFieldError
from ..qfield import HeightValue, field_for_spec, parse_element
from .schemas import (
    BalanceOut,
    CertificateCheckOut,
    ClassInfoOut,
    ElementRequest,
    FieldInfoRequest,
    FieldInfoResponse,
    HeightCertificateOut,
    HeightResponse,
    IdealFactorRequest,
    IdealFactorResponse,
    IdealRefineRequest,
    IdealRefineResponse,
    MeasureResponse,
    PowerReplaceRequest,
    PowerReplaceResponse,
    PrimePowerOut,
    ReplaceRequest,
    ReplaceResponse,
    TMetricEntry,
    TMetricRequest,
    TMetricResponse,
    UnitGroupOut,
    ValueOut,
    VerifyRequest,
    VerifyResponse,
)


def _value_out(val: HeightValue, bits: int) -> ValueOut:
    iv = val.interval(bits)
    return ValueOut(
        exact_form=val.exact_form,
        decimal=f"{float(val):.15g}",
        interval_lo=f"{float(iv.lo):.17g}",
        interval_hi=f"{float(iv.hi):.17g}",
    )


def field_info(req: FieldInfoRequest) -> FieldInfoResponse:
    field = field_for_spec(req.field)
    ug = units.unit_group(field)
    verdict = units.is_field_balanced(field)
    info = classgrp.class_info(field)
    if field.is_rational:
        ring = "Z"
    else:
        ring = "Z[(1+sqrt(d))/2]" if field.omega_is_half else "Z[sqrt(d)]"
    return FieldInfoResponse(
        field=str(field),
        d=None if field.is_rational else field.d,
        discriminant=field.discriminant,
        signature=field.signature,
        ring=ring,
        unit_group=UnitGroupOut(
            torsion_order=ug.torsion_order,
            rank=ug.rank,
            fundamental_unit=str(ug.fundamental_unit) if ug.fundamental_unit else None,
            roots_of_unity=[str(z) for z in units.roots_of_unity(field)],
        ),
        balance=BalanceOut(
            balanced=verdict.balanced,
            criterion_holds=verdict.criterion_holds,
            witness=str(verdict.witness) if verdict.witness is not None else None,
            detail=verdict.detail,
        ),
        class_info=ClassInfoOut(
            minkowski_bound=f"{float(info.minkowski_bound):.6g}",
            class_number_one=info.class_number_one,
            class_number=info.class_number,
            nonprincipal_witness=(
                str(info.nonprincipal_witness)
                if info.nonprincipal_witness is not None
                else None
            ),
        ),
    )


def element_height(req: ElementRequest) -> HeightResponse:
    field = field_for_spec(req.field)
    x = parse_element(req.expr, field)
    value = qfield.weil_height(x)
    return HeightResponse(
        field=str(x.field), element=str(x), value=_value_out(value, req.precision_bits)
    )


def element_measure(req: ElementRequest) -> MeasureResponse:
    base = field_for_spec(req.field)
    x = parse_element(req.expr, base)
    value = qfield.mahler_measure_over(base, x)
    degree = 1 if (x.is_rational_value or x.field == base) else 2
    return MeasureResponse(
        base_field=str(base),
        element=str(x),
        element_field=str(x.field),
        relative_degree=degree,
        value=_value_out(value, req.precision_bits),
    )


def ideal_factor(req: IdealFactorRequest) -> IdealFactorResponse:
    field = field_for_spec(req.field)
    ideal = ideals.parse_ideal(req.ideal, field)
    vec = ideal.factor()
    factors = []
    for prime, e in vec.items():
        factors.append(
            PrimePowerOut(
                prime=str(prime),
                residue_norm=prime.residue_norm,
                split_type=prime.split_type,
                exponent=e,
            )
        )
    return IdealFactorResponse(
        field=str(field), ideal=str(ideal), norm=ideal.norm, factors=factors
    )


def ideal_refine(req: IdealRefineRequest) -> IdealRefineResponse:
    field = field_for_spec(req.field)
    ideal = ideals.parse_ideal(req.ideal, field)
    parts = [ideals.parse_ideal(p, field) for p in req.parts]
    refined = ideals.refine_factorization(ideal, parts)
    prod = refined[0]
    for i_n in refined[1:]:
        prod = prod * i_n
    return IdealRefineResponse(
        field=str(field),
        ideal=str(ideal),
        parts=[str(p) for p in parts],
        refined=[str(i) for i in refined],
        refined_norms=[i.norm for i in refined],
        product_equals_ideal=prod == ideal,
        containments=[i.contains(j) for i, j in zip(refined, parts)],
    )


def _descent_data(field, factor_texts: list[str]):
    if not field.is_rational:
        factors = []
        for text in factor_texts:
            x = parse_element(text, field)
            if x.field != field:
                raise UnsupportedFieldError(
                    f"factor {text!r} lies in {x.field}, not in the base field {field}"
                )
            factors.append(x)
        return replace.in_field_data(factors)
    # base Q: factors may sit in one common quadratic field; rational factors
    # must then be presented inside it so their norm exponent becomes 2
    parsed = [parse_element(text, None) for text in factor_texts]
    quad_fields = {x.field for x in parsed if not x.field.is_rational}
    if len(quad_fields) > 1:
        raise UnsupportedFieldError(
            "factors over Q must share a single quadratic field"
        )
    if quad_fields:
        ambient = quad_fields.pop()
        parsed = [
            x if not x.field.is_rational else ambient.from_fraction(x.rational_value())
            for x in parsed
        ]
    return [replace.norm_descent(x) for x in parsed]


def _certificate_outs(result, bits) -> list[HeightCertificateOut]:
    return [
        HeightCertificateOut(
            index=c.index,
            height=_value_out(c.height, bits),
            bound=_value_out(c.bound, bits),
            holds=c.holds,
            exact=c.exact,
        )
        for c in result.certificates
    ]


def _check_outs(report) -> list[CertificateCheckOut]:
    return [
        CertificateCheckOut(name=c.name, passed=c.passed, detail=c.detail)
        for c in report.checks
    ]


def do_replace(req: ReplaceRequest) -> ReplaceResponse:
    field = field_for_spec(req.field)
    alpha = parse_element(req.alpha, field)
    data = _descent_data(field, req.factors)
    result = replace.replacement(field, alpha, data, tie_tolerance=req.tie_tolerance)
    report = replace.certify(result)
    return ReplaceResponse(
        field=str(field),
        alpha=str(alpha),
        gamma0=str(result.gamma0),
        gammas=[str(g) for g in result.gammas],
        certificates=_certificate_outs(result, req.precision_bits),
        numerator_ideals=[str(i) for i in result.numerators],
        denominator_ideals=[str(i) for i in result.denominators],
        certified=report.all_passed,
        checks=_check_outs(report),
    )


def do_power_replace(req: PowerReplaceRequest) -> PowerReplaceResponse:
    field = field_for_spec(req.field)
    alpha = parse_element(req.alpha, field)
    data = _descent_data(field, req.factors)
    result = replace.power_replacement(field, req.lam, alpha, data, tie_tolerance=req.tie_tolerance)
    report = replace.certify(result)
    return PowerReplaceResponse(
        field=str(field),
        lam=result.lam,
        alpha=str(alpha),
        gamma0_lambda=str(result.gamma0_lambda),
        gamma_lambda_values=[str(g) for g in result.gamma_lambda_values],
        certificates=_certificate_outs(result, req.precision_bits),
        certified=report.all_passed,
        checks=_check_outs(report),
    )


def do_tmetric(req: TMetricRequest) -> TMetricResponse:
    field = field_for_spec(req.field)
    alpha = parse_element(req.alpha, field)
    entries = []
    for t_text in req.ts:
        t = tmetric.parse_t(t_text)
        if field.is_real and not field.is_rational:
            if t is not tmetric.INF:
                raise UnsupportedFieldError(
                    "real quadratic fields support only t = inf (restricted search)"
                )
            result = tmetric.tmetric_infty_rank1(field, alpha, req.precision_bits)
        else:
            result = tmetric.tmetric(field, alpha, t, req.precision_bits, tie_tolerance=req.tie_tolerance)
        entries.append(
            TMetricEntry(
                t="inf" if result.t is tmetric.INF else str(Fraction(result.t)),
                value=_value_out(result.value, req.precision_bits),
                factors=[str(g) for g in result.attaining_elements],
                parts=[str(p) for p in result.attaining.parts],
                unit_exponents=(
                    list(result.attaining.unit_exponents)
                    if result.attaining.unit_exponents is not None
                    else None
                ),
                unit_factor=(
                    str(result.unit_factor) if result.unit_factor is not None else None
                ),
                certificate=result.optimality_certificate,
            )
        )
    return TMetricResponse(field=str(field), alpha=str(alpha), results=entries)


def do_verify(req: VerifyRequest) -> VerifyResponse:
    kwargs = {"seed": req.seed}
    if req.instances is not None:
        kwargs["instances"] = req.instances
    try:
        report = verify.run_suite(req.suite, **kwargs)
    except KeyError as exc:
        raise DomainError(str(exc)) from exc
    return VerifyResponse(
        suite=report.name,
        passed=report.passed,
        checked=report.checked,
        failures=report.failures,
        elapsed_seconds=round(report.elapsed, 3),
    )
