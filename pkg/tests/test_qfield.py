"""Field elements, embeddings, heights and Mahler measures."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmahler.errors import DomainError, FieldMismatchError, UnsupportedFieldError
from qmahler.qfield import (
    QQ,
    Comparison,
    HeightValue,
    abs_values,
    mahler_measure_over,
    parse_element,
    quad_field,
    weil_height,
)


K3 = quad_field(3)
K5 = quad_field(5)
Ki = quad_field(-1)
K2 = quad_field(2)


def test_field_construction():
    assert K5.discriminant == 5 and K5.omega_is_half
    assert K3.discriminant == 12 and not K3.omega_is_half
    assert Ki.signature == (0, 1) and K3.signature == (2, 0)
    with pytest.raises(DomainError):
        quad_field(12)  # not squarefree
    with pytest.raises(DomainError):
        quad_field(1)


def test_element_arith_examples():
    x = parse_element("1+sqrt(3)", K3)
    assert str(x * x.conjugate()) == "-2"
    phi = parse_element("(1+sqrt(5))/2", K5)
    assert str(phi.conjugate()) == "(1-sqrt(5))/2"
    y = parse_element("2+sqrt(2)", K2)
    assert (y * y.conjugate()).rational_value() == 2


def test_norm_trace_examples():
    assert parse_element("2+sqrt(2)").norm() == 2
    assert parse_element("1+sqrt(3)").norm() == -2
    assert parse_element("2+sqrt(3)").norm() == 1
    phi = parse_element("(1+sqrt(5))/2")
    assert phi.norm() == -1 and phi.trace() == 1
    assert QQ.from_fraction(Fraction(-7, 3)).norm() == Fraction(-7, 3)


def test_division_and_powers():
    x = parse_element("3+2*sqrt(2)", K2)
    assert x / x == K2.one
    assert x ** (-1) * x == K2.one
    assert x**3 == x * x * x
    with pytest.raises(ZeroDivisionError):
        x / K2.zero


def test_field_mismatch():
    with pytest.raises(FieldMismatchError):
        parse_element("sqrt(2)") * parse_element("sqrt(3)")


def test_abs_values_examples():
    # x = 1: all absolute values 1 (no nontrivial places reported)
    vals = abs_values(K3.one)
    assert all(iv.contains(1) for _, iv in vals)
    # 1 + sqrt(3): archimedean pair ~ (1.6529, 0.8556), frozen oracle values
    vals = dict(abs_values(parse_element("1+sqrt(3)", K3)))
    assert abs(float(vals["sigma1"]) - 1.6528916502810695) < 1e-12
    assert abs(float(vals["sigma2"]) - 0.8555996771673522) < 1e-12
    # 1 + i: single complex value sqrt(2)
    vals = dict(abs_values(parse_element("1+sqrt(-1)")))
    assert abs(float(vals["complex"]) - math.sqrt(2)) < 1e-12
    with pytest.raises(DomainError):
        abs_values(Ki.zero)


def test_product_formula_encloses_one():
    for text, field in (
        ("(3+2*sqrt(2))/5", K2),
        ("(1+3*sqrt(-1))/2", Ki),
        ("7/9", QQ),
        ("2+sqrt(3)", K3),
    ):
        x = parse_element(text, field)
        lo = hi = Fraction(1)
        for _, iv in abs_values(x):
            lo *= iv.lo
            hi *= iv.hi
        assert lo <= 1 <= hi


def test_weil_height_examples():
    assert float(weil_height(QQ.one)) == 0
    assert weil_height(parse_element("sqrt(-1)")).exact_log == (1, 1)  # root of unity
    h = weil_height(parse_element("1+sqrt(2)"))
    assert h.exact_log is None
    assert abs(float(h) - 0.5 * math.log(1 + math.sqrt(2))) < 1e-20
    assert weil_height(QQ.from_fraction(Fraction(2, 3))).exact_log == (1, 3)
    with pytest.raises(DomainError):
        weil_height(QQ.zero)


def test_height_exactness_for_imaginary_fields():
    for text in ("1+sqrt(-1)", "(3+sqrt(-7))/2", "5+2*sqrt(-5)", "(1+sqrt(-5))/2"):
        assert weil_height(parse_element(text)).is_exact


def test_height_exact_cases_real():
    # both embeddings above 1: h = (1/2) log |N|
    assert weil_height(parse_element("sqrt(2)")).exact_log == (2, 2)
    x = parse_element("(1+sqrt(5))/2")  # golden ratio: mixed, no exact form
    assert weil_height(x).exact_log is None


def test_mahler_measure_examples():
    assert mahler_measure_over(QQ, QQ.from_fraction(2)).exact_log == (1, 2)
    g = parse_element("(1+3*sqrt(-1))/2")
    assert mahler_measure_over(Ki, g).compare(weil_height(g)) is Comparison.TIE
    assert mahler_measure_over(QQ, parse_element("sqrt(2)")).exact_log == (1, 2)
    with pytest.raises(UnsupportedFieldError):
        mahler_measure_over(Ki, parse_element("sqrt(2)"))


def test_height_value_algebra():
    a = HeightValue.exact(2, 9)  # (1/2) log 9 = log 3
    assert a.exact_log == (1, 3)
    b = HeightValue.exact(1, 2)
    assert (a + b).exact_log == (1, 6)
    assert a.scale_degree(2).exact_log == (1, 9)
    assert a.compare(HeightValue.exact(1, 3)) is Comparison.TIE
    assert a.compare(HeightValue.exact(2, 10)) is Comparison.LESS


ELEMENTS = st.tuples(
    st.sampled_from([-5, -3, -1, 2, 3, 5, -7, 10]),
    st.integers(min_value=-30, max_value=30),
    st.integers(min_value=-30, max_value=30),
    st.integers(min_value=1, max_value=12),
)


@settings(max_examples=300, deadline=None)
@given(ELEMENTS)
def test_parse_print_roundtrip(spec):
    d, p, q, den = spec
    x = quad_field(d).element(p, q, den)
    assert parse_element(str(x), x.field) == x


def test_parse_grammar_forms():
    assert parse_element("-12", QQ).rational_value() == -12
    assert parse_element("2/3", QQ).rational_value() == Fraction(2, 3)
    assert parse_element("3*sqrt(2)") == K2.element(0, 3)
    assert parse_element("(1+3*w)/2", K5) == K5.element(1, 3, 2)
    assert parse_element("w", K5) == K5.omega
    assert parse_element("1-sqrt(5)") == K5.from_sqrt_coords(Fraction(1), Fraction(-1))
    with pytest.raises(DomainError):
        parse_element("w")  # omega form requires a field
    with pytest.raises(DomainError):
        parse_element("sqrt(2)+sqrt(3)")
    with pytest.raises(DomainError):
        parse_element("nonsense $", QQ)


@settings(max_examples=200, deadline=None)
@given(ELEMENTS, st.integers(min_value=-3, max_value=3))
def test_height_power_axiom(spec, n):
    d, p, q, den = spec
    x = quad_field(d).element(p, q, den)
    if x.is_zero or n == 0:
        return
    assert weil_height(x**n).compare(weil_height(x).scale_degree(abs(n))) is Comparison.TIE
