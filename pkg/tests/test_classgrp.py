"""Class numbers, principality certification, minimal-height generators."""

import random

import pytest

from qmahler.arith import is_squarefree
from qmahler.classgrp import (
    class_info,
    class_number,
    class_number_one,
    is_principal,
    minimal_height_generator,
    minkowski_bound,
)
from qmahler.errors import NotPrincipalError, UnsupportedFieldError
from qmahler.ideals import (
    FractionalIdealRatio,
    IntegralIdeal,
    coprime_split,
    parse_ideal,
    unit_ideal,
)
from qmahler.qfield import QQ, Comparison, parse_element, quad_field, weil_height
from qmahler.units import fundamental_unit, roots_of_unity

Ki = quad_field(-1)
K5m = quad_field(-5)
K2 = quad_field(2)

CLASS_NUMBER_ONE_D = (-1, -2, -3, -7, -11, -19, -43, -67, -163)


def test_is_principal_examples():
    assert is_principal(IntegralIdeal.principal(Ki.element(6))).rational_value() == 6
    assert is_principal(parse_ideal("(2, 1+sqrt(-5))", K5m)) is None
    g = is_principal(parse_ideal("(2, 1+sqrt(-1))", Ki))
    assert g is not None and abs(g.norm()) == 2
    assert is_principal(unit_ideal(K5m)).is_one


def test_is_principal_recovers_generator_up_to_units():
    rng = random.Random(9)
    for field in (Ki, K5m, K2):
        for _ in range(40):
            g = field.element(rng.randint(-9, 9), rng.randint(-9, 9))
            if g.is_zero:
                continue
            ideal = IntegralIdeal.principal(g)
            back = is_principal(ideal)
            assert back is not None
            assert (g / back).is_unit


def test_class_number_examples():
    assert class_number(Ki) == 1
    assert class_number(K5m) == 2
    assert class_number(quad_field(-23)) == 3
    assert class_number(quad_field(-163)) == 1
    assert class_number(QQ) == 1
    with pytest.raises(UnsupportedFieldError):
        class_number(K2)


def test_class_number_one_examples():
    assert class_number_one(quad_field(-163))
    assert not class_number_one(K5m)
    assert class_number_one(K2)  # Minkowski bound below 2
    assert float(minkowski_bound(K2)) < 2
    info = class_info(K5m)
    assert info.nonprincipal_witness is not None
    assert info.nonprincipal_witness.norm == 2


def test_census_matches_known_list():
    found = tuple(
        d
        for d in range(-200, 0)
        if is_squarefree(d) and class_number_one(quad_field(d))
    )
    assert sorted(found) == sorted(CLASS_NUMBER_ONE_D)


def test_minimal_height_generator_examples():
    r = coprime_split(Ki.element(2))
    assert minimal_height_generator(r).rational_value() == 2
    r = coprime_split(Ki.one)
    assert minimal_height_generator(r).is_one
    x = parse_element("sqrt(2)", K2) * parse_element("1+sqrt(2)", K2) ** 3
    g = minimal_height_generator(coprime_split(x))
    assert str(g) == "sqrt(2)"
    assert weil_height(g).exact_log == (2, 2)


def test_minimal_height_generator_beats_unit_multiples():
    rng = random.Random(4)
    eps = fundamental_unit(K2)
    for _ in range(12):
        x = K2.element(rng.randint(-8, 8), rng.randint(-8, 8), rng.randint(1, 3))
        if x.is_zero:
            continue
        g = minimal_height_generator(coprime_split(x))
        hg = weil_height(g)
        for _ in range(100):
            ell = rng.randint(-8, 8)
            alt = g * eps**ell * rng.choice(roots_of_unity(K2))
            assert hg.compare(weil_height(alt)) is not Comparison.GREATER


def test_minimal_height_generator_requires_principal():
    p = parse_ideal("(2, 1+sqrt(-5))", K5m)
    with pytest.raises(NotPrincipalError):
        minimal_height_generator(FractionalIdealRatio(unit_ideal(K5m), p))


def test_class_info_consistency():
    for d in (-1, -5, -23, -163, 2, 3, 5):
        info = class_info(quad_field(d))
        if info.class_number is not None:
            assert (info.class_number == 1) == info.class_number_one
