"""HNF ideal arithmetic, prime splitting, factorization, refinement."""

import random
from fractions import Fraction

import pytest

from qmahler.errors import DomainError, InconsistentFactorizationError
from qmahler.ideals import (
    FractionalIdealRatio,
    IntegralIdeal,
    RationalIdeal,
    ValuationVector,
    coprime_split,
    element_valuations,
    parse_ideal,
    prime_split,
    primes_above,
    refine_factorization,
    unit_ideal,
)
from qmahler.qfield import QQ, parse_element, quad_field

Ki = quad_field(-1)
K5m = quad_field(-5)
K2 = quad_field(2)


def principal(field, text):
    return IntegralIdeal.principal(parse_element(text, field))


def test_hnf_invariants():
    p = parse_ideal("(2, 1+sqrt(-5))", K5m)
    assert (p.a, p.b, p.c) == (2, 1, 1)
    assert p.norm == 2
    with pytest.raises(DomainError):
        IntegralIdeal(K5m, 2, 1, 2)  # c does not divide b
    with pytest.raises(DomainError):
        IntegralIdeal(K5m, 5, 1, 1)  # 5Z + (1+w)Z is not closed under omega


def test_product_examples():
    assert principal(Ki, "2") * principal(Ki, "3") == principal(Ki, "6")
    assert principal(K5m, "2") * principal(K5m, "3") == principal(K5m, "6")
    p = parse_ideal("(2, 1+sqrt(-5))", K5m)
    assert p * p == principal(K5m, "2")
    assert RationalIdeal(6) + RationalIdeal(4) == RationalIdeal(2)


def test_sum_and_intersection():
    a, b = principal(Ki, "6"), principal(Ki, "4")
    assert a + b == principal(Ki, "2")
    assert a.intersection(b) == principal(Ki, "12")
    assert RationalIdeal(6).intersection(RationalIdeal(4)) == RationalIdeal(12)


def test_inverse_examples():
    o = unit_ideal(Ki)
    assert o.inverse() == FractionalIdealRatio(o, o)
    two = principal(Ki, "2")
    assert two.inverse() == FractionalIdealRatio(unit_ideal(Ki), two)
    p = parse_ideal("(2, 1+sqrt(-5))", K5m)
    inv = p.inverse()
    # spec's P/(2) is the same fractional ideal; the stored form is coprime
    assert inv.equals_ratio(p, principal(K5m, "2"))
    assert inv.numerator.is_coprime(inv.denominator)
    prod_num = p * inv.numerator
    assert prod_num.divide_exact(inv.denominator) == unit_ideal(K5m)


def test_is_coprime_examples():
    assert principal(Ki, "2").is_coprime(principal(Ki, "3"))
    assert not principal(K5m, "2").is_coprime(principal(K5m, "1+sqrt(-5)"))
    assert unit_ideal(K5m).is_coprime(parse_ideal("(2, 1+sqrt(-5))", K5m))


def test_prime_split_examples():
    fives = prime_split(Ki, 5)
    assert [p.split_type for p in fives] == ["split", "split"]
    assert {(-p.ideal.b) % 5 for p in fives} == {2, 3}
    prod = fives[0].ideal * fives[1].ideal
    assert prod == principal(Ki, "5")
    (three,) = prime_split(K2, 3)
    assert three.split_type == "inert" and three.residue_norm == 9
    (two,) = prime_split(Ki, 2)
    assert two.split_type == "ramified"
    assert two.ideal == IntegralIdeal.from_generators(
        [Ki.element(2), parse_element("1+sqrt(-1)")]
    )
    with pytest.raises(DomainError):
        prime_split(Ki, 6)


def test_factor_examples():
    assert len(unit_ideal(Ki).factor()) == 0
    six = principal(Ki, "6").factor()
    assert sorted((p.p, e) for p, e in six.items()) == [(2, 2), (3, 1)]
    two = principal(K5m, "2").factor()
    ((p, e),) = list(two.items())
    assert p.split_type == "ramified" and e == 2


def test_coprime_split_examples():
    r = coprime_split(QQ.from_fraction(6))
    assert (r.numerator.g, r.denominator.g) == (6, 1)
    r = coprime_split(QQ.from_fraction(Fraction(2, 3)))
    assert (r.numerator.g, r.denominator.g) == (2, 3)
    r = coprime_split(parse_element("(1+sqrt(-5))/2", K5m))
    assert r.numerator.norm == 3 and r.denominator.norm == 2
    with pytest.raises(DomainError):
        coprime_split(QQ.zero)


def test_refine_examples():
    out = refine_factorization(RationalIdeal(12), [RationalIdeal(6), RationalIdeal(6)])
    assert [i.g for i in out] == [6, 2]
    out = refine_factorization(RationalIdeal(6), [RationalIdeal(12)])
    assert [i.g for i in out] == [6]
    p = parse_ideal("(2, 1+sqrt(-5))", K5m)
    out = refine_factorization(principal(K5m, "2"), [p, p])
    assert out == [p, p]


def test_refine_rejects_with_offending_prime():
    with pytest.raises(InconsistentFactorizationError) as err:
        refine_factorization(RationalIdeal(12), [RationalIdeal(2)])
    assert "offending prime" in str(err.value)


def test_refine_order_dependence_is_deterministic():
    a = refine_factorization(RationalIdeal(12), [RationalIdeal(6), RationalIdeal(2)])
    b = refine_factorization(RationalIdeal(12), [RationalIdeal(2), RationalIdeal(6)])
    assert [i.g for i in a] == [6, 2]
    assert [i.g for i in b] == [2, 6]


def test_norm_multiplicativity_random():
    rng = random.Random(3)
    primes = [p for q in (2, 3, 5, 7) for p in primes_above(K5m, q)]
    for _ in range(200):
        va = ValuationVector({rng.choice(primes): rng.randint(1, 3)})
        vb = ValuationVector({rng.choice(primes): rng.randint(1, 3)})
        a, b = va.to_ideal(K5m), vb.to_ideal(K5m)
        assert (a * b).norm == a.norm * b.norm


def test_ratio_containment_lemma():
    # random coprime (I, I') and (J, J') with I J' = I' J force J in I, J' in I'
    rng = random.Random(5)
    pool = [p.ideal for q in (2, 3, 5, 7, 11) for p in primes_above(Ki, q)]
    for _ in range(120):
        i1 = rng.choice(pool)
        i2 = rng.choice([p for p in pool if p.is_coprime(i1)])
        t = rng.choice(pool) ** rng.randint(0, 2)
        j1, j2 = i1 * t, i2 * t
        # I*J' = I'*J by construction
        assert i1 * j2 == i2 * j1
        assert i1.contains(j1) and i2.contains(j2)


def test_inclusion_iff_divisibility():
    rng = random.Random(11)
    pool = [p for q in (2, 3, 5) for p in primes_above(K5m, q)]
    for _ in range(100):
        va = ValuationVector({p: rng.randint(0, 2) for p in pool})
        vb = ValuationVector({p: rng.randint(0, 2) for p in pool})
        a, b = va.to_ideal(K5m), vb.to_ideal(K5m)
        assert a.contains(b) == vb.dominates(va)


def test_element_valuations_roundtrip():
    x = parse_element("12/35", QQ)
    vec = element_valuations(x)
    assert {(p.p, e) for p, e in vec.items()} == {(2, 2), (3, 1), (5, -1), (7, -1)}
    num = vec.positive_part().to_ideal(QQ)
    den = vec.negative_part().to_ideal(QQ)
    assert (num.g, den.g) == (12, 35)


def test_parse_ideal_forms():
    p = parse_ideal("[2, 1+w]", K5m)
    assert p == parse_ideal("(2, 1+sqrt(-5))", K5m)
    assert parse_ideal("(6)", QQ) == RationalIdeal(6)
    assert parse_ideal("[9, 3+3*w]", K5m).norm == 27
    with pytest.raises(DomainError):
        parse_ideal("[2, 1+w]", QQ)
    with pytest.raises(DomainError):
        parse_ideal("{2}", Ki)
    # round-trip the printed HNF form
    q = parse_ideal("(3, 1+sqrt(-5))", K5m)
    assert parse_ideal(str(q), K5m) == q
