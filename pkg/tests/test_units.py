"""Unit groups, fundamental units, balancing windows, balancedness."""

import math
import random

import pytest

from qmahler.errors import DomainError
from qmahler.qfield import parse_element, quad_field, weil_height, QQ
from qmahler.units import (
    balancing_window,
    criterion_detail,
    fundamental_unit,
    is_field_balanced,
    min_nonunit_norm,
    norm_form_solutions,
    prelim_balanced_criterion,
    roots_of_unity,
    unit_decompose,
    unit_group,
)
from qmahler.arith import is_squarefree


def brute_force_fundamental_unit(d: int):
    """Independent oracle: smallest unit > 1 by scanning the omega coordinate."""
    K = quad_field(d)
    for q in range(1, 100000):
        cands = []
        for target in (-1, 1):
            if K.omega_is_half:
                # (a + q*sqrt(d))/2 with a = 2p + q: a^2 - d q^2 = 4*target
                delta = d * q * q + 4 * target
            else:
                delta = d * q * q + target
            if delta < 0:
                continue
            r = math.isqrt(delta)
            if r * r != delta:
                continue
            if K.omega_is_half:
                if (r - q) % 2:
                    continue
                cands.append(K.element((r - q) // 2, q))
            else:
                cands.append(K.element(r, q))
        if cands:
            return min(cands, key=lambda x: float(x.embedding_surd(0)))
    raise AssertionError("no unit found")


def test_fundamental_unit_paper_values():
    assert str(fundamental_unit(quad_field(3))) == "2+sqrt(3)"
    assert str(fundamental_unit(quad_field(2))) == "1+sqrt(2)"
    assert str(fundamental_unit(quad_field(5))) == "(1+sqrt(5))/2"


def test_fundamental_unit_against_brute_force():
    for d in range(2, 31):
        if not is_squarefree(d):
            continue
        assert fundamental_unit(quad_field(d)) == brute_force_fundamental_unit(d), d


def test_fundamental_unit_properties():
    for d in (2, 3, 5, 7, 13, 46):
        eps = fundamental_unit(quad_field(d))
        assert abs(eps.norm()) == 1
        assert eps.embedding_surd(0).compare_rational(1) > 0
        assert (eps * eps.conjugate()).rational_value() in (1, -1)


def test_roots_of_unity():
    assert len(roots_of_unity(quad_field(-1))) == 4
    assert len(roots_of_unity(quad_field(-3))) == 6
    assert len(roots_of_unity(quad_field(2))) == 2
    assert len(roots_of_unity(QQ)) == 2
    for z in roots_of_unity(quad_field(-3)):
        assert float(weil_height(z)) == 0
        assert z.is_unit


def test_unit_group_shape():
    assert unit_group(quad_field(-7)).rank == 0
    assert unit_group(quad_field(7)).rank == 1
    assert unit_group(QQ).rank == 0
    assert unit_group(quad_field(-1)).torsion_order == 4


def test_unit_decompose():
    K = quad_field(2)
    eps = fundamental_unit(K)
    for m in (-3, -1, 0, 2, 5):
        z, got = unit_decompose(-(eps**m))
        assert got == m and z == -K.one
    z, m = unit_decompose(parse_element("1+sqrt(2)", K))
    assert (z, m) == (K.one, 1)
    assert unit_decompose(K.element(3)) is None
    assert unit_decompose(K.element(1, 1, 2)) is None  # not integral


def test_window_examples():
    K3, K2 = quad_field(3), quad_field(2)
    # any unit has a (singleton) window
    eps3 = fundamental_unit(K3)
    w = balancing_window(eps3**2)
    assert not w.is_empty and w.lo == w.hi == -2
    # the paper's unbalanced witness
    assert balancing_window(parse_element("1+sqrt(3)", K3)).is_empty
    # sqrt(2) is balanced in place: window contains 0
    assert 0 in balancing_window(parse_element("sqrt(2)", K2))


def test_window_correctness_random():
    rng = random.Random(1)
    for d in (2, 3, 7):
        K = quad_field(d)
        eps = fundamental_unit(K)
        for _ in range(60):
            x = K.element(rng.randint(-9, 9), rng.randint(-9, 9))
            if x.is_zero:
                continue
            w = balancing_window(x)
            candidates = list(w) if not w.is_empty else []
            for ell in candidates:
                y = x * eps**ell
                s1, s2 = y.arch_abs_surds()
                assert s1.compare_rational(1) >= 0 and s2.compare_rational(1) >= 0
            for ell in (w.lo - 1, w.hi + 1):
                y = x * eps**ell
                s1, s2 = y.arch_abs_surds()
                assert s1.compare_rational(1) < 0 or s2.compare_rational(1) < 0


def test_window_nonempty_above_norm_threshold():
    # first statement of the rank-1 lemma: log|N(x)| >= [K:Q] h(eps) => window nonempty
    rng = random.Random(2)
    for d in (2, 3, 5, 7):
        K = quad_field(d)
        eps = fundamental_unit(K)
        threshold = float(eps.embedding_surd(0))
        for _ in range(60):
            x = K.element(rng.randint(-20, 20), rng.randint(-20, 20))
            if x.is_zero:
                continue
            if abs(x.norm()) >= threshold:
                assert not balancing_window(x).is_empty, (d, x)


def test_huge_unit_powers_stay_exact():
    # coordinates far beyond float range must not break decomposition,
    # windows, or heights
    K = quad_field(2)
    eps = fundamental_unit(K)
    big = eps**1000
    z, m = unit_decompose(-big)
    assert (z, m) == (-K.one, 1000)
    w = balancing_window(big * K.sqrt_gen)
    assert (w.lo, w.hi) == (-1000, -1000)
    assert abs(float(weil_height(big)) / 1000 - float(weil_height(eps))) < 1e-12


def test_window_requires_integral_input():
    K = quad_field(2)
    with pytest.raises(DomainError):
        balancing_window(K.element(1, 0, 2))
    with pytest.raises(DomainError):
        balancing_window(K.zero)
    with pytest.raises(DomainError):
        balancing_window(quad_field(-1).element(2))


def test_min_nonunit_norm_examples():
    assert min_nonunit_norm(quad_field(2)) == 2
    assert min_nonunit_norm(quad_field(5)) == 4
    assert min_nonunit_norm(quad_field(3)) == 2
    # norm witnesses exist at the reported minimum
    assert norm_form_solutions(quad_field(2), 2)
    assert norm_form_solutions(quad_field(5), 4)


def test_prelim_criterion_examples():
    assert prelim_balanced_criterion(quad_field(5)) is True
    assert prelim_balanced_criterion(quad_field(2)) is False
    assert prelim_balanced_criterion(quad_field(3)) is False
    detail = criterion_detail(quad_field(5))
    # the proof-form criterion holds although the literal 1 < bound fails
    assert detail["criterion_holds"] and not detail["strict_lower_bound_holds"]


def test_balance_verdicts():
    v = is_field_balanced(quad_field(3))
    assert not v.balanced and abs(v.witness.norm()) == 2
    v = is_field_balanced(quad_field(2))
    assert v.balanced and not v.criterion_holds
    for d in (-1, -2, -3, -7, -11, -19, -43, -67, -163):
        assert is_field_balanced(quad_field(d)).balanced
    assert is_field_balanced(QQ).balanced
    v5 = is_field_balanced(quad_field(5))
    assert v5.balanced and v5.criterion_holds


def test_criterion_implies_balanced_up_to_50():
    for d in range(2, 51):
        if not is_squarefree(d):
            continue
        if prelim_balanced_criterion(quad_field(d)):
            assert is_field_balanced(quad_field(d)).balanced, d


def test_norm_form_solutions_are_canonical_and_complete():
    K = quad_field(3)
    sols = norm_form_solutions(K, 2)
    assert len(sols) == 1 and abs(sols[0].norm()) == 2
    Km = quad_field(-5)
    sols = norm_form_solutions(Km, 6)
    assert all(abs(s.norm()) == 6 for s in sols)
    assert norm_form_solutions(Km, 7) == []
