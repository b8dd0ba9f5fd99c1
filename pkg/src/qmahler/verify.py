"""Randomized property suites runnable from the CLI and the acceptance tests.

Each suite returns a SuiteReport with one entry per failed check; suites are
deterministic for a fixed seed.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable

from .arith import factorize, is_squarefree
from .classgrp import class_info, class_number
from .ideals import (
    ValuationVector,
    primes_above,
    refine_factorization,
)
from .qfield import QQ, Comparison, FieldElement, quad_field, weil_height
from .replace import certify, in_field_data, power_replacement, replacement
from .tmetric import INF, brute_force_oracle, tmetric
from .units import (
    balancing_window,
    fundamental_unit,
    is_field_balanced,
    prelim_balanced_criterion,
    roots_of_unity,
)

CLASS_NUMBER_ONE_D = (-1, -2, -3, -7, -11, -19, -43, -67, -163)


@dataclass
class SuiteReport:
    name: str
    checked: int = 0
    failures: list[str] = dc_field(default_factory=list)
    elapsed: float = 0.0
    notes: list[str] = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, message: str):
        self.checked += 1
        if not ok:
            self.failures.append(message)


def _timed(fn: Callable[[SuiteReport], None], name: str) -> SuiteReport:
    report = SuiteReport(name)
    start = time.time()
    fn(report)
    report.elapsed = time.time() - start
    return report


# -- suite: census -----------------------------------------------------------


def suite_census(seed: int = 0, instances: int = 0) -> SuiteReport:
    """Imaginary quadratic class-number-1 fields in [-200, -1]."""

    def run(rep: SuiteReport):
        found = []
        for d in range(-200, 0):
            if not is_squarefree(d):
                continue
            info = class_info(quad_field(d))
            rep.check(
                info.class_number == class_number(quad_field(d)),
                f"d={d}: cached class number mismatch",
            )
            if info.class_number_one:
                found.append(d)
        rep.check(
            tuple(sorted(found)) == tuple(sorted(CLASS_NUMBER_ONE_D)),
            f"census mismatch: {sorted(found)}",
        )

    return _timed(run, "census")


# -- suite: units ------------------------------------------------------------


def suite_units(seed: int = 0, instances: int = 40) -> SuiteReport:
    def run(rep: SuiteReport):
        expected = {3: "2+sqrt(3)", 2: "1+sqrt(2)", 5: "(1+sqrt(5))/2"}
        for d, text in expected.items():
            eps = fundamental_unit(quad_field(d))
            rep.check(str(eps) == text, f"fundamental unit d={d}: got {eps}")
        for d in (2, 3, 5, 6, 7, 10, 11, 13, 46):
            K = quad_field(d)
            eps = fundamental_unit(K)
            rep.check(abs(eps.norm()) == 1, f"d={d}: unit norm {eps.norm()}")
            s = float(eps.embedding_surd(0))
            rep.check(s > 1, f"d={d}: sigma1(eps) = {s} <= 1")
            # Pell minimality: no smaller unit > 1 with small coordinates
            bound = min(64, int(abs(eps.p)) + int(abs(eps.q)) + 1)
            for a in range(-bound, bound + 1):
                for b in range(0, bound + 1):
                    x = K.element(a, b)
                    if x.is_zero or abs(x.norm()) != 1:
                        continue
                    v = float(x.embedding_surd(0))
                    rep.check(
                        not (1 < v < s - 1e-9),
                        f"d={d}: smaller unit {x} than {eps}",
                    )

    return _timed(run, "units")


# -- suite: balance ----------------------------------------------------------


def suite_balance(seed: int = 0, instances: int = 0) -> SuiteReport:
    def run(rep: SuiteReport):
        v3 = is_field_balanced(quad_field(3))
        rep.check(not v3.balanced, "Q(sqrt 3) should be unbalanced")
        rep.check(
            v3.witness is not None and abs(v3.witness.norm()) == 2,
            f"witness norm: {v3.witness and v3.witness.norm()}",
        )
        rep.check(
            balancing_window(v3.witness).is_empty, "witness window must be empty"
        )
        v2 = is_field_balanced(quad_field(2))
        rep.check(v2.balanced and not v2.criterion_holds,
                  f"Q(sqrt 2): balanced={v2.balanced} criterion={v2.criterion_holds}")
        for d in CLASS_NUMBER_ONE_D:
            rep.check(
                is_field_balanced(quad_field(d)).balanced, f"d={d} should be balanced"
            )
        rep.check(prelim_balanced_criterion(quad_field(5)), "golden ratio criterion")
        # criterion implies balanced on 2 <= d <= 50
        for d in range(2, 51):
            if not is_squarefree(d):
                continue
            if prelim_balanced_criterion(quad_field(d)):
                rep.check(
                    is_field_balanced(quad_field(d)).balanced,
                    f"criterion held but d={d} not balanced",
                )

    return _timed(run, "balance")


# -- suite: refine (ideal refinement postconditions) -------------------------


def _random_vector(rng: random.Random, primes, max_norm: int) -> ValuationVector:
    entries = {}
    norm = 1
    for _ in range(rng.randint(1, 4)):
        p = rng.choice(primes)
        if norm * p.residue_norm > max_norm:
            continue
        entries[p] = entries.get(p, 0) + 1
        norm *= p.residue_norm
    return ValuationVector(entries)


def _field_primes(field, limit=14):
    out = []
    for p in (2, 3, 5, 7, 11, 13):
        out.extend(primes_above(field, p))
    return out


def suite_refine(seed: int = 0, instances: int = 1000) -> SuiteReport:
    fields = (QQ, quad_field(-1), quad_field(-5))

    def run(rep: SuiteReport):
        rng = random.Random(seed)
        for k in range(instances):
            field = fields[k % len(fields)]
            primes = _field_primes(field)
            vec_i = _random_vector(rng, primes, 10**4)
            ideal = vec_i.to_ideal(field)
            n = rng.randint(1, 4)
            # distribute the exponents of I among parts, then add extra factors
            part_vecs = [dict() for _ in range(n)]
            for p, e in vec_i.items():
                for _ in range(e):
                    t = rng.randrange(n)
                    part_vecs[t][p] = part_vecs[t].get(p, 0) + 1
            for t in range(n):
                if rng.random() < 0.5:
                    p = rng.choice(primes)
                    part_vecs[t][p] = part_vecs[t].get(p, 0) + 1
            parts = [ValuationVector(v).to_ideal(field) for v in part_vecs]
            out = refine_factorization(ideal, parts)
            prod = out[0]
            for i_n in out[1:]:
                prod = prod * i_n
            rep.check(prod == ideal, f"[{k}] product != I over {field}")
            for i_n, j_n in zip(out, parts):
                rep.check(i_n.contains(j_n), f"[{k}] J_n not inside I_n over {field}")
            # valuation-space oracle for the same recipe
            remaining = dict(vec_i.items())
            for i_n, j_vec in zip(out, part_vecs):
                expect = {}
                for p, e in remaining.items():
                    m = min(j_vec.get(p, 0), e)
                    if m:
                        expect[p] = m
                rep.check(
                    i_n.factor() == ValuationVector(expect),
                    f"[{k}] valuation oracle mismatch over {field}",
                )
                for p, m in expect.items():
                    remaining[p] = remaining[p] - m
            # divisor enumeration crosscheck on small instances (any field)
            if sum(vec_i.values()) <= 4:
                got = tuple(i.factor() for i in out)
                valid = _vector_divisor_tuples(
                    vec_i, [ValuationVector(v) for v in part_vecs]
                )
                rep.check(
                    got in valid,
                    f"[{k}] refinement not among enumerated factorizations over {field}",
                )

    return _timed(run, "refine")


def _vector_divisor_tuples(
    target: ValuationVector, part_vecs: list[ValuationVector]
) -> set[tuple[ValuationVector, ...]]:
    """All divisor tuples (A_1..A_N) with prod A_n = target and J_n inside A_n,
    enumerated purely in exponent space (independent of the HNF arithmetic)."""
    primes = list(target)
    out: set[tuple[ValuationVector, ...]] = set()

    def subvectors(bound: dict):
        vecs = [dict()]
        for p in primes:
            vecs = [
                {**v, p: e} if e else v
                for v in vecs
                for e in range(bound.get(p, 0) + 1)
            ]
        return vecs

    def rec(i, remaining, chosen):
        if i == len(part_vecs):
            if not any(remaining.values()):
                out.add(tuple(chosen))
            return
        for v in subvectors(remaining):
            vec = ValuationVector(v)
            # J_n inside A_n means every exponent of A_n is <= that of J_n
            if all(vec.get(p) <= part_vecs[i].get(p) for p in vec):
                rec(
                    i + 1,
                    {p: remaining.get(p, 0) - vec.get(p) for p in primes},
                    chosen + [vec],
                )

    rec(0, dict(target.items()), [])
    return out


# -- suite: replace ----------------------------------------------------------


def _random_element(rng: random.Random, field, span=6, max_den=4) -> FieldElement:
    while True:
        if field.is_rational:
            p = rng.randint(-span, span)
            den = rng.randint(1, max_den)
            x = field.element(p, 0, den)
        else:
            p, q = rng.randint(-span, span), rng.randint(-span, span)
            den = rng.randint(1, max_den)
            x = field.element(p, q, den)
        if not x.is_zero:
            return x


def suite_replace(seed: int = 0, instances: int = 1000) -> SuiteReport:
    fields = (QQ, quad_field(-1), quad_field(-3))

    def run(rep: SuiteReport):
        rng = random.Random(seed)
        for k in range(instances):
            field = fields[k % len(fields)]
            n = rng.randint(1, 4)
            factors = [_random_element(rng, field) for _ in range(n)]
            alpha = field.one
            for f in factors:
                alpha = alpha * f
            data = in_field_data(factors)
            res = replacement(field, alpha, data)
            report = certify(res)
            rep.check(report.all_passed, f"[{k}] {field}: {report.failures()}")
            for cert in res.certificates:
                rep.check(cert.exact, f"[{k}] {field}: non-exact height comparison")
            # aggregate bound
            total_h = res.certificates[0].height
            total_b = res.certificates[0].bound
            for c in res.certificates[1:]:
                total_h = total_h + c.height
                total_b = total_b + c.bound
            rep.check(
                total_h.compare(total_b) is not Comparison.GREATER,
                f"[{k}] aggregate height bound failed",
            )

    return _timed(run, "replace")


# -- suite: power-replace ----------------------------------------------------


def suite_power_replace(seed: int = 0, instances: int = 10) -> SuiteReport:
    def run(rep: SuiteReport):
        K = quad_field(-5)
        rep.check(class_number(K) == 2, "class number of Q(sqrt(-5))")
        alpha = K.element(2)
        f1 = K.element(1, 1)  # 1 + sqrt(-5)
        f2 = alpha / f1
        data = in_field_data([f1, f2])
        res = power_replacement(K, 2, alpha, data)
        report = certify(res)
        rep.check(report.all_passed, f"P-instance: {report.failures()}")
        for g in res.gamma_lambda_values:
            rep.check(g.field == K, "gamma^lambda must lie in K")
        prod = res.gamma0_lambda
        for g in res.gamma_lambda_values:
            prod = prod * g
        rep.check(prod == alpha**2, "lambda-power product identity")
        for ideal in res.numerators:
            from .classgrp import is_principal

            rep.check(is_principal(ideal) is not None, f"{ideal} not principal")
        # random in-field instances with lambda = 2
        rng = random.Random(seed)
        for k in range(instances):
            factors = [_random_element(rng, K, span=4, max_den=3) for _ in range(rng.randint(1, 3))]
            alpha = K.one
            for f in factors:
                alpha = alpha * f
            res = power_replacement(K, 2, alpha, in_field_data(factors))
            rep.check(certify(res).all_passed, f"[{k}] power certificate failed")

    return _timed(run, "power-replace")


# -- suite: tmetric oracle equivalence ---------------------------------------


def suite_tmetric_oracle(
    seed: int = 0, instances: int = 10**4, ts=(Fraction(1, 2), Fraction(1), Fraction(2), INF)
) -> SuiteReport:
    """tmetric == brute_force_oracle for all p/q with p*q <= instances."""

    def run(rep: SuiteReport):
        for m in range(1, instances + 1):
            fac = factorize(m)
            primes = list(fac)
            for mask in range(1 << len(primes)):
                p = q = 1
                for i, pr in enumerate(primes):
                    if mask >> i & 1:
                        q *= pr ** fac[pr]
                    else:
                        p *= pr ** fac[pr]
                alpha = QQ.from_fraction(Fraction(p, q))
                for t in ts:
                    got = float(tmetric(QQ, alpha, t).value)
                    want = brute_force_oracle(QQ, alpha, t)
                    rep.check(
                        abs(got - want) <= 1e-12,
                        f"{p}/{q} t={t}: {got} vs {want}",
                    )

    return _timed(run, "tmetric-oracle")


# -- suite: tmetric axioms ---------------------------------------------------


def suite_tmetric_axioms(seed: int = 0, instances: int = 200) -> SuiteReport:
    def run(rep: SuiteReport):
        rng = random.Random(seed)

        def rand_rational():
            while True:
                p = rng.randint(-60, 60)
                q = rng.randint(1, 60)
                if p:
                    return QQ.from_fraction(Fraction(p, q))

        for k in range(instances):
            a, b = rand_rational(), rand_rational()
            ab = a * b
            for t in (Fraction(1), Fraction(2)):
                tf = float(t)
                va = float(tmetric(QQ, a, t).value) ** tf
                vb = float(tmetric(QQ, b, t).value) ** tf
                vab = float(tmetric(QQ, ab, t).value) ** tf
                rep.check(
                    vab <= va + vb + 1e-9,
                    f"[{k}] triangle t={t}: {vab} > {va} + {vb}",
                )
        for k in range(20):
            alpha = rand_rational()
            vals = [float(tmetric(QQ, alpha, Fraction(t)).value) for t in (4, 8, 16, 32)]
            vinf = float(tmetric(QQ, alpha, INF).value)
            for i in range(len(vals) - 1):
                rep.check(
                    vals[i] >= vals[i + 1] - 1e-9,
                    f"[{k}] m_t not non-increasing: {vals}",
                )
            rep.check(
                vals[-1] >= vinf - 1e-9 and all(v >= vinf - 1e-9 for v in vals),
                f"[{k}] m_t dipped below m_inf: {vals} vs {vinf}",
            )
            rep.check(
                float(tmetric(QQ, alpha, Fraction(2)).value)
                <= float(weil_height(alpha)) * (1 if alpha.is_rational_value else 2) + 1e-9,
                f"[{k}] m_t exceeded m_K",
            )

    return _timed(run, "tmetric-axioms")


# -- suite: heights / product formula ----------------------------------------


def suite_heights(seed: int = 0, instances: int = 1000) -> SuiteReport:
    fields = tuple(quad_field(d) for d in (-1, -3, 2, 3, 5))

    def run(rep: SuiteReport):
        rng = random.Random(seed)
        from .qfield import abs_values

        for field in fields:
            for k in range(instances):
                x = _random_element(rng, field, span=9, max_den=6)
                hx = weil_height(x)
                # product formula: prod over places encloses 1
                if k % 5 == 0:
                    lo = hi = Fraction(1)
                    for _, iv in abs_values(x, 64):
                        lo *= iv.lo
                        hi *= iv.hi
                    rep.check(
                        lo <= 1 <= hi, f"{field}[{k}]: product formula [{float(lo)}, {float(hi)}]"
                    )
                # (1) h(x^n) = |n| h(x)
                n = rng.choice((-3, -2, -1, 2, 3))
                rep.check(
                    weil_height(x**n).compare(hx.scale_degree(abs(n))) is Comparison.TIE,
                    f"{field}[{k}]: h(x^{n}) != |n| h(x) for x = {x}",
                )
                # (2) h(xy) <= h(x) + h(y)
                y = _random_element(rng, field, span=9, max_den=6)
                rep.check(
                    weil_height(x * y).compare(hx + weil_height(y))
                    is not Comparison.GREATER,
                    f"{field}[{k}]: h(xy) > h(x) + h(y) for {x}, {y}",
                )
                # (3) conjugation invariance
                rep.check(
                    weil_height(x.conjugate()).compare(hx) is Comparison.TIE,
                    f"{field}[{k}]: h(conj) != h for {x}",
                )
                # (4) torsion invariance
                zeta = rng.choice(roots_of_unity(field))
                rep.check(
                    weil_height(x * zeta).compare(hx) is Comparison.TIE,
                    f"{field}[{k}]: h(zeta x) != h(x) for {x}",
                )
                if not field.is_real:
                    rep.check(hx.is_exact, f"{field}[{k}]: height not exact")

    return _timed(run, "heights")


SUITES: dict[str, Callable[..., SuiteReport]] = {
    "census": suite_census,
    "units": suite_units,
    "balance": suite_balance,
    "refine": suite_refine,
    "replace": suite_replace,
    "power-replace": suite_power_replace,
    "tmetric-oracle": suite_tmetric_oracle,
    "tmetric-axioms": suite_tmetric_axioms,
    "heights": suite_heights,
}


def run_suite(name: str, **kwargs) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; available: {', '.join(sorted(SUITES))}")
    return SUITES[name](**kwargs)
