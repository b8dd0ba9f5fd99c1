"""Exact t-metric Mahler measures with attaining factorizations.

Over Q and the imaginary quadratic class-number-1 fields the infimum is
attained by a no-cancellation split of the valuation vector of alpha, so the
search is a branch-and-bound over canonical multiset partitions of the prime
slots.  A separate plain-enumeration oracle provides the independent check,
and a restricted search handles the rank-1 infinity case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .arith import factorize
from .classgrp import class_info, minimal_height_generator
from .errors import (
    DomainError,
    GuardExceededError,
    UnsupportedFieldError,
)
from .ideals import (
    FractionalIdealRatio,
    ValuationVector,
    element_valuations,
    unit_ideal,
)
from .qfield import (
    Field,
    FieldElement,
    HeightValue,
    weil_height,
)
from .realnum import (
    Comparison,
    LogExpr,
    RealInterval,
    eval_log_expr,
    interval_rational_power,
)
from .units import fundamental_unit, is_field_balanced, unit_decompose

INF = math.inf
OMEGA_GUARD = 13  # total prime multiplicity cap for the plain oracle
_TIE_MARGIN = 1e-9
# beyond these sizes tie enumeration explodes: fall back to the closed-form
# optima (t <= 1: single factor by subadditivity; t = inf: all singletons)
_LARGE_OMEGA = 24
_LARGE_ITEMS = 14

TParam = Union[Fraction, float]


def parse_t(t: Union[str, int, float, Fraction]) -> TParam:
    if isinstance(t, str):
        if t.strip().lower() in ("inf", "infinity", "oo"):
            return INF
        t = Fraction(t.strip())
    if isinstance(t, float):
        if math.isinf(t):
            return INF
        t = Fraction(t)
    t = Fraction(t)
    if t <= 0:
        raise DomainError("t must be positive")
    return t


@dataclass(frozen=True)
class FactorizationCandidate:
    """Signed valuation vectors per factor (numerator primes >= 0, denominator <= 0)."""

    parts: tuple[ValuationVector, ...]
    unit_exponents: Optional[tuple[int, ...]] = None


@dataclass(frozen=True)
class TMetricResult:
    field: Field
    alpha: FieldElement
    t: TParam
    value: HeightValue
    attaining: FactorizationCandidate
    attaining_elements: tuple[FieldElement, ...]
    unit_factor: Optional[FieldElement]
    optimality_certificate: dict


def _supported_rank0(field: Field) -> None:
    if field.is_rational:
        return
    if field.is_real:
        raise UnsupportedFieldError(
            "finite-t search covers Q and imaginary quadratic fields; "
            "use the rank-1 infinity search for real quadratic fields"
        )
    if not class_info(field).class_number_one:
        raise UnsupportedFieldError("imaginary quadratic field must have class number 1")


@dataclass
class _Item:
    prime: object
    side: int  # +1 numerator, -1 denominator
    mult: int
    log_norm: float  # log N(P) / [K:Q]


def _items_of(field: Field, vec: ValuationVector) -> list[_Item]:
    deg = field.degree
    items = []
    for prime, e in vec.items():
        items.append(
            _Item(prime, 1 if e > 0 else -1, abs(e), math.log(prime.residue_norm) / deg)
        )
    items.sort(key=lambda it: (-it.log_norm, -it.side))
    return items


def _part_measure(items: Sequence[_Item], part: tuple[int, ...]) -> float:
    num = den = 0.0
    for it, c in zip(items, part):
        if c:
            if it.side > 0:
                num += c * it.log_norm
            else:
                den += c * it.log_norm
    return max(num, den)


def _part_max_norm(items: Sequence[_Item], part: tuple[int, ...]) -> int:
    num = den = 1
    for it, c in zip(items, part):
        if c:
            if it.side > 0:
                num *= it.prime.residue_norm**c
            else:
                den *= it.prime.residue_norm**c
    return max(num, den)


def _desc_subvectors(rem: tuple[int, ...], bound: tuple[int, ...]):
    """Nonzero vectors v <= rem componentwise and v <= bound lexicographically,
    in descending lexicographic order."""
    k = len(rem)
    cur = [0] * k

    def go(i: int, tight: bool):
        if i == k:
            if any(cur):
                yield tuple(cur)
            return
        hi = min(rem[i], bound[i]) if tight else rem[i]
        for c in range(hi, -1, -1):
            cur[i] = c
            yield from go(i + 1, tight and c == bound[i])
        cur[i] = 0

    yield from go(0, True)


class _Search:
    """Branch-and-bound over canonical (descending) multiset partitions."""

    def __init__(self, items: list[_Item], t: TParam, max_parts: int):
        self.items = items
        self.t = t
        self.tf = float(t) if t is not INF else INF
        self.max_parts = max_parts
        self.slot_pow = [
            it.log_norm ** self.tf if t is not INF else it.log_norm for it in items
        ]
        self.best_cost = INF
        self.best_parts: list[tuple[int, ...]] = []
        self.ties: list[list[tuple[int, ...]]] = []
        self.nodes = 0

    def seed(self, parts: list[tuple[int, ...]]):
        cost = self._cost(parts)
        if cost < self.best_cost:
            self.best_cost, self.best_parts = cost, parts

    def _cost(self, parts) -> float:
        measures = [_part_measure(self.items, p) for p in parts]
        if self.t is INF:
            return max(measures, default=0.0)
        return sum(m**self.tf for m in measures)

    def _remaining_bound(self, rem: tuple[int, ...]) -> float:
        num = den = 0.0
        if self.t is INF:
            top = 0.0
            for it, r in zip(self.items, rem):
                if r:
                    top = max(top, it.log_norm)
            return top
        if self.tf > 1:
            for it, r, sp in zip(self.items, rem, self.slot_pow):
                if it.side > 0:
                    num += r * sp
                else:
                    den += r * sp
            return max(num, den)
        for it, r in zip(self.items, rem):
            if it.side > 0:
                num += r * it.log_norm
            else:
                den += r * it.log_norm
        return max(num, den) ** self.tf if (num or den) else 0.0

    def run(self):
        rem = tuple(it.mult for it in self.items)
        if not any(rem):
            self.best_cost, self.best_parts = 0.0, []
            return
        self._rec(rem, rem, 0.0, [])

    def _rec(self, rem, bound, partial, parts):
        self.nodes += 1
        if not any(rem):
            cost = partial
            if parts == self.best_parts:
                return
            if cost < self.best_cost - _TIE_MARGIN:
                self.best_cost, self.best_parts = cost, list(parts)
                self.ties = []
            elif cost < self.best_cost:
                if len(self.ties) < 4:
                    self.ties.append(self.best_parts)
                self.best_cost, self.best_parts = cost, list(parts)
            elif cost <= self.best_cost + _TIE_MARGIN and len(self.ties) < 4:
                self.ties.append(list(parts))
            return
        if len(parts) >= self.max_parts:
            return
        lb = max(partial, self._remaining_bound(rem)) if self.t is INF else partial + self._remaining_bound(rem)
        if lb >= self.best_cost + _TIE_MARGIN:
            return
        for part in _desc_subvectors(rem, bound):
            m = _part_measure(self.items, part)
            new_partial = max(partial, m) if self.t is INF else partial + m**self.tf
            if new_partial >= self.best_cost + _TIE_MARGIN:
                continue
            self._rec(
                tuple(r - c for r, c in zip(rem, part)), part, new_partial, parts + [part]
            )


def _exact_value(field: Field, items, parts, t: TParam, bits: int) -> HeightValue:
    """Certified value of a specific candidate (exact log form when possible)."""
    deg = field.degree
    norms = [_part_max_norm(items, p) for p in parts]
    if not norms:
        return HeightValue.zero()
    if t is INF:
        return HeightValue.exact(deg, max(norms))
    if len(norms) == 1:
        return HeightValue.exact(deg, norms[0])
    if t == 1:
        prod = 1
        for n in norms:
            prod *= n
        return HeightValue.exact(deg, prod)
    total = RealInterval.exact(0, bits)
    for n in norms:
        iv = eval_log_expr(LogExpr.log(n, Fraction(1, deg)), bits)
        total = total + interval_rational_power(iv, Fraction(t), bits)
    value = interval_rational_power(total, 1 / Fraction(t), bits)
    return HeightValue(None, None, value)


def _signed_vector(items, part) -> ValuationVector:
    return ValuationVector(
        {it.prime: it.side * c for it, c in zip(items, part) if c}
    )


def _values_tie(a: HeightValue, b: HeightValue, tolerance: float) -> bool:
    """Equal exactly (log forms) or indistinguishable within the tolerance."""
    if a.exact_log is not None and b.exact_log is not None:
        n1, m1 = a.exact_log
        n2, m2 = b.exact_log
        return m1**n2 == m2**n1
    return abs(float(a) - float(b)) <= tolerance


def _materialize_rank0(field: Field, items, part) -> FieldElement:
    num = unit_ideal(field)
    den = unit_ideal(field)
    for it, c in zip(items, part):
        if c:
            if it.side > 0:
                num = num * it.prime.ideal**c
            else:
                den = den * it.prime.ideal**c
    return minimal_height_generator(FractionalIdealRatio.reduced(num, den))


def tmetric(
    field: Field,
    alpha: FieldElement,
    t: Union[str, int, float, Fraction],
    precision_bits: int = 128,
    max_parts: Optional[int] = None,
    tie_tolerance: float = 1e-12,
) -> TMetricResult:
    """m_{K,t}(alpha) for K = Q or imaginary quadratic with class number 1.

    Optimal over all no-cancellation splits of the valuation vector; the
    single-factor and all-singleton candidates seed the branch-and-bound.
    """
    t = parse_t(t)
    _supported_rank0(field)
    if alpha.is_zero:
        raise DomainError("t-metric of zero")
    if alpha.field != field:
        raise DomainError("alpha must lie in the base field")
    vec = element_valuations(alpha)
    items = _items_of(field, vec)
    omega = sum(it.mult for it in items)
    budget = max_parts if max_parts is not None else max(omega, 1)
    large = omega > _LARGE_OMEGA or len(items) > _LARGE_ITEMS
    closed_form = None
    if items and large:
        if t is not INF and t <= 1:
            # cost >= (sum of measures)^t >= single-factor measure^t
            closed_form = ("single-factor optimal for t <= 1 (subadditivity)",
                           [tuple(it.mult for it in items)])
        elif t is INF and budget >= omega:
            # every split's max covers the largest single slot
            singles = []
            for i, it in enumerate(items):
                e = tuple(1 if j == i else 0 for j in range(len(items)))
                singles.extend([e] * it.mult)
            closed_form = ("all-singleton split optimal for t = inf", singles)
        else:
            raise GuardExceededError(
                f"t-metric search too large: omega = {omega}, {len(items)} prime slots"
            )
    if closed_form is None:
        search = _Search(items, t, budget)
        if items:
            total = tuple(it.mult for it in items)
            search.seed([total])  # single factor
            singles = []
            for i, it in enumerate(items):
                e = tuple(1 if j == i else 0 for j in range(len(items)))
                singles.extend([e] * it.mult)
            if len(singles) <= budget:
                search.seed(singles)
        search.run()
        best_parts, nodes, ties = search.best_parts, search.nodes, search.ties
        basis = "branch-and-bound over canonical no-cancellation splits"
    else:
        basis, best_parts = closed_form
        nodes, ties = 0, []
    parts = sorted(best_parts, reverse=True)
    value = _exact_value(field, items, parts, t, precision_bits)
    elements = tuple(_materialize_rank0(field, items, p) for p in parts)
    unit_factor = alpha
    for g in elements:
        unit_factor = unit_factor / g
    if not unit_factor.is_unit:
        raise DomainError("attaining elements do not reproduce alpha up to a unit")
    confirmed_ties = []
    for cand in ties:
        cand_value = _exact_value(field, items, sorted(cand, reverse=True), t, precision_bits)
        if _values_tie(value, cand_value, tie_tolerance):
            confirmed_ties.append([str(_signed_vector(items, p)) for p in cand])
    certificate = {
        "nodes": nodes,
        "max_parts": budget,
        "exhausted": True,
        "basis": basis,
        "seeds": ["single-factor", "all-singletons"],
        "tie_candidates": confirmed_ties,
        "tie_margin": _TIE_MARGIN,
        "tie_tolerance": float(tie_tolerance),
    }
    return TMetricResult(
        field,
        alpha,
        t,
        value,
        FactorizationCandidate(tuple(_signed_vector(items, p) for p in parts)),
        elements,
        unit_factor,
        certificate,
    )


def brute_force_oracle(
    field: Field,
    alpha: FieldElement,
    t: Union[str, int, float, Fraction],
    max_parts: Optional[int] = None,
) -> float:
    """Independent plain-enumeration value of m_{K,t}(alpha): every multiset
    partition of the prime slots is costed, no pruning, no seeds."""
    t = parse_t(t)
    _supported_rank0(field)
    if alpha.is_zero:
        raise DomainError("t-metric of zero")
    deg = field.degree
    if field.is_rational:
        r = alpha.rational_value()
        logs: list[tuple[float, int, int]] = []
        for p, e in factorize(r.numerator).items():
            logs.append((math.log(p), +1, e))
        for p, e in factorize(r.denominator).items():
            logs.append((math.log(p), -1, e))
    else:
        logs = [
            (math.log(pr.residue_norm) / deg, 1 if e > 0 else -1, abs(e))
            for pr, e in element_valuations(alpha).items()
        ]
    omega = sum(e for _, _, e in logs)
    if omega > OMEGA_GUARD:
        raise GuardExceededError(f"oracle guard exceeded: omega = {omega} > {OMEGA_GUARD}")
    if omega == 0:
        return 0.0
    budget = max_parts if max_parts is not None else omega
    mults = tuple(e for _, _, e in logs)
    weights = [(w, s) for w, s, _ in logs]

    def measure(part):
        num = den = 0.0
        for (w, s), c in zip(weights, part):
            if c:
                if s > 0:
                    num += c * w
                else:
                    den += c * w
        return max(num, den)

    best = [INF]

    def rec(rem, bound, parts_measures):
        if not any(rem):
            if t is INF:
                cost = max(parts_measures, default=0.0)
            else:
                tf = float(t)
                cost = sum(m**tf for m in parts_measures) ** (1.0 / tf)
            if cost < best[0]:
                best[0] = cost
            return
        if len(parts_measures) >= budget:
            return
        for part in _desc_subvectors(rem, bound):
            rec(
                tuple(r - c for r, c in zip(rem, part)),
                part,
                parts_measures + [measure(part)],
            )

    rem0 = mults
    rec(rem0, rem0, [])
    return best[0]


def tmetric_infty_rank1(
    field: Field,
    alpha: FieldElement,
    precision_bits: int = 128,
) -> TMetricResult:
    """The restricted in-field infinity search for real quadratic fields of
    class number 1 that are balanced; alpha must not be a unit.

    Parts are realized by minimal-height generators adjusted by unit
    exponents, with the leftover unit factor zeta*eps^l carried explicitly and
    contributing |l| h(eps) to the max when l != 0.  The search space is
    finite (every factor measure is capped by the single-factor value)."""
    if field.is_rational or not field.is_real:
        raise UnsupportedFieldError("rank-1 search requires a real quadratic field")
    if not class_info(field).class_number_one:
        raise UnsupportedFieldError("rank-1 search requires class number 1")
    if not is_field_balanced(field).balanced:
        raise UnsupportedFieldError("rank-1 search requires a balanced field")
    if alpha.is_zero:
        raise DomainError("t-metric of zero")
    if alpha.field != field:
        raise DomainError("alpha must lie in the base field")
    if alpha.is_unit:
        raise UnsupportedFieldError(
            "unit inputs are outside the rank-1 attainment statement"
        )
    eps = fundamental_unit(field)
    h_eps = weil_height(eps)
    vec = element_valuations(alpha)
    items = _items_of(field, vec)
    mults = tuple(it.mult for it in items)

    h_alpha = weil_height(alpha)
    best = {
        "cost": h_alpha,
        "cost_f": float(h_alpha),
        "parts": [mults],
        "exps": [0],
        "gens": None,
        "gamma0": None,
    }
    nodes = 0

    def part_generator(part) -> FieldElement:
        num = unit_ideal(field)
        den = unit_ideal(field)
        for it, c in zip(items, part):
            if c:
                if it.side > 0:
                    num = num * it.prime.ideal**c
                else:
                    den = den * it.prime.ideal**c
        return minimal_height_generator(FractionalIdealRatio.reduced(num, den))

    def exponent_range(g: FieldElement, cap_f: float) -> range:
        h0 = float(weil_height(g))
        slack = max(0.0, cap_f - h0)
        step = float(h_eps)
        width = int(slack / step) + 3
        return range(-width, width + 1)

    # enumerate partitions, then unit exponents per part
    def partitions(rem, bound):
        if not any(rem):
            yield []
            return
        for part in _desc_subvectors(rem, bound):
            for rest in partitions(tuple(r - c for r, c in zip(rem, part)), part):
                yield [part] + rest

    h_eps_f = float(h_eps)
    for parts in partitions(mults, mults) if items else iter([[]]):
        nodes += 1
        if not parts:
            continue
        gens = [part_generator(p) for p in parts]
        prod = field.one
        for g in gens:
            prod = prod * g
        dec = unit_decompose(alpha / prod)
        if dec is None:
            raise DomainError("partition generators do not multiply to alpha mod units")
        _, j0 = dec
        base_heights = [weil_height(g) for g in gens]
        cap_f = best["cost_f"] + _TIE_MARGIN
        ranges = [exponent_range(g, cap_f) for g in gens]

        def assign(i, js, running_max_f):
            nonlocal best
            if running_max_f >= best["cost_f"] + _TIE_MARGIN:
                return
            if i == len(gens):
                ell0 = j0 - sum(js)
                total_f = running_max_f
                if ell0:
                    total_f = max(total_f, abs(ell0) * h_eps_f)
                if total_f >= best["cost_f"] + _TIE_MARGIN:
                    return
                heights = [weil_height(g * eps**j) for g, j in zip(gens, js)]
                if ell0:
                    heights.append(h_eps.scale_degree(abs(ell0)))
                cost = heights[0]
                for h in heights[1:]:
                    if h.compare(cost) is Comparison.GREATER:
                        cost = h
                if cost.compare(best["cost"]) is Comparison.LESS:
                    best = {
                        "cost": cost,
                        "cost_f": float(cost),
                        "parts": list(parts),
                        "exps": list(js),
                        "gens": [g * eps**j for g, j in zip(gens, js)],
                        "gamma0": ell0,
                    }
                return
            for j in ranges[i]:
                hj = float(weil_height(gens[i] * eps**j))
                assign(i + 1, js + [j], max(running_max_f, hj))

        assign(0, [], 0.0)

    if best["gens"] is None:
        # the single-factor incumbent was never beaten
        gens = [alpha]
        exps = [0]
        gamma0_exp = 0
        parts = [mults] if items else []
    else:
        gens, exps, gamma0_exp, parts = (
            best["gens"],
            best["exps"],
            best["gamma0"],
            best["parts"],
        )
    unit_factor = alpha
    for g in gens:
        unit_factor = unit_factor / g
    certificate = {
        "nodes": nodes,
        "attained_in_field": True,
        "basis": "rank-1 restricted search (class number 1, balanced)",
        "gamma0_exponent": gamma0_exp,
        "exhausted": True,
    }
    return TMetricResult(
        field,
        alpha,
        INF,
        best["cost"],
        FactorizationCandidate(
            tuple(_signed_vector(items, p) for p in parts), tuple(exps)
        ),
        tuple(gens),
        unit_factor,
        certificate,
    )
