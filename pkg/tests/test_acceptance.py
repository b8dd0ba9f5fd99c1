"""Acceptance gate: every criterion at its stated tolerance and budget.

Each test prints one PASS/FAIL line; run with `pytest -v tests/test_acceptance.py`
(or `qmahler verify --suite <name>` for the individual suites).
"""

import time

from qmahler.verify import run_suite


def _run(criterion: str, budget_seconds: float, suite: str, **kwargs):
    start = time.time()
    report = run_suite(suite, **kwargs)
    elapsed = time.time() - start
    status = "PASS" if report.passed and elapsed < budget_seconds else "FAIL"
    print(
        f"criterion {criterion}: {status} — {report.checked} checks, "
        f"{len(report.failures)} failures, {elapsed:.2f}s (budget {budget_seconds:g}s)"
    )
    for failure in report.failures[:10]:
        print(f"  FAIL: {failure}")
    assert report.passed, f"criterion {criterion}: {report.failures[:10]}"
    assert elapsed < budget_seconds, f"criterion {criterion}: {elapsed:.1f}s over budget"


def test_criterion_1_class_number_census():
    """Squarefree d in [-200, -1]: class number 1 exactly nine times."""
    _run("1 (census)", 10, "census")


def test_criterion_2_fundamental_units():
    """d = 3 -> 2+sqrt(3), d = 2 -> 1+sqrt(2), d = 5 -> golden ratio."""
    _run("2 (fundamental units)", 1, "units")


def test_criterion_3_balancedness():
    """Q(sqrt 3) unbalanced with norm-2 witness; Q(sqrt 2) balanced without
    the criterion; all nine imaginary class-number-1 fields balanced."""
    _run("3 (balancedness)", 5, "balance")


def test_criterion_4_refinement_postconditions():
    """1000 randomized refinement instances over Z, Q(i), Q(sqrt -5)."""
    _run("4 (ideal refinement)", 60, "refine", instances=1000)


def test_criterion_5_replacement_certification():
    """1000 randomized replacement instances over Q, Q(i), Q(sqrt -3)."""
    _run("5 (replacement)", 60, "replace", instances=1000)


def test_criterion_6_power_replacement():
    """The P = (2, 1+sqrt(-5)) lambda = 2 instance, independently certified."""
    _run("6 (power replacement)", 5, "power-replace")


def test_criterion_7_tmetric_oracle_equivalence():
    """tmetric == brute-force oracle for all p/q with p*q <= 10^4 and
    t in {1/2, 1, 2, inf}, within 1e-12."""
    _run("7 (t-metric oracle)", 600, "tmetric-oracle", instances=10**4)


def test_criterion_8_metric_axioms():
    """Triangle inequality on 200 random rational pairs (t = 1, 2) and the
    monotone approach of m_t to m_inf for t in {4, 8, 16, 32}."""
    _run("8 (metric axioms)", 300, "tmetric-axioms", instances=200)


def test_criterion_9_heights_and_product_formula():
    """Height axioms and the product formula on 1000 random elements per
    field for d in {-1, -3, 2, 3, 5}."""
    _run("9 (heights/product formula)", 60, "heights", instances=1000)
