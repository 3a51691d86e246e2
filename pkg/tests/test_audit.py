from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from latexp.audit import (
    AuditReport,
    CheckResult,
    KVerdict,
    Power,
    Verdict,
    power_sign,
    report_table,
    report_to_json,
    run_audit,
)
from latexp.cfcore import DepthUnavailable
from latexp.construct import generate_beta, generate_bounded, perturb_quotient
from latexp.exactreal import BetaSpec


@pytest.fixture(scope="module")
def base2():
    return generate_beta(BetaSpec(2), 10)


@pytest.fixture(scope="module")
def report2(base2):
    return run_audit(base2, 8)


def verdicts(report, cid):
    return {v.k: v.verdict for v in report.check(cid).verdicts}


def test_beta2_report(report2):
    assert report2.overall
    k0 = {c.check_id: c.k0 for c in report2.checks}
    assert k0["C4"] == 1
    assert all(k0[c] <= 3 for c in ("C2", "C3", "C5", "C6", "C7"))
    assert not any(c.relapse for c in report2.checks)
    assert verdicts(report2, "C1")[2] is Verdict.PASS
    assert verdicts(report2, "C4")[2] is Verdict.PASS


def test_c1_seed_index(report2):
    # q_1 = 2 = 2 s_0^beta, so the strict upper bound cannot hold at k = 1
    c1 = report2.check("C1")
    first = c1.verdicts[0]
    assert first.k == 1 and first.verdict is Verdict.FAIL
    assert first.witness["link"] == "q_k < 2 s_{k-1}^b"
    assert c1.k0 == 2


def test_rational_beta_audit():
    report = run_audit(generate_beta(BetaSpec(3, 2), 9), 7)
    assert report.overall
    assert report.check("C4").k0 == 1


def test_audit_is_deterministic(base2, report2):
    assert report_to_json(run_audit(base2, 8)) == report_to_json(report2)


@pytest.mark.parametrize("k", range(1, 9))
def test_failure_injection(base2, report2, k):
    bumped = run_audit(perturb_quotient(base2, k), 8)
    flipped = [
        (c.check_id, v.k)
        for c, orig in zip(bumped.checks, report2.checks)
        for v, o in zip(c.verdicts, orig.verdicts)
        if o.verdict is Verdict.PASS and v.verdict is Verdict.FAIL
    ]
    assert flipped
    assert not bumped.overall or bumped.check("C1").k0 > report2.check("C1").k0
    for c in bumped.checks:
        for v in c.verdicts:
            if v.verdict is Verdict.FAIL:
                assert {"link", "left", "right"} <= set(v.witness)


def test_perturbed_needs_lookahead():
    c = perturb_quotient(generate_beta(BetaSpec(2), 6), 2)
    with pytest.raises(DepthUnavailable):
        run_audit(c, 5)


def test_rejects_other_modes():
    with pytest.raises(ValueError):
        run_audit(generate_bounded([1], [2], 10), 5)
    with pytest.raises(ValueError):
        run_audit(generate_beta(BetaSpec(2), 6), 2)


def test_power_sign_examples():
    assert power_sign(Fraction(27), Power(Fraction(1), ((5, Fraction(2)),))) == 1
    assert power_sign(Fraction(8), Power(Fraction(1), ((4, Fraction(3, 2)),))) == 0
    assert power_sign(Fraction(2), Power(Fraction(2), ((1, Fraction(3, 2)),))) == 0
    assert power_sign(Fraction(1, 4), Power(Fraction(1), ((2, Fraction(-2)),))) == 0
    assert power_sign(Fraction(-3), Power(Fraction(1), ((2, Fraction(1, 2)),))) == -1


@given(st.integers(1, 10**12), st.integers(1, 10**6), st.integers(1, 6), st.integers(1, 6))
def test_power_sign_matches_float(x, base, num, den):
    p = Power(Fraction(1), ((base, Fraction(num, den)),))
    exact = power_sign(Fraction(x), p)
    approx = x - base ** (num / den)
    if abs(approx) > 1e-6 * max(x, 1):
        assert exact == (1 if approx > 0 else -1)


def test_k0_and_relapse_rules():
    mk = lambda *vs: CheckResult("CX", tuple(KVerdict(k + 1, v) for k, v in enumerate(vs)))
    P, F, I = Verdict.PASS, Verdict.FAIL, Verdict.INCONCLUSIVE
    assert mk(F, P, P).k0 == 2 and not mk(F, P, P).relapse and mk(F, P, P).ok
    assert mk(P, F, P).k0 == 3 and mk(P, F, P).relapse and not mk(P, F, P).ok
    assert mk(P, P, I).k0 is None and not mk(P, P, I).ok
    report = AuditReport("2/1", 3, (mk(F, F, P),), {"CX": 2})
    assert not report.overall


def test_table_rendering(report2):
    text = report_table(report2)
    assert text.splitlines()[0].startswith("check  k0")
    assert text.rstrip().endswith("overall: PASS")
