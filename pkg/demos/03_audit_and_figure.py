"""Audit the inequality chains on a beta = 2 run, show that a single changed
partial quotient is caught, and draw the last minima with their hyperbolas.

    python demos/03_audit_and_figure.py [output.svg]
"""

import sys

from latexp.audit import Verdict, report_table, run_audit
from latexp.construct import generate_beta, perturb_quotient
from latexp.exactreal import BetaSpec
from latexp.lattice import compute_minima
from latexp.plot import SvgOptions, render_svg

c = generate_beta(BetaSpec(2), 10)
report = run_audit(c, 8)
print(report_table(report))

print("\nNow bump a_5 by one and audit again:")
bumped = run_audit(perturb_quotient(c, 5), 8)
for check, before in zip(bumped.checks, report.checks):
    for v, old in zip(check.verdicts, before.verdicts):
        if old.verdict is Verdict.PASS and v.verdict is Verdict.FAIL:
            print(f"  {check.check_id} now fails at k={v.k}: {v.witness['link']}")
print("overall:", "PASS" if bumped.overall else "FAIL")

out = sys.argv[1] if len(sys.argv) > 1 else "minima.svg"
seq, _ = compute_minima(c, 8)
with open(out, "w", encoding="utf-8") as fh:
    fh.write(render_svg(seq, SvgOptions(log_scale=True)))
print(f"\nWrote {out} (log-scaled view of {len(seq.certified)} certified minima)")
