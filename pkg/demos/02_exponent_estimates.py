"""Finite-depth estimates of the three exponents for several growth rates.

For beta-mode runs the limiting values are known in closed form, so each
estimate is printed next to its target. Bounded and superexponential runs
show the two ends of the range.

    python demos/02_exponent_estimates.py
"""

from latexp.construct import generate_beta, generate_bounded, generate_superexp
from latexp.exactreal import BetaSpec
from latexp.exponents import (
    EmptySequence,
    omega_lattice,
    omega_number,
    render_err,
    target_weak_uniform,
    weak_uniform,
)
from latexp.lattice import compute_minima


def show(name, construction, depth, target=None):
    seq, _ = compute_minima(construction, depth)
    parts = []
    for label, make in (("omega(theta)", lambda: omega_number(construction.theta, depth)),
                        ("omega(L)", lambda: omega_lattice(seq)),
                        ("weak uniform", lambda: weak_uniform(seq))):
        try:
            est = make()
        except EmptySequence:
            parts.append(f"{label} n/a")
            continue
        parts.append(f"{label} {est.running_stat:.5f} (err {render_err(est.running_err)})")
    suffix = f"   (weak uniform target {float(target):.4f})" if target is not None else ""
    print(f"{name:<22} " + ", ".join(parts) + suffix)


for text in ("3/2", "2", "5/2"):
    beta = BetaSpec.parse(text)
    show(f"beta = {text}, depth 7", generate_beta(beta, 9), 7, target_weak_uniform(beta))

print()
show("bounded 1 / 2, depth 12", generate_bounded([1], [2], 14), 12)
print("  Π stays bounded below here, so the minima stop after a couple of points.")

seq, _ = compute_minima(generate_superexp(6), 4)
print("\nsuperexponential growth, weak-uniform ratio per pair:")
for g in weak_uniform(seq).per_k:
    print(f"  {g.key:>7}  {g.value:.4f}")
print("  Depth 5 needs the tables through step 7, where s_7 has over 10^8 digits.")
