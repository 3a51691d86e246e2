"""Walk through one run: build the pair of continued fractions for beta = 2,
list the successive hyperbolic minima, then confirm the list by brute force.

    python demos/01_minima_walkthrough.py
"""

from latexp.construct import generate_beta
from latexp.exactreal import BetaSpec
from latexp.lattice import candidates, compute_minima, oracle_hyperbolic, point_to_json

beta = BetaSpec(2)
c = generate_beta(beta, 7)

print("Partial quotients grow like a power of the previous denominator:")
for k in range(4):
    print(f"  k={k}  a_k={c.theta.a[k]}  b_k={c.eta.a[k]}  q_k={c.theta.q[k]}  s_k={c.eta.q[k]}")
print(f"  q_7 already has {len(str(c.theta.q[7]))} digits\n")

# Minima need two extra levels of the tables for their enclosures.
seq, lat = compute_minima(c, 5)
print("Hyperbolic minima, ordered by sup-norm (Π² shrinks at every step):")
for i, z in enumerate(seq.points):
    doc = point_to_json(z)
    tag = "certified" if i >= seq.certified_from else "prefix"
    print(f"  {z.label:>3}  |z| in [{doc['supnorm'][0]}, {doc['supnorm'][1]}]  Π² ~ {doc['pi2'][0]}  ({tag})")

bound = 2500
small = [z for z in candidates(lat, 5) if z.supnorm.hi <= bound]
confirmed = [z.label for z in small if oracle_hyperbolic(z, lat, bound)]
print(f"\nBrute force over every lattice point with |z| <= {bound} keeps: {' '.join(confirmed)}")
print("The filter agrees:", confirmed == [z.label for z in seq.points if z in small])
