"""Which marginally unstable periodic orbits does a hat carry?

Walks through the enumeration at a generic rho, the exact census for a
rational theta*, and the three possible verdicts of the classifier.
"""
import math
from fractions import Fraction

from mupolab import classify, enumerate_mupos
from mupolab.contfrac import convergents, expand, parse_number
from mupolab.mupo import k_bound

print("rho = 0.815, orbits with s <= 919:")
for m in enumerate_mupos(0.815, 919):
    print(f"  (s, j) = ({m.s}, {m.j})  lambda = {m.lam}  theta = {m.theta_sj:.6f}  "
          f"interval [{m.alpha_sj:.6f}, {m.beta_sj:.6f})")
print("raising s_max to 920 adds", [(m.s, m.j) for m in enumerate_mupos(0.815, 920)][-1])

ts = Fraction(871, 2500)
res = classify(2 * ts)
print(f"\ntheta* = {ts}: {res.kind}")
print("  strict set:", [(m.s, m.j) for m in res.set])
print("  border orbits (half weight):", [(m.s, m.j) for m in res.border])

xi = parse_number("2*(5+sqrt(2))/23")
cf = expand(xi)
rho = math.cos(math.pi * float(xi) / 2)
print(f"\n2 theta* = {cf}   (rho = {rho:.6f})")
print("  convergents:", ", ".join(str(c) for c in convergents(cf, 6)))
print(f"  K(95, 95) = {float(k_bound(rho, Fraction(1, 2), 95, 95)):.6f}")
print("  verdict:", classify(xi, Q=95).kind)

golden = parse_number("(sqrt(5)-1)/2")
r = classify(golden)
print(f"\n2 theta* = (sqrt 5 - 1)/2: {r.kind}")
print("  first witnesses:", [(m.s, m.j) for m in r.convergents[:6]])
