"""From a MUPO set to the 1/t tail of the escape-time distribution.

Builds the triangular-stem mushroom, predicts P(t) = exp(-gamma t) + C/t and
compares with a Monte Carlo run. At the default 2e6 particles the plateau
estimate carries a ~30% standard error; 1e7 particles bring it to ~14%.
"""
import math
import os
from fractions import Fraction

import numpy as np

from mupolab import HoleSpec, MushroomSpec
from mupolab.hat import hat_prediction
from mupolab.montecarlo import plateau_estimate, survival_curve
from mupolab.verify import plateau_window

PARTICLES = int(os.environ.get("PARTICLES", 2_000_000))
ts = Fraction(871, 2500)
rho = math.cos(math.pi * float(ts))
sl = math.hypot(rho, 1.0)
spec = MushroomSpec.simple(1.0, rho, 1.0, "triangular", HoleSpec("TriangularStemEdge", sl / 2 - 0.024, sl / 2 + 0.024))

pred = hat_prediction(spec, theta_star=ts)
print(f"island A = {pred.A:.5f}, chaotic B = {pred.B:.5f}, gamma = {pred.gamma_bar:.6f}, C = {pred.C:.5f}")
for m in pred.mupos:
    print(f"  ({m.s},{m.j}) weight {m.weight}{'  (border, half)' if m.border else ''}")

# plateau starts where the exponential has fallen to 1% of C/t
t0, _ = plateau_window(pred.gamma_bar, pred.C)
print(f"\nsimulating {PARTICLES} particles up to t = {10 * t0:.0f} ...")
curve = survival_curve(spec, PARTICLES, 10.05 * t0, bins=60, seed=0)
for t in np.geomspace(10, 10 * t0, 9):
    print(f"  t = {t:9.1f}   simulated t P = {t * curve.survival_at(t):.5f}   predicted {t * pred.Pe(t):.5f}")
est, ci, se = plateau_estimate(curve, t0, 10 * t0)
print(f"plateau over [{t0:.0f}, {10 * t0:.0f}]: {est:.5f} (95% CI {ci[0]:.5f} .. {ci[1]:.5f}) vs C = {pred.C:.5f}")
