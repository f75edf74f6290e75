"""Near-bouncing-ball orbits in a rectangular stem.

Shows the reflection windows, the corner thresholds and ordering, and how the
closed-form constant is approached by the exact finite-t survivor area.
"""
import math

import numpy as np

from mupolab.stem import (StemCase, core_constant, corner_thresholds, exact_area, ordering_of,
                          polygon_area_sum, reflection_outcome, seven_sums, stem_C)

case = StemCase(0.6, 1.0, 0.28, 0.3)
print("rho = 0.6: arc collisions k and return angle for theta_i = 1e-3")
for om in (0.1, 0.3, 0.47, 0.55):
    x = 1.0 - om * 2e-3 - 2 * 0.6 * 3 * math.tan(1e-3)
    k, tf = reflection_outcome(x, 1e-3, case)
    print(f"  omega = {om:.2f}: k = {k}, theta_f = {tf:+.6f}")
th = corner_thresholds(50.0, case)
print("corner thresholds at t = 50:", th["n"], "ordering", th["ordering"])

rho = math.cos((5 + math.sqrt(2)) * math.pi / 23)
mid = StemCase(rho, 1.0, 0.28, 0.3)
core = core_constant(rho, mid.H)
s = seven_sums(mid, 1.0)
print(f"\nrho = {rho:.5f} ({s['ordering']} ordering): core = {core:.6f}, seven sums = {s['total']:.6f}")
for t in (1e3, 1e4, 1e5):
    ea = exact_area(t, mid, nodes=12)
    print(f"  t = {t:.0e}: exact {ea:.6f}  polygons {polygon_area_sum(t, mid):.6f}  rel. gap {(ea - core) / core:+.2e}")
print(f"stem C (both walls, normalised, with stem-confined orbits) = {stem_C(mid):.5f}")

flips = [r for r, q in zip(np.linspace(0.1, 0.99, 300)[:-1], np.linspace(0.1, 0.99, 300)[1:])
         if ordering_of(r) != ordering_of(q)]
print("ordering flips near rho =", ", ".join(f"{r:.3f}" for r in flips))
