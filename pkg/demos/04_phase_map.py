"""Survivors of the circle with a slit, and the quadrilaterals that predict them.

Writes phase_map.csv (phi, sin theta) for plotting and prints how many
survivors sit inside the predicted MUPO neighbourhoods.
"""
import math

import numpy as np

from mupolab.hat import arc_interval_length, in_mupo_quadrilateral
from mupolab.montecarlo import survivor_phase_map
from mupolab.mupo import enumerate_mupos

rho, N = 0.815, 200
pm = survivor_phase_map(rho, N, 1_000_000, seed=0)
pm.to_csv("phase_map.csv")
print(f"{pm.phi.size} of 1e6 points survive {N} chords (written to phase_map.csv)")

hist, edges = np.histogram(pm.theta, bins=30, range=(0, math.asin(rho)))
for h, a in zip(hist, edges):
    print(f"  theta {a:.3f} {'#' * int(60 * h / max(hist.max(), 1))}")

for m in enumerate_mupos(rho, 100):
    ell = arc_interval_length(m, rho)
    band = np.abs(pm.theta - m.theta_sj) < ell / N
    ins = in_mupo_quadrilateral(pm.phi, pm.theta, m, rho, N)
    print(f"({m.s},{m.j}) at theta = {m.theta_sj:.4f}: {band.sum()} survivors in the band, "
          f"{(ins & band).sum() / max(band.sum(), 1):.1%} inside the predicted quadrilaterals")
