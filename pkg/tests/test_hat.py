import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mupolab import _billiard as kb
from mupolab.geometry import HoleSpec, MushroomSpec, build_boundary, regular_mask
from mupolab.hat import (arc_interval_length, delta_coefficient, ergodic_measure, escape_rate, hat_C,
                         hat_mupo_set, hat_prediction, in_mupo_quadrilateral, island_measure, mean_free_path,
                         mupo_arc_interval)
from mupolab.montecarlo import survivor_phase_map
from mupolab.mupo import enumerate_mupos

STICKY = Fraction(871, 2500)


def sticky_spec(lo=None, eps=0.048):
    rho = math.cos(math.pi * float(STICKY))
    sl = math.hypot(rho, 1.0)
    lo = sl / 2 - eps / 2 if lo is None else lo
    return MushroomSpec.simple(1.0, rho, 1.0, "triangular", HoleSpec("TriangularStemEdge", lo, lo + eps))


def mupos_0815():
    return {(m.s, m.j): m for m in enumerate_mupos(0.815, 100)}


def test_island_measure_rejection():
    spec = MushroomSpec.simple(1.0, 0.5, 1.0, "triangular")
    m = build_boundary(spec)
    rng = np.random.default_rng(11)
    n = 2_000_000
    z = rng.uniform(0, m.perimeter, n)
    s = rng.uniform(-1, 1, n)
    frac = np.count_nonzero(regular_mask(z, s, m)) / n
    A = island_measure(spec)
    assert abs(frac - A) < 3 * math.sqrt(A * (1 - A) / n)


@given(st.floats(0.05, 0.95), st.floats(0.2, 3.0), st.sampled_from(["rectangular", "triangular"]))
def test_measures_sum_to_one(rho, L, kind):
    spec = MushroomSpec.simple(1.0, rho, L, kind)
    A, B = island_measure(spec), ergodic_measure(spec)
    assert 0 < A < 1 and A + B == pytest.approx(1.0, abs=1e-15)


def test_square_interval_length():
    sq = mupos_0815()[(4, 1)]
    expected = math.pi / 2 - 2 * math.acos(math.cos(math.pi / 4) / 0.815)
    assert arc_interval_length(sq, 0.815) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(0.52998, abs=1e-5)


def test_pentagon_has_ten_intervals():
    pent = mupos_0815()[(5, 1)]
    ivs = [mupo_arc_interval(pent, k, 0.815) for k in range(pent.lam * pent.s)]
    assert len(ivs) == 10
    starts = sorted(a for a, _ in ivs)
    gaps = np.diff(starts + [starts[0] + 2 * math.pi])
    assert np.allclose(gaps, 2 * math.pi / 10)
    with pytest.raises(ValueError):
        mupo_arc_interval(pent, 10, 0.815)


@pytest.mark.parametrize("key", [(4, 1), (5, 1), (66, 13)])
def test_interval_points_survive(key):
    m = mupos_0815()[key]
    ell = arc_interval_length(m, 0.815)
    phis, ths = [], []
    for k in range(m.lam * m.s):
        a, _ = mupo_arc_interval(m, k, 0.815)
        for f in (0.1, 0.5, 0.9):
            phis.append((a + f * ell) % (2 * math.pi))
            ths.append(m.theta_sj)
    n = kb.slit_survivors(np.array(phis), np.array(ths), 0.815, 20_000)
    assert np.all(n >= 20_000)
    # and the complement dies quickly
    mid_gap = [(a - 0.5 * (2 * math.pi / (m.lam * m.s) - ell)) % (2 * math.pi)
               for a in (mupo_arc_interval(m, k, 0.815)[0] for k in range(m.lam * m.s))]
    n = kb.slit_survivors(np.array(mid_gap), np.full(len(mid_gap), m.theta_sj), 0.815, 20_000)
    assert np.all(n < 20_000)


def test_quadrilateral_mostly_survives():
    rho, N = 0.815, 100
    m = mupos_0815()[(4, 1)]
    rng = np.random.default_rng(2)
    phi = rng.uniform(0, 2 * math.pi, 200_000)
    ell = arc_interval_length(m, rho)
    psi = m.theta_sj + rng.uniform(-ell / N, ell / N, phi.size)
    ins = in_mupo_quadrilateral(phi, psi, m, rho, N)
    n = kb.slit_survivors(phi[ins], psi[ins], rho, N)
    assert ins.sum() > 100
    assert np.mean(n >= N) > 0.97


def test_phase_map_bands_small():
    pm = survivor_phase_map(0.815, 200, 300_000, seed=4)
    assert pm.phi.size > 0
    assert np.all(pm.theta < math.asin(0.815))
    ms = mupos_0815()
    near = np.zeros(pm.phi.size, bool)
    for m in ms.values():
        near |= np.abs(pm.theta - m.theta_sj) < 0.02
    # survivors sit on the MUPO bands or pile up at the island edge
    edge = pm.theta > math.asin(0.815) - 0.02
    assert np.mean(near | edge) > 0.9


def test_border_mupo_counts_half():
    spec = sticky_spec()
    m = next(x for x in enumerate_mupos(s_max=100, theta_star=STICKY) if (x.s, x.j) == (20, 7))
    full = hat_C(spec, [m])
    half = hat_C(spec, [replace(m, border=True)])
    assert half == pytest.approx(full / 2, rel=1e-14)
    assert full == pytest.approx(m.weight * delta_coefficient(m, spec), rel=1e-14)


def test_hat_C_sticky_value():
    # frozen value of the three strict MUPOs plus the half-weight border orbit
    C = hat_C(sticky_spec(), theta_star=STICKY)
    assert C == pytest.approx(0.01646, rel=1e-3)
    mupos, top, tail = hat_mupo_set(sticky_spec(), theta_star=STICKY)
    assert tail == 0.0 and top == 2500
    assert sorted((m.s, m.j) for m in mupos) == [(20, 7), (66, 23), (376, 131), (2500, 871)]


@pytest.mark.parametrize("eps,lo", [(0.02, 0.1), (0.048, None), (0.1, 0.3)])
def test_hat_C_hole_independent(eps, lo):
    assert hat_C(sticky_spec(lo, eps), theta_star=STICKY) == pytest.approx(
        hat_C(sticky_spec(), theta_star=STICKY), rel=1e-15)


def test_escape_rate_scales_with_eps():
    a = escape_rate(sticky_spec(eps=0.02))
    b = escape_rate(sticky_spec(eps=0.04))
    assert b == pytest.approx(2 * a, rel=1e-14)
    spec = sticky_spec()
    assert a == pytest.approx(0.02 / (mean_free_path(spec) * ergodic_measure(spec)
                                      * build_boundary(spec).perimeter))


def test_mupo_free_has_zero_C():
    from mupolab.contfrac import parse_number
    ts = parse_number("(5+sqrt(2))/23")
    rho = math.cos(math.pi * float(ts))
    spec = MushroomSpec.simple(1.0, rho, 1.0, "triangular", HoleSpec("TriangularStemEdge", 0.4, 0.448))
    pred = hat_prediction(spec, theta_star=ts)
    assert pred.C == 0.0 and pred.mupos == []


def test_prediction_plateau():
    pred = hat_prediction(sticky_spec(), theta_star=STICKY)
    t = np.array([1e5, 1e6])
    assert np.allclose(t * pred.Pe(t), pred.C, rtol=1e-12)
    assert pred.A + pred.B == pytest.approx(1.0)
