import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mupolab.errors import InvalidGeometry, MupolabError
from mupolab.geometry import (BirkhoffCoord, HoleSpec, MushroomSpec, ParticleState, Stem, build_boundary,
                              circle_map_step, from_birkhoff, in_regular_region, next_collision, regular_mask,
                              to_birkhoff)


def test_simple_perimeter():
    m = build_boundary(MushroomSpec.simple(1.0, 0.5, 0.5))
    assert m.perimeter == pytest.approx(math.pi + 3, rel=1e-14)
    assert m.area == pytest.approx(math.pi / 2 + 0.5)


def test_triangular_measures_by_rejection():
    spec = MushroomSpec.simple(1.0, 0.4, 1.0, "triangular")
    m = build_boundary(spec)
    slant = math.hypot(0.4, 1.0)
    assert m.perimeter == pytest.approx(math.pi + 2 * (1 - 0.4) + 2 * slant)
    rng = np.random.default_rng(1)
    n = 4_000_000
    x = rng.uniform(-1, 1, n)
    y = rng.uniform(-1, 1, n)
    inside_hat = (y >= 0) & (x * x + y * y <= 1)
    inside_stem = (y < 0) & (np.abs(x) <= 0.4 * (1 + y))
    frac = np.count_nonzero(inside_hat | inside_stem) / n
    se = math.sqrt(frac * (1 - frac) / n)
    assert abs(4 * frac - m.area) < 4 * 4 * se
    assert abs(4 * np.count_nonzero(inside_stem) / n - m.stem_area) < 4 * 4 * se


@pytest.mark.parametrize("kw", [dict(r=1.2), dict(r=0.0), dict(L=-1.0)])
def test_invalid_specs(kw):
    args = dict(R=1.0, r=0.5, L=1.0)
    args.update(kw)
    with pytest.raises(InvalidGeometry):
        MushroomSpec(args["R"], args["r"], Stem("rectangular", args["L"]))


def test_hole_outside_wall():
    with pytest.raises(InvalidGeometry):
        build_boundary(MushroomSpec.simple(1.0, 0.5, 1.0, hole=HoleSpec("RectStemRightWall", 0.9, 1.1)))
    with pytest.raises(InvalidGeometry):
        build_boundary(MushroomSpec.simple(1.0, 0.5, 1.0, hole=HoleSpec("TriangularStemEdge", 0.1, 0.2)))


def test_unsupported_alpha():
    with pytest.raises(MupolabError):
        build_boundary(MushroomSpec.simple(1.0, 0.5, 1.0, alpha=0.4))


def test_birkhoff_origin_convention():
    m = build_boundary(MushroomSpec.simple(1.0, 0.5, 0.5))
    s = from_birkhoff(BirkhoffCoord(0.0, 0.0), m)
    assert (s.x, s.y) == pytest.approx((1.0, 0.0), abs=1e-12)
    assert (s.dx, s.dy) == pytest.approx((-1.0, 0.0), abs=1e-12)


def test_birkhoff_round_trip_bulk():
    m = build_boundary(MushroomSpec.simple(1.0, 0.55, 0.8, "triangular"))
    rng = np.random.default_rng(3)
    worst = 0.0
    for z, s in zip(rng.uniform(0, m.perimeter, 20_000), rng.uniform(-0.999, 0.999, 20_000)):
        # keep away from junctions, where z is ambiguous
        if np.min(np.abs(m.segs[:, 7] - z)) < 1e-6 or m.perimeter - z < 1e-6:
            continue
        c = to_birkhoff(from_birkhoff(BirkhoffCoord(z, s), m), m)
        worst = max(worst, abs(c.z - z), abs(c.sin_theta - s))
    assert worst < 1e-12


@given(st.floats(0.1, 0.9), st.floats(0.2, 2.0), st.sampled_from(["rectangular", "triangular"]),
       st.floats(0.0, 1.0), st.floats(-0.99, 0.99))
def test_birkhoff_round_trip_property(rho, L, kind, u, s):
    m = build_boundary(MushroomSpec.simple(1.0, rho, L, kind))
    z = u * m.perimeter
    if np.min(np.abs(np.append(m.segs[:, 7], m.perimeter) - z)) < 1e-6:
        return
    c = to_birkhoff(from_birkhoff(BirkhoffCoord(z, s), m), m)
    assert c.z == pytest.approx(z, abs=1e-12)
    assert c.sin_theta == pytest.approx(s, abs=1e-12)


def test_flight_conserves_speed_and_time():
    m = build_boundary(MushroomSpec.simple(1.0, 0.5, 1.0))
    st_ = from_birkhoff(BirkhoffCoord(0.3, 0.2), m)
    total = 0.0
    for _ in range(200):
        new, dt, k = next_collision(st_, m)
        assert dt > 0
        assert math.hypot(new.dx, new.dy) == pytest.approx(1.0, abs=1e-12)
        assert math.hypot(new.x - st_.x, new.y - st_.y) == pytest.approx(dt, abs=1e-10)
        total += dt
        st_ = new
    assert st_.time == pytest.approx(total)


def test_square_orbit_returns():
    # (s, j) = (4, 1): chord at tangent distance cos(pi/4) from the centre
    phi, psi = 0.3, math.pi / 4
    for _ in range(4):
        phi, psi = circle_map_step(phi, psi)
    assert phi == pytest.approx(0.3, abs=1e-12)


def test_square_orbit_in_billiard():
    rho = 0.815
    m = build_boundary(MushroomSpec.simple(1.0, rho, 1.0))
    # inscribed square with a vertex at angle 0.1: the two chords that cross the base
    # do so at |x| ~ 0.913 > rho, so the orbit never enters the stem
    u = 0.1
    x0, y0 = math.cos(u), math.sin(u)
    x1, y1 = math.cos(u + math.pi / 2), math.sin(u + math.pi / 2)
    d = math.hypot(x1 - x0, y1 - y0)
    start = ParticleState(x0, y0, (x1 - x0) / d, (y1 - y0) / d, 0.0, 0)
    c0 = to_birkhoff(start, m)
    assert c0.sin_theta == pytest.approx(-math.sin(math.pi / 4)) or c0.sin_theta == pytest.approx(
        math.sin(math.pi / 4))
    st_ = start
    arc_hits = 0
    for _ in range(12):
        st_, _, k = next_collision(st_, m)
        assert m.names[k] in ("arc", "base_left", "base_right")
        if m.names[k] == "arc":
            arc_hits += 1
            c = to_birkhoff(st_, m)
            if abs(c.z - c0.z) < 1e-9 and abs(c.sin_theta - c0.sin_theta) < 1e-9:
                break
    assert arc_hits == 4


def test_circle_map_example():
    assert circle_map_step(0.0, math.pi / 4) == pytest.approx((math.pi / 2, math.pi / 4))


@given(st.floats(0, 2 * math.pi), st.floats(0, math.pi / 2))
def test_circle_map_preserves_angle(phi, psi):
    p2, s2 = circle_map_step(phi, psi)
    assert s2 == psi and 0 <= p2 < 2 * math.pi


def test_regular_region_boundary_case():
    rho = 0.815
    m = build_boundary(MushroomSpec.simple(1.0, rho, 1.0))
    # on the arc, |sin theta| = rho: the chord just touches the stem opening, taken as chaotic
    assert not in_regular_region(BirkhoffCoord(1.0, rho), m)
    assert in_regular_region(BirkhoffCoord(1.0, rho + 1e-6), m)
    assert not in_regular_region(BirkhoffCoord(1.0, rho - 1e-6), m)
    # stem walls are never regular
    z_stem = m.segs[m.names.index("stem_left"), 7] + 0.3
    assert not in_regular_region(BirkhoffCoord(z_stem, 0.99), m)


def test_regular_mask_vectorized_matches_scalar():
    m = build_boundary(MushroomSpec.simple(1.0, 0.6, 1.0, "triangular"))
    rng = np.random.default_rng(5)
    z = rng.uniform(0, m.perimeter, 500)
    s = rng.uniform(-1, 1, 500)
    mask = regular_mask(z, s, m)
    assert all(mask[i] == in_regular_region(BirkhoffCoord(z[i], s[i]), m) for i in range(500))
