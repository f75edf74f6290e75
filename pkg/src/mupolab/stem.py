"""Near-bouncing-ball stickiness of rectangular-stem mushrooms.

Small-angle model.  A particle leaves the right stem wall at height x (measured
from the stem bottom, hat base at x = L) with angle theta > 0 towards the hat.
With v = (L - x) / theta it reaches the hat after n = floor(v / 2r) wall
bounces with remaining offset d1 = theta (v - 2 r n); put omega = d1 / (2 R theta)
in (0, rho).  In the hat it makes k in {1, zeta, zeta + 1} arc collisions and
returns with

    theta_f = theta (4 k omega - 2 k rho - 1),    c(omega) = theta / |theta_f|.

It escapes through the hole top h+ after t = v + (L - h+) c / theta + 2R(rho + k + 1).

For each n the three omega windows cut the (x, theta) plane along rays through
(L, 0); the survivor region of window k is bounded by the escape-time
hyperbola and by x = h+.  Their corners A..F are where the hyperbola meets
x = h+ on a window edge, with c-values

    A 2rho+1,  B (2rho+1)/(2zeta rho-1),  C (2zeta rho-1)/(2rho+1),
    D 2zeta rho-1,  E 1/(2zeta rho-1),  F 1/(2rho+1).

Summing over n gives H^2/(2 rho t) int_0^rho int_0^inf min(c/(1-s), 1/s)^2 ds domega
with H = L - h+; the seven sums are this integral cut at s_X = 1/(1 + c_X).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateZeta, InvalidGeometry, OrderingAmbiguous
from .geometry import MushroomSpec, build_boundary

__all__ = [
    "StemCase", "direct_regular_C", "reflection_outcome", "escape_time", "polygon_corners",
    "corner_thresholds", "seven_sums", "core_constant", "stem_C", "exact_area", "polygon_area_sum",
    "printed_core", "printed_sums", "ordering_of", "stem_prediction", "CORNERS",
]

CORNERS = "ABCDEF"


@dataclass(frozen=True)
class StemCase:
    rho: float
    L: float = 1.0
    h_minus: float = 0.0
    h_plus: float = 0.0
    R: float = 1.0
    perimeter: float | None = None
    B: float | None = None

    def __post_init__(self):
        if not 0 < self.rho < 1:
            raise InvalidGeometry(f"rho must lie in (0, 1), got {self.rho}")
        if not 0 <= self.h_minus < self.h_plus < self.L:
            raise InvalidGeometry("need 0 <= h- < h+ < L")

    @property
    def zeta(self) -> int:
        return math.ceil(1.0 / self.rho - 1e-12)

    @property
    def degenerate(self) -> bool:
        return abs(self.rho * self.zeta - 1.0) < 1e-12

    @property
    def H(self) -> float:
        return self.L - self.h_plus

    @property
    def r(self) -> float:
        return self.rho * self.R

    def norm(self) -> float:
        """2 |boundary| B of the parent mushroom."""
        if self.perimeter is None or self.B is None:
            spec = self.spec()
            from .hat import ergodic_measure
            P = build_boundary(spec).perimeter if self.perimeter is None else self.perimeter
            B = ergodic_measure(spec) if self.B is None else self.B
            return 2 * P * B
        return 2 * self.perimeter * self.B

    def spec(self) -> MushroomSpec:
        from .geometry import HoleSpec
        return MushroomSpec.simple(self.R, self.rho, self.L, "rectangular",
                                   HoleSpec("RectStemRightWall", self.h_minus, self.h_plus))

    @classmethod
    def from_spec(cls, spec: MushroomSpec) -> "StemCase":
        if spec.stem.kind != "rectangular" or spec.hole is None:
            raise InvalidGeometry("stem analysis needs a rectangular stem with a hole on its wall")
        from .hat import ergodic_measure
        return cls(spec.rho, spec.L, spec.hole.lo, spec.hole.hi, spec.R,
                   build_boundary(spec).perimeter, ergodic_measure(spec))


# ---------------------------------------------------------------------------
# regular orbits that never reach the hat

def direct_regular_C(case: StemCase) -> float:
    """t * measure of stem-confined survivors: [(2h-)^2 + (L-h+)^2] / (2 |boundary| B).

    Below the hole the orbits moving down see a path 2h- - (x) long and those
    moving up a path h- - x; together with both walls that is (2h-)^2 / t.
    Above the hole, orbits moving down give (L-h+)^2 / t.
    """
    return ((2 * case.h_minus) ** 2 + case.H ** 2) / case.norm()


# ---------------------------------------------------------------------------
# reflection process

def _windows(rho: float, zeta: int):
    """[(omega_lo, omega_hi, k), ...] in omega order."""
    w1 = rho * (rho + 1) / (2 * rho + 1)
    w2 = zeta * rho * rho / (2 * zeta * rho - 1)
    return [(0.0, w1, 1), (w1, w2, zeta + 1), (w2, rho, zeta)]


def _c_values(rho: float, zeta: int) -> dict:
    D = 2 * zeta * rho - 1
    return {"A": 2 * rho + 1, "B": (2 * rho + 1) / D, "C": D / (2 * rho + 1), "D": D, "E": 1 / D,
            "F": 1 / (2 * rho + 1)}


def _corner_window(rho: float, zeta: int) -> dict:
    """Corner -> (omega, k) on the window edge where it sits."""
    w = _windows(rho, zeta)
    return {"A": (w[0][1], 1), "B": (w[1][0], zeta + 1), "C": (w[1][1], zeta + 1),
            "D": (w[2][0], zeta), "E": (rho, zeta), "F": (0.0, 1)}


def _check_degenerate(case: StemCase, strict: bool):
    if case.degenerate:
        if strict:
            raise DegenerateZeta(f"1/rho = {1 / case.rho:.15g} is an integer")
        warnings.warn("rho = 1/zeta: the zeta window is empty; using the continuous limit")


def reflection_outcome(x_i: float, theta_i: float, case: StemCase):
    """(k, theta_f) for a particle leaving the right wall at (x_i, theta_i) towards the hat."""
    if not 0 < theta_i:
        raise ValueError("theta_i must be positive")
    if theta_i > 0.1:
        warnings.warn("small-angle model used above 0.1 rad")
    _check_degenerate(case, strict=False)
    n = math.floor((case.L - x_i) / (2 * case.r * math.tan(theta_i)))
    d1 = case.L - (x_i + 2 * case.r * n * math.tan(theta_i))
    om = d1 / (2 * case.R * theta_i)
    zeta = case.zeta
    w1 = case.rho * (case.rho + 1) / (2 * case.rho + 1)
    w2 = zeta * case.rho ** 2 / (2 * zeta * case.rho - 1)
    k = 1 if om < w1 else (zeta + 1 if om < w2 else zeta)
    theta_f = 2 * k * d1 / case.R - (2 * k * case.rho + 1) * theta_i
    return k, theta_f


def escape_time(x_i: float, theta_i: float, k: int, case: StemCase, theta_f: float | None = None) -> float:
    if theta_f is None:
        theta_f = reflection_outcome(x_i, theta_i, case)[1]
    if theta_f == 0:
        return math.inf
    return (case.L - x_i) / theta_i + case.H / abs(theta_f) + 2 * case.R * (case.rho + k + 1)


# ---------------------------------------------------------------------------
# polygons, corners and thresholds

def polygon_corners(n: int, t: float, case: StemCase) -> dict:
    """Corners of the n-th survivor polygon as (x, theta); G = (L, 0).

    Corner X sits on the window edge omega_X where the escape-time hyperbola
    of its window crosses; nan when the ray misses the hyperbola.
    """
    rho, zeta, R = case.rho, case.zeta, case.R
    cv, cw = _c_values(rho, zeta), _corner_window(rho, zeta)
    out = {}
    for X in CORNERS:
        om, k = cw[X]
        v = 2 * case.r * n + 2 * R * om
        Tp = t - 2 * R * (rho + k + 1)
        if v >= Tp:
            out[X] = (math.nan, math.nan)
            continue
        th = case.H * cv[X] / (Tp - v)
        out[X] = (case.L - v * th, th)
    out["G"] = (case.L, 0.0)
    return out


def corner_thresholds(t: float, case: StemCase) -> dict:
    """n_X = last n whose corner X still lies above the hole top (x > h+), plus the ordering.

    n_X = floor([(t/2R - rho - k - 1)/(1 + c_X) - omega_X] / rho).
    """
    rho, zeta = case.rho, case.zeta
    _check_degenerate(case, strict=False)
    cv, cw = _c_values(rho, zeta), _corner_window(rho, zeta)
    n = {}
    for X in CORNERS:
        om, k = cw[X]
        val = ((t / (2 * case.R) - rho - k - 1) / (1 + cv[X]) - om) / rho
        n[X] = math.floor(val)
    order = ordering_of(rho, n)
    return {"n": n, "ordering": order}


def ordering_of(rho: float, n: dict | None = None, zeta: int | None = None) -> str:
    """'Hat' (A<B<=D<E<=C<F) or 'Tilde' (A<D<=B<C<=E<F).

    Decided from the corner c-values, which fix the asymptotic n-order; a
    supplied threshold dict is checked against the chain.
    """
    zeta = zeta or math.ceil(1.0 / rho - 1e-12)
    D = 2 * zeta * rho - 1
    hat = D * D < 2 * rho + 1
    if n is not None:
        ch = (n["A"] < n["B"] <= n["D"] < n["E"] <= n["C"] < n["F"])
        ct = (n["A"] < n["D"] <= n["B"] < n["C"] <= n["E"] < n["F"])
        if not (ch or ct):
            if abs(rho * zeta - 1) < 1e-9:
                return "Hat" if hat else "Tilde"
            raise OrderingAmbiguous(f"thresholds {n} fit neither chain")
        if ch and not ct:
            return "Hat"
        if ct and not ch:
            return "Tilde"
    return "Hat" if hat else "Tilde"


# ---------------------------------------------------------------------------
# leading-order constants

def _split_points(rho: float, zeta: int):
    cv = _c_values(rho, zeta)
    order = "ABDECF" if ordering_of(rho, zeta=zeta) == "Hat" else "ADBCEF"
    return order, [1.0 / (1.0 + cv[X]) for X in order]


def _c_integrals(a, b, lo, hi):
    """(int 1, int c, int c^2) d omega over (lo, hi), c = 1/|a omega + b| with fixed sign."""
    if hi <= lo:
        return 0.0, 0.0, 0.0
    f_lo, f_hi = a * lo + b, a * hi + b
    sgn = 1.0 if f_lo + f_hi > 0 else -1.0
    i1 = sgn * (math.log(abs(f_hi)) - math.log(abs(f_lo))) / a
    i2 = (1.0 / f_lo - 1.0 / f_hi) / a
    return hi - lo, i1, i2


def _omega_of_c(a, b, sgn, c):
    # |a w + b| = 1/c with sign sgn
    return (sgn / c - b) / a


def _range_integral(rho: float, zeta: int, sa: float, sb: float) -> float:
    """int_0^rho d omega int_sa^sb min(c/(1-s), 1/s)^2 ds (sb may be inf)."""
    tot = 0.0
    for lo, hi, k in _windows(rho, zeta):
        if hi <= lo:
            continue
        a, b = 4.0 * k, -2.0 * k * rho - 1.0
        sgn = 1.0 if (a * lo + b) + (a * hi + b) > 0 else -1.0
        # c at the two ends; s_c = 1/(1+c) monotone in omega on the window
        cuts = [lo, hi]
        for s_cut in (sa, sb):
            if 0 < s_cut < 1:
                w = _omega_of_c(a, b, sgn, 1.0 / s_cut - 1.0)
                if lo < w < hi:
                    cuts.append(w)
        cuts.sort()
        for u0, u1 in zip(cuts[:-1], cuts[1:]):
            if u1 - u0 <= 0:
                continue
            wm = 0.5 * (u0 + u1)
            cm = 1.0 / abs(a * wm + b)
            sc = 1.0 / (1.0 + cm)
            i0, i1, i2 = _c_integrals(a, b, u0, u1)
            inv_sb = 0.0 if math.isinf(sb) else 1.0 / sb
            if sc <= sa:                      # 1/s branch throughout
                tot += i0 * (1.0 / sa - inv_sb)
            elif sc >= sb:                    # c/(1-s) branch throughout
                tot += i2 * (1.0 / (1.0 - sb) - 1.0 / (1.0 - sa))
            else:
                # int_sa^sc c^2/(1-s)^2 + int_sc^sb 1/s^2 with 1/(1-sc) = (1+c)/c, 1/sc = 1+c
                tot += i2 * (1.0 - 1.0 / (1.0 - sa)) + 2.0 * i1 + i0 * (1.0 - inv_sb)
    return tot


def seven_sums(case: StemCase, t: float = 1.0) -> dict:
    """Leading-order values of the seven polygon sums (ordering-dependent split), and their total."""
    _check_degenerate(case, strict=False)
    rho, zeta = case.rho, case.zeta
    order, ss = _split_points(rho, zeta)
    edges = [0.0] + ss + [math.inf]
    f = case.H ** 2 / (2 * rho * t)
    vals = [f * _range_integral(rho, zeta, edges[i], edges[i + 1]) for i in range(7)]
    return {"sums": vals, "total": math.fsum(vals), "ordering": "Hat" if order == "ABDECF" else "Tilde",
            "split": order}


def core_constant(rho: float, H: float = 1.0, zeta: int | None = None) -> float:
    """Closed form of t * (one-wall survivor area):

    H^2 [1/2 + J/rho],  J = ln(2rho+1)/2 + ln((2rho+1)/(2 zeta rho-1))/(2(zeta+1)) + ln(2 zeta rho-1)/(2 zeta).
    """
    zeta = zeta or math.ceil(1.0 / rho - 1e-12)
    D = 2 * zeta * rho - 1
    J = 0.5 * math.log(2 * rho + 1) + math.log((2 * rho + 1) / D) / (2 * (zeta + 1)) + math.log(D) / (2 * zeta)
    return H * H * (0.5 + J / rho)


def stem_C(case: StemCase, include_direct: bool = True) -> float:
    """Coefficient of 1/t from near-bouncing-ball orbits: both walls, normalised, plus the direct term."""
    _check_degenerate(case, strict=False)
    c = 2 * core_constant(case.rho, case.H) / case.norm()
    return c + direct_regular_C(case) if include_direct else c


# ---------------------------------------------------------------------------
# finite-t oracles

def exact_area(t: float, case: StemCase, nodes: int = 24) -> float:
    """t * survivor area (one wall) at finite t, summing the curved n-polygons exactly.

    Each window of each n is integrated in v with Gauss-Legendre after
    splitting at the hyperbola / x = h+ crossing; the n beyond every corner
    contribute the closed tail H^2 / (2 V).
    """
    rho, zeta, R, H = case.rho, case.zeta, case.R, case.H
    r = case.r
    gx, gw = np.polynomial.legendre.leggauss(nodes)
    wins = _windows(rho, zeta)
    Tmin = t - 2 * R * (rho + zeta + 2)
    n_max = int(math.ceil(t / (2 * r))) + 2
    n = np.arange(n_max)
    tot = 0.0
    for lo, hi, k in wins:
        if hi <= lo:
            continue
        Tp = t - 2 * R * (rho + k + 1)
        a, b = 4.0 * k, -2.0 * k * rho - 1.0
        v0 = 2 * r * n + 2 * R * lo
        v1 = 2 * r * n + 2 * R * hi
        # crossing c(v) v = Tp - v: c = 2R / |a (v - 2rn) + 2R b|, quadratic in v
        # solve numerically per n with a few Newton steps from the endpoint guess
        def g(v):
            om = (v - 2 * r * n) / (2 * R)
            c = 1.0 / np.abs(a * om + b)
            return c * v - (Tp - v)
        ga, gb = g(v0), g(v1)
        vc = np.where(np.sign(ga) != np.sign(gb), 0.5 * (v0 + v1), np.nan)
        lo_b, hi_b = v0.copy(), v1.copy()
        for _ in range(60):
            gm = g(vc)
            left = np.sign(gm) == np.sign(ga)
            lo_b = np.where(left, vc, lo_b)
            hi_b = np.where(left, hi_b, vc)
            vc = 0.5 * (lo_b + hi_b)
        pieces = []
        has = ~np.isnan(vc)
        pieces.append((v0, np.where(has, vc, v1)))
        pieces.append((np.where(has, vc, v1), v1))
        for p0, p1 in pieces:
            half = 0.5 * (p1 - p0)
            mid = 0.5 * (p1 + p0)
            v = mid[:, None] + half[:, None] * gx[None, :]
            om = (v - 2 * r * n[:, None]) / (2 * R)
            c = 1.0 / np.abs(a * om + b)
            th1 = np.where(v < Tp, H * c / np.maximum(Tp - v, 1e-300), np.inf)
            th = np.minimum(th1, H / v)
            tot += float(np.sum(half * ((0.5 * th * th) @ gw)))
    V = 2 * r * n_max
    tot += H * H / (2 * V)
    return t * tot


def polygon_area_sum(t: float, case: StemCase) -> float:
    """t * survivor area (one wall) from straight-edged polygons through the corners.

    For every n and window the region is bounded by its two rays from
    G = (L, 0), the chord replacing the escape-time hyperbola, and x = h+.
    With vertices (L - v theta, theta) the fan from G gives the shoelace
    area 1/2 sum theta_i theta_{i+1} (v_{i+1} - v_i).
    """
    rho, zeta, R, H = case.rho, case.zeta, case.R, case.H
    r = case.r
    n_max = int(math.ceil(t / (2 * r))) + 2
    n = np.arange(n_max)
    tot = 0.0
    for lo, hi, k in _windows(rho, zeta):
        if hi <= lo:
            continue
        Tp = t - 2 * R * (rho + k + 1)
        a, b = 4.0 * k, -2.0 * k * rho - 1.0
        va, vb = 2 * r * n + 2 * R * lo, 2 * r * n + 2 * R * hi

        def c_of(v):
            return 1.0 / np.abs(a * (v - 2 * r * n) / (2 * R) + b)

        def th_of(v):
            with np.errstate(divide="ignore"):
                t1 = np.where(v < Tp, H * c_of(v) / np.maximum(Tp - v, 1e-300), np.inf)
                return np.minimum(t1, np.where(v > 0, H / np.where(v > 0, v, 1.0), np.inf))

        def g(v):
            return v * c_of(v) - (Tp - v)

        x0 = va.copy()
        x1 = np.minimum(vb, Tp - 1e-12)
        g0 = g(x0)
        has = (va < Tp) & (g0 * g(x1) < 0)
        for _ in range(80):
            xm = 0.5 * (x0 + x1)
            same = g(xm) * g0 > 0
            x0 = np.where(same, xm, x0)
            x1 = np.where(same, x1, xm)
        vk = np.where(has, 0.5 * (x0 + x1), va)   # kink where the hyperbola meets x = h+
        ta, tk, tb = th_of(va), th_of(vk), th_of(vb)
        tot += 0.5 * float(np.sum(ta * tk * (vk - va) + tk * tb * (vb - vk)))
    V = 2 * r * n_max
    return t * (tot + H * H / (2 * V))


# ---------------------------------------------------------------------------
# the published closed forms, kept for comparison

def printed_core(rho: float, ordering: str | None = None, H: float = 1.0) -> float:
    """The published coefficient form with its tabulated eps_i and exponents (per ordering)."""
    z = math.ceil(1.0 / rho - 1e-12)
    ordering = ordering or ordering_of(rho)
    if ordering == "Hat":
        e = [-2 - 4 * z + 4 * z ** 3, -2 * (1 + z + z ** 2 + 2 * z ** 3 + 6 * z ** 4),
             -12 * z ** 2 - 8 * z ** 3 - 4 * z ** 4 + 8 * z ** 5, 16 * z ** 3 + 16 * z ** 4 + 8 * z ** 5]
        j1, j2 = 1 + 7 * z + 3 * z * z, -6 * z - 2 * z * z
    else:
        e = [8 + 18 * z + 2 * z * z - 8 * z ** 3, 8 + 12 * z - 20 * z * z + 24 * z ** 4,
             -16 * z * z + 8 * z ** 3 + 8 * z ** 4 - 16 * z ** 5, 16 * (z ** 3 + z ** 4)]
        j1, j2 = -4 - 8 * z - 2 * z * z, 6 + 12 * z + 4 * z * z
    num = sum(e[i] * rho ** (i + 1) for i in range(4))
    D = 2 * z * rho - 1
    return H * H * (num / ((2 * rho + 1) * D * D) + j1 * math.log(2 * rho + 1) + j2 * math.log(abs(D))) / (
        4 * z * (1 + z) * rho)


def printed_sums(rho: float, ordering: str | None = None) -> list:
    """The published per-sum leading terms (H = 1, t = 1)."""
    z = math.ceil(1.0 / rho - 1e-12)
    r = rho
    lg = math.log
    ordering = ordering or ordering_of(rho)
    P1 = 1 / (2 * (2 * r + 1))
    P7 = (r + 1) / (2 * r + 1)
    if ordering == "Tilde":
        P2 = 1 / (4 * r) * (((2 - 2 * z) * r + (2 - 4 * z + 2 * z * z) * r * r) / ((2 * z * r - 1) * (2 * r + 1))
                            + lg((2 * r + 1) / (2 * z * r - 1)))
        P3 = 1 / (4 * z * r) * (2 * r * (1 + r + 2 * z * z * r - z * (1 + r)) * (1 - 2 * z * (z * r - 1))
                                / ((1 + 2 * r) * (1 - 2 * z * r) ** 2) + (1 + z) * lg((2 * z * r - 1) ** 2 / (2 * r + 1)))
        P4 = 1 / (4 * z * (1 + z) * r) * (4 * (1 + z) * r * (1 - (z - 1) * r) * (1 + z - z * z + 2 * z ** 3 * r)
                                          / ((1 + 2 * r) * (1 - 2 * z * r) ** 2)
                                          + (1 + 3 * z + z * z) * lg((2 * z * r - 1) ** 2 / (2 * r + 1) ** 2))
        P5, P6 = P3, P2
    else:
        P2 = 1 / (4 * r) * (((4 + 2 * z) * r + (-8 * z - 2 * z * z) * r * r + 4 * z * z * r ** 3)
                            / ((2 * z * r - 1) * (2 * r + 1)) + lg(2 * z * r - 1))
        P6 = 1 / (4 * r) * (2 * r * (z * r - 1) * (z * (2 * r - 1) - 2) / ((1 + 2 * r) * (2 * z * r - 1))
                            + lg(2 * z * r - 1))
        P3 = P5 = math.nan   # printed forms not reconstructible
        P4 = math.nan
    return [P1, P2, P3, P4, P5, P6, P7]


def stem_prediction(spec: MushroomSpec, t: float = 1e4):
    from .hat import SurvivalPrediction, island_measure, escape_rate
    case = StemCase.from_spec(spec)
    A = island_measure(spec)
    th = corner_thresholds(t, case)
    C = stem_C(case)
    return SurvivalPrediction(A, 1 - A, escape_rate(spec), C, "StemBouncingBalls", th["ordering"], case.zeta,
                              extra={"n_thresholds": th["n"], "direct_C": direct_regular_C(case),
                                     "degenerate": case.degenerate})
