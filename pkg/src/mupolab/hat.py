"""Survival asymptotics for mushrooms whose only stickiness is the hat MUPOs.

P_e(t) = (P(t) - A) / B ~ exp(-gamma t) + C / t.  All measures are taken with
respect to the Birkhoff measure (2 |boundary|)^-1 dz dsin(theta).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp
import numpy as np

from .contfrac import QuadraticSurd, expand, expand_float
from .errors import HoleInIsland, NotAMupoOrientation, TailNotConverged, UnsupportedAlpha
from .geometry import MushroomSpec, build_boundary
from .mupo import (ExactRho, FinitelySticky, MupoFreeCertified, Mupo, classify, enumerate_mupos, k_bound,
                   pq_to_sj, q_min, _check_pq, _mupo_from_sj)

__all__ = [
    "SurvivalPrediction", "island_measure", "ergodic_measure", "mean_free_path", "escape_rate",
    "mupo_arc_interval", "delta_sj", "delta_coefficient", "hat_C", "hat_mupo_set", "predict_Pe",
    "hat_prediction", "in_mupo_quadrilateral",
]


@dataclass
class SurvivalPrediction:
    A: float
    B: float
    gamma_bar: float
    C: float
    source: str = "HatMupos"            # HatMupos | StemBouncingBalls | Combined
    ordering: str | None = None         # Hat | Tilde (stem case)
    zeta: int | None = None
    mupos: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def Pe(self, t):
        return predict_Pe(self, t)

    def to_json(self) -> dict:
        d = {"A": self.A, "B": self.B, "gamma_bar": self.gamma_bar, "C": self.C, "source": self.source,
             "mupos": [m.to_json() if hasattr(m, "to_json") else m for m in self.mupos]}
        if self.ordering is not None:
            d["ordering"] = self.ordering
        if self.zeta is not None:
            d["zeta"] = self.zeta
        d.update(self.extra)
        return d


def _semicircle(spec: MushroomSpec):
    if abs(spec.alpha - 0.5) > 1e-15:
        raise UnsupportedAlpha("closed forms hold for the semicircular hat only")


def _perimeter(spec: MushroomSpec) -> float:
    return build_boundary(spec).perimeter


def island_measure(spec: MushroomSpec) -> float:
    """Birkhoff measure of the integrable island (arc plus hat-base parts)."""
    _semicircle(spec)
    R, rho = spec.R, spec.rho
    P = _perimeter(spec)
    return 4.0 / (2.0 * P) * (R * math.sqrt(1 - rho * rho) - rho * R * math.acos(rho)
                              + 0.5 * math.pi * R * (1 - rho))


def ergodic_measure(spec: MushroomSpec) -> float:
    return 1.0 - island_measure(spec)


def mean_free_path(spec: MushroomSpec) -> float:
    """Mean flight time between collisions on the chaotic component (unit speed)."""
    _semicircle(spec)
    R, rho = spec.R, spec.rho
    m = build_boundary(spec)
    B = ergodic_measure(spec)
    return math.pi * (m.stem_area + R * R * math.asin(rho) + rho * R * R * math.sqrt(1 - rho * rho)) / (B * m.perimeter)


def escape_rate(spec: MushroomSpec, eps: float | None = None) -> float:
    """gamma = eps / (<tau> B |boundary|) for a small hole of size eps."""
    if eps is None:
        if spec.hole is None:
            raise ValueError("spec has no hole and no eps was given")
        eps = spec.hole.eps
        if spec.hole.wall not in ("RectStemRightWall", "TriangularStemEdge"):
            raise HoleInIsland("hole must sit on a stem wall")
    m = build_boundary(spec)
    return eps / (mean_free_path(spec) * ergodic_measure(spec) * m.perimeter)


# ---------------------------------------------------------------------------
# MUPO neighbourhoods in the circle-with-slit picture

def _sin_theta(m: Mupo) -> float:
    return math.cos(m.j * math.pi / m.s)


def mupo_arc_interval(m: Mupo, k: int, rho: float) -> tuple[float, float]:
    """k-th arc interval (phi1, phi2), angles mod 2 pi, on which (phi, theta_sj) is the MUPO.

    phi runs anticlockwise from the slit direction.  A chord leaving phi has
    its midpoint at phi + pi j / s and crosses the slit line at distance
    sin(theta) / |cos(midpoint)| from the centre, so the midpoints must stay
    arccos(sin(theta) / rho) away from 0 and pi.
    """
    if not 0 <= k < m.lam * m.s:
        raise ValueError(f"k must lie in [0, {m.lam * m.s})")
    st = _sin_theta(m)
    if st > rho * (1 + 1e-15):
        raise NotAMupoOrientation(f"sin(theta)={st:.17g} exceeds rho={rho:.17g}")
    ac = math.acos(min(st / rho, 1.0))
    step = 2 * math.pi / (m.lam * m.s)
    k0 = (m.lam + 2) * m.s // 4 - 1      # keeps k aligned with the usual labelling
    phi1 = -math.pi * m.j / m.s + ac + (k + k0) * step
    two_pi = 2 * math.pi
    return phi1 % two_pi, (phi1 + step - 2 * ac) % two_pi


def arc_interval_length(m: Mupo, rho: float) -> float:
    st = _sin_theta(m)
    if st > rho * (1 + 1e-15):
        raise NotAMupoOrientation(f"sin(theta)={st:.17g} exceeds rho={rho:.17g}")
    return 2 * math.pi / (m.lam * m.s) - 2 * math.acos(min(st / rho, 1.0))


def in_mupo_quadrilateral(phi, psi, m: Mupo, rho: float, N: int) -> np.ndarray:
    """True where (phi, psi) keeps clear of the slit for N chords near the MUPO m.

    Off the orbit angle by d = psi - theta_sj the chord midpoints turn by
    -2d per chord, so the midpoint offset u inside the allowed interval of
    length l(psi) must satisfy u, u - 2(N-1)d in (0, l(psi)).
    """
    phi = np.asarray(phi, dtype=float)
    psi = np.asarray(psi, dtype=float)
    step = 2 * math.pi / (m.lam * m.s)
    ratio = np.sin(psi) / rho
    ok = ratio <= 1.0
    ac = np.arccos(np.minimum(ratio, 1.0))
    ell = step - 2 * ac
    u = np.mod(phi + 0.5 * math.pi - psi - ac, step)
    u_end = u - 2 * (N - 1) * (psi - m.theta_sj)
    return ok & (u < ell) & (u_end > 0) & (u_end < ell)


def delta_coefficient(m: Mupo, spec: MushroomSpec, B: float | None = None, P: float | None = None) -> float:
    """t * Delta_sj: survivor measure of one arc quadrilateral (both sides of the orbit).

    Area in (phi, sin theta) is R^2 l^2 cos^2(theta) / t with l the arc interval
    length; normalised by 2 |boundary| B.
    """
    R = spec.R
    B = ergodic_measure(spec) if B is None else B
    P = _perimeter(spec) if P is None else P
    l = arc_interval_length(m, spec.rho)
    c = math.cos(m.theta_sj)
    return R * R * l * l * c * c / (2.0 * P * B)


def delta_sj(m: Mupo, spec: MushroomSpec, t: float) -> float:
    return delta_coefficient(m, spec) / t


# ---------------------------------------------------------------------------
# MUPO set and the 1/t constant

def _scan_beyond(er: ExactRho, s_max: int, q_cap: int = 10 ** 18, dps: int = 80, scan: int = 200_000):
    """MUPOs with s > s_max, found among the fractions (u p_{n-1} + c p_n)/(u q_{n-1} + c q_n) of xi = 2 theta*.

    Any solution of |xi - p/q| < K/q^2 has this form with u <= 2K + 1; the
    K(Q, Q) bound (Q = s_max/2) fixes U.  c is scanned inwards from both ends
    of [0, a_{n+1}] while the linearised interval length stays positive.
    Returns (mupos, q_reached).
    """
    Q = max(s_max // 2, 2)
    rho = er.rho
    if Q <= q_min(rho):
        raise TailNotConverged(f"s_max={s_max} below the range of the remainder estimate")
    K = float(k_bound(rho, Fraction(1, 2), Q, Q))
    U = int(math.ceil(2 * K)) + 1
    half = Fraction(1, 2)
    found = {}
    with mp.workdps(dps):
        xi = 2 * er.ts_mpf(dps)
        tan_ts = float(mp.tan(mp.pi * xi / 2))

        def alive(p, q):
            # one-sided and within the linearised length bound; generous by 2x
            d = float((mp.mpf(p) / q - xi) / 2)
            s, j = pq_to_sj(p, q)
            lam = 1 if s % 2 == 0 else 2
            return d >= 0 and 2 * math.sqrt(max(2 * math.pi * tan_ts * d, 0.0)) < 2 * 2 * math.pi / (lam * s)

        def test(p, q):
            if math.gcd(p, q) != 1:
                return
            s, j = pq_to_sj(p, q)
            if s <= s_max or s < 3 or (s, j) in found:
                return
            ok, border, margin = _check_pq(er, half, p, q)
            if ok:
                found[(s, j)] = _mupo_from_sj(er, s, j, border, margin)

        a0 = int(mp.floor(xi))
        frac = xi - a0
        pm, qm, pn, qn = 1, 0, a0, 1
        while qn < q_cap:
            exact_end = frac < mp.mpf(10) ** (-dps + 10)
            if exact_end:
                test(pn, qn)
                break
            y = 1 / frac
            a = int(mp.floor(y))
            frac = y - a
            for u in range(1, U + 1):
                for cs in (range(0, min(a, scan) + 1), range(a, max(a - scan, -1), -1)):
                    for c in cs:
                        p, q = u * pm + c * pn, u * qm + c * qn
                        if q == 0:
                            continue
                        if q > s_max // 2 and not alive(p, q) and c not in (0, a):
                            break
                        test(p, q)
            pm, qm, pn, qn = pn, qn, a * pn + pm, a * qn + qm
    return sorted(found.values(), key=lambda m: (m.s, m.j)), qn


def hat_mupo_set(spec_or_rho, s_max: int | None = None, theta_star=None, s_direct: int = 4096,
                 q_cap: int = 10 ** 18):
    """(mupos, s_reached, tail_bound).

    Exact theta* with a decisive classification gives the full set (tail 0).
    Otherwise (s <= s_direct) is enumerated directly and the rest is found by
    the convergent scan up to q_cap; the tail bound covers s beyond that.
    Passing s_max restricts to s <= s_max (tail reported as nan).
    """
    spec = spec_or_rho if isinstance(spec_or_rho, MushroomSpec) else None
    rho = spec.rho if spec is not None else spec_or_rho
    er = ExactRho.of(rho, theta_star)
    if s_max is not None:
        return enumerate_mupos(s_max=s_max, theta_star=er.theta_star), s_max, math.nan
    if er.exact:
        res = classify(er.theta_star * 2)
        if isinstance(res, MupoFreeCertified):
            return [], 0, 0.0
        if isinstance(res, FinitelySticky):
            top = max([m.s for m in list(res.set) + list(res.border)] + [3])
            return enumerate_mupos(s_max=top, theta_star=er.theta_star), top, 0.0
    ms = enumerate_mupos(s_max=s_direct, theta_star=er.theta_star)
    more, q_end = _scan_beyond(er, s_direct, q_cap)
    R = spec.R if spec is not None else 1.0
    norm = 2 * _perimeter(spec) * ergodic_measure(spec) if spec is not None else 1.0
    # per family lambda (s + 2j) l^2 cos^2 <= 2 s (2 pi / s)^2; geometric growth of the convergents
    tail = 3 * 8 * math.pi ** 2 * R * R / (q_end * norm)
    return ms + more, 2 * q_end, tail


def _weighted(m: Mupo, R, rho, B, P) -> float:
    l = 2 * math.pi / (m.lam * m.s) - 2 * math.acos(min(_sin_theta(m) / rho, 1.0))
    c = math.cos(m.theta_sj)
    d = R * R * l * l * c * c / (2.0 * P * B)
    return m.weight * (0.5 * d if m.border else d)


def hat_C(spec: MushroomSpec, mupo_set=None, s_max: int | None = None, theta_star=None,
          tol: float | None = None) -> float:
    """C = sum lambda (s + 2 j) (Delta - delta) t over the MUPO set; hole independent.

    ``tol`` (relative) raises TailNotConverged when the neglected tail may exceed tol * C.
    """
    _semicircle(spec)
    tail = 0.0
    if mupo_set is None:
        mupo_set, _, tail = hat_mupo_set(spec, s_max, theta_star)
    B, P = ergodic_measure(spec), _perimeter(spec)
    vals = [_weighted(m, spec.R, spec.rho, B, P) for m in mupo_set]
    C = math.fsum(vals)
    if tol is not None and tail > tol * C:
        raise TailNotConverged(f"tail bound {tail:.3g} exceeds {tol:g} * C")
    return C


def predict_Pe(pred: SurvivalPrediction, t):
    """exp(-gamma t) + C / t (asymptotic; not meaningful for t of order the mean free path)."""
    t = np.asarray(t, dtype=float)
    return np.exp(-pred.gamma_bar * t) + pred.C / t


def hat_prediction(spec: MushroomSpec, theta_star=None, s_max: int | None = None):
    mupos, used, tail = hat_mupo_set(spec, s_max, theta_star)
    A = island_measure(spec)
    return SurvivalPrediction(A, 1.0 - A, escape_rate(spec), hat_C(spec, mupos), "HatMupos",
                              mupos=mupos, extra={"s_max": used, "tail_bound": tail})
