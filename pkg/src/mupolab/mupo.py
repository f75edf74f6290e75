"""Marginally unstable periodic orbits of the mushroom hat.

A polygonal hat orbit (s, j) is marginally unstable iff

    cos(j pi / s) <= rho < cos(j pi / s) / cos(pi / (lambda s)),   lambda = 1 (s even), 2 (s odd)

or, for a hat of angular half-size alpha*pi and reduced p/q,

    cos(alpha p pi / q) <= rho < cos(alpha p pi / q) / cos(alpha pi / q).

Membership is always decided with that exact inequality (extended precision,
exact rational comparison of the left end when theta* is exact).  The
Diophantine machinery below only prunes the search and certifies that no
solutions exist past a cutoff Q.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from numbers import Rational
from typing import Iterable

import mpmath as mp
import numpy as np

from .contfrac import (ContinuedFraction, QuadraticSurd, convergent_table, complete_quotient,
                       expand, expand_interval)
from .errors import DepthExceeded, DomainError, InvalidC, UnboundedEvenQuotients

DPS = 50

__all__ = [
    "Mupo", "ExactRho", "enumerate_mupos", "enumerate_mupos_generalized", "k_bound", "r2_bound",
    "taylor_remainder", "q_min", "odd_convergent_K", "intermediate_K", "even_quotient_max",
    "mupo_free_sufficient", "sufficient_threshold_rho", "infinite_threshold_rho", "classify",
    "MupoFreeCertified", "FinitelySticky", "InfinitelySticky", "UndecidedUpTo", "pq_to_sj", "sj_to_pq",
]


# ---------------------------------------------------------------------------
# rho with optional exact theta* = arccos(rho)/pi

@dataclass(frozen=True)
class ExactRho:
    """rho = cos(pi * theta_star).  theta_star may be exact (Fraction/QuadraticSurd) or mpf."""
    theta_star: object

    @classmethod
    def of(cls, rho=None, theta_star=None) -> "ExactRho":
        if isinstance(rho, ExactRho):
            return rho
        if theta_star is not None:
            ts = theta_star
            if isinstance(ts, float):
                ts = mp.mpf(ts)
            elif isinstance(ts, (int, Rational)):
                ts = Fraction(ts)
            return cls(ts)
        if rho is None:
            raise ValueError("need rho or theta_star")
        with mp.workdps(DPS + 10):
            r = mp.mpf(rho)
            if not 0 < r < 1:
                raise DomainError(f"rho must lie in (0, 1), got {rho}")
            return cls(mp.acos(r) / mp.pi)

    @property
    def exact(self) -> bool:
        return isinstance(self.theta_star, (Fraction, QuadraticSurd))

    def ts_mpf(self, dps=DPS):
        t = self.theta_star
        if isinstance(t, QuadraticSurd):
            return t.to_mpf(dps)
        with mp.workdps(dps + 10):
            return mp.mpf(t.numerator) / t.denominator if isinstance(t, Fraction) else mp.mpf(t)

    def rho_mpf(self, dps=DPS):
        with mp.workdps(dps + 10):
            return mp.cos(mp.pi * self.ts_mpf(dps + 10))

    @property
    def rho(self) -> float:
        return float(self.rho_mpf())

    def ge_ts(self, x: Fraction) -> tuple[bool, bool]:
        """(x >= theta*, x == theta*) -- exact when theta* is exact."""
        t = self.theta_star
        if isinstance(t, (Fraction, QuadraticSurd)):
            c = QuadraticSurd.coerce(x) - QuadraticSurd.coerce(t)
            s = c.sign()
            return s >= 0, s == 0
        with mp.workdps(DPS + 10):
            d = mp.mpf(x.numerator) / x.denominator - t
            return d >= 0, abs(d) < mp.mpf(10) ** (-DPS + 5)


def _frac(alpha) -> Fraction:
    return Fraction(alpha).limit_denominator(10 ** 12) if isinstance(alpha, float) else Fraction(alpha)


# ---------------------------------------------------------------------------
# orbit records

@dataclass(frozen=True)
class Mupo:
    s: int
    j: int
    lam: int
    alpha_sj: float
    beta_sj: float
    theta_sj: float
    border: bool = False      # cos(j pi/s) == rho exactly: one-sided family
    margin: float = math.inf  # min(rho - alpha_sj, beta_sj - rho), extended precision

    @property
    def weight(self) -> int:
        """Number of arc + hat-base quadrilaterals per family, lambda (s + 2 j)."""
        return self.lam * (self.s + 2 * self.j)

    def to_json(self) -> dict:
        return {"s": self.s, "j": self.j, "lambda": self.lam, "alpha_sj": self.alpha_sj,
                "beta_sj": self.beta_sj, "theta_sj": self.theta_sj, "border": self.border}


def sj_to_pq(s: int, j: int) -> tuple[int, int]:
    """Semicircular-hat (s, j) to the (p, q) of the generalized inequality at alpha = 1/2."""
    return (j, s // 2) if s % 2 == 0 else (2 * j, s)


def pq_to_sj(p: int, q: int) -> tuple[int, int]:
    return (2 * q, p) if p % 2 else (q, p // 2)


def _check_pq(er: ExactRho, alpha: Fraction, p: int, q: int, dps=DPS):
    """Exact test of the generalized inequality; returns (ok, border, margin)."""
    ge, eq = er.ge_ts(alpha * p / q)
    if not ge:
        return False, False, 0.0
    for prec in (dps, 2 * dps, 4 * dps):
        with mp.workdps(prec + 10):
            a = mp.mpf(alpha.numerator) / alpha.denominator
            cq = mp.cos(a * mp.pi / q)
            if cq <= 0:
                return False, False, 0.0
            lo = mp.cos(a * p * mp.pi / q)
            hi = lo / cq
            rho = er.rho_mpf(prec)
            diff = hi - rho
            if abs(diff) > mp.mpf(10) ** (-prec + 10):
                margin = float(min(diff, rho - lo)) if not eq else 0.0
                return bool(diff > 0), eq, margin
    warnings.warn(f"(p, q) = ({p}, {q}) sits on the right end of its interval to {4 * dps} digits")
    return False, eq, 0.0


def _mupo_from_sj(er: ExactRho, s: int, j: int, border: bool, margin: float) -> Mupo:
    lam = 1 if s % 2 == 0 else 2
    a = math.cos(j * math.pi / s)
    return Mupo(s, j, lam, a, a / math.cos(math.pi / (lam * s)), math.pi / 2 - j * math.pi / s, border, margin)


# ---------------------------------------------------------------------------
# enumeration

def enumerate_mupos(rho=None, s_max: int = 1000, theta_star=None, include_border: bool = True) -> list:
    """All coprime (s, j), 3 <= s <= s_max, with cos(j pi/s) <= rho < cos(j pi/s)/cos(pi/(lambda s)).

    Give ``theta_star`` (exact Fraction/QuadraticSurd) to make the left end
    comparison exact; border orbits (cos(j pi/s) == rho) are flagged.
    """
    er = ExactRho.of(rho, theta_star)
    if s_max < 3:
        return []
    ts = float(er.ts_mpf())
    rho_f = er.rho
    s = np.arange(3, s_max + 1)
    lam = np.where(s % 2 == 0, 1, 2)
    j0 = np.ceil(s * ts - 1e-9).astype(np.int64)
    out = []
    cand = []
    for dj in (-1, 0, 1):
        j = j0 + dj
        jmax = np.where(s % 2 == 0, s // 2 - 1, (s - 1) // 2)
        ok = (j >= 1) & (j <= jmax)
        a = np.cos(j * np.pi / s)
        b = a / np.cos(np.pi / (lam * s))
        ok &= (a <= rho_f + 1e-12) & (rho_f < b + 1e-12)
        cand.extend(zip(s[ok].tolist(), j[ok].tolist()))
    half = Fraction(1, 2)
    for si, ji in sorted(set(cand)):
        if math.gcd(si, ji) != 1:
            continue
        p, q = sj_to_pq(si, ji)
        good, border, margin = _check_pq(er, half, p, q)
        if good and (include_border or not border):
            if margin < 1e-15 and not border:
                warnings.warn(f"MUPO ({si},{ji}) within 1e-15 of an interval end")
            out.append(_mupo_from_sj(er, si, ji, border, margin))
    return out


def enumerate_mupos_generalized(rho=None, alpha=Fraction(1, 2), q_max: int = 500, theta_star=None,
                                with_flags: bool = False) -> list:
    """Coprime (p, q), q <= q_max, solving cos(a p pi/q) <= rho < cos(a p pi/q)/cos(a pi/q)."""
    er = ExactRho.of(rho, theta_star)
    alpha = _frac(alpha)
    if alpha > Fraction(1, 2):
        warnings.warn("alpha > 1/2: hat wider than a semicircle, outside the analysed family")
    af = float(alpha)
    ts = float(er.ts_mpf())
    rho_f = er.rho
    q = np.arange(1, q_max + 1)
    valid = af * np.pi / q < np.pi / 2
    p0 = np.ceil(q * ts / af - 1e-9).astype(np.int64)
    cand = []
    for dp in (-1, 0, 1):
        p = p0 + dp
        with np.errstate(divide="ignore", invalid="ignore"):
            a = np.cos(af * p * np.pi / q)
            b = a / np.cos(af * np.pi / q)
        ok = valid & (p >= 1) & (a <= rho_f + 1e-12) & (rho_f < b + 1e-12)
        cand.extend(zip(p[ok].tolist(), q[ok].tolist()))
    out = []
    for pi_, qi in sorted(set(cand), key=lambda t: (t[1], t[0])):
        if math.gcd(pi_, qi) != 1:
            continue
        good, border, margin = _check_pq(er, alpha, pi_, qi)
        if good:
            out.append((pi_, qi, border) if with_flags else (pi_, qi))
    return out


# ---------------------------------------------------------------------------
# K(q, Q) bound with the Taylor remainder estimate

def q_min(rho, alpha=Fraction(1, 2)) -> float:
    """Lower limit on Q for which the remainder estimate holds."""
    a = float(alpha) * math.pi
    rho = float(rho)
    return max(a, a / math.cos(1.0) * math.sqrt(rho / (1 - rho)))


def r2_bound(rho, alpha, q, Q, check=True):
    """Upper bound on the second-order remainder of the arccos expansion."""
    if check:
        _check_q(rho, alpha, q, Q)
    with mp.workdps(DPS):
        rho = mp.mpf(rho) if not isinstance(rho, ExactRho) else rho.rho_mpf()
        a = mp.mpf(float(alpha)) * mp.pi if not isinstance(alpha, Fraction) else \
            mp.mpf(alpha.numerator) / alpha.denominator * mp.pi
        cQ, tQ = mp.cos(a / Q), mp.tan(a / Q)
        g = a ** 2 / (cQ ** 2 * mp.mpf(q) ** 2)
        one = 1 - rho ** 2
        t1 = (tQ ** 2 + mp.mpf(4) / 3) * rho / mp.sqrt(one)
        t2 = rho ** 3 / (2 * one ** mp.mpf(1.5))
        inner = 1 - rho ** 2 * (1 + a ** 2 / (cQ ** 2 * mp.mpf(q) ** 2)) ** 2
        if inner <= 0:
            raise DomainError("remainder bound undefined: 1 - rho^2 (1 + ...)^2 <= 0")
        t3 = (1 + a ** 2 / (cQ ** 2 * mp.mpf(Q) ** 2)) * rho ** 3 / (2 * cQ ** 2 * inner ** mp.mpf(1.5))
        return g * (t1 + t2 + t3)


def _check_q(rho, alpha, q, Q):
    r = rho.rho if isinstance(rho, ExactRho) else float(rho)
    if not Q > q_min(r, alpha):
        raise DomainError(f"Q = {Q} must exceed {q_min(r, alpha):.6g} for the remainder bound")
    if q < Q:
        raise DomainError(f"q = {q} below Q = {Q}")


def k_bound(rho, alpha, q, Q, check=True):
    """K(q, Q) = alpha pi rho / (2 sqrt(1 - rho^2)) + R2hat(q, Q)  (mpf)."""
    with mp.workdps(DPS):
        r = mp.mpf(rho) if not isinstance(rho, ExactRho) else rho.rho_mpf()
        a = mp.mpf(float(alpha)) if not isinstance(alpha, Fraction) else mp.mpf(alpha.numerator) / alpha.denominator
        lead = a * mp.pi * r / (2 * mp.sqrt(1 - r ** 2))
        return lead + r2_bound(rho, alpha, q, Q, check=check)


def taylor_remainder(rho, alpha, p, q):
    """True remainder q^2 T / alpha - alpha pi cot(alpha p pi / q) / 2 (mpf).

    T = alpha p/q - arccos(cos(alpha p pi/q)/cos(alpha pi/q))/pi is the exact
    tolerance of the generalized inequality for the fraction p/q.
    """
    with mp.workdps(DPS):
        a = mp.mpf(float(alpha))
        x = a * p * mp.pi / q
        ratio = mp.cos(x) / mp.cos(a * mp.pi / q)
        T = a * p / q - mp.acos(ratio) / mp.pi
        return q ** 2 * T / a - a * mp.pi * mp.cot(x) / 2


# ---------------------------------------------------------------------------
# convergent quantities

def odd_convergent_K(cf: ContinuedFraction, n: int):
    """K_n = 1/(zeta_{n+1} + B_{n-1}/B_n), equal to B_n^2 (A_n/B_n - xi) for odd n."""
    if n % 2 == 0 or n < 1:
        raise ValueError("n must be odd and >= 1")
    _, B = convergent_table(cf, n)
    z = complete_quotient(cf, n + 1)
    return (z + Fraction(B[n - 1], B[n])).reciprocal() if isinstance(z, QuadraticSurd) else \
        1 / (z + Fraction(B[n - 1], B[n]))


def intermediate_K(cf: ContinuedFraction, n: int, c: int):
    """Kbar_n(c) = (zeta_{n+2} - c)(c + B_n/B_{n+1}) / (zeta_{n+2} + B_n/B_{n+1})."""
    if n % 2 == 0 or n < 1:
        raise ValueError("n must be odd and >= 1")
    if not 1 <= c < cf[n + 2]:
        raise InvalidC(f"c = {c} outside 1 <= c < a_{n + 2} = {cf[n + 2]}")
    _, B = convergent_table(cf, n + 1)
    z = complete_quotient(cf, n + 2)
    x = Fraction(B[n], B[n + 1])
    return (z - c) * (c + x) / (z + x)


def even_quotient_max(cf: ContinuedFraction) -> int:
    """max_{k >= 1} a_{2k}; periodic tails certify the maximum automatically."""
    if cf.kind == "truncated":
        raise UnboundedEvenQuotients("expansion is truncated; even quotients cannot be bounded")
    last = len(cf.pre) + (2 * len(cf.period) + 2 if cf.kind == "periodic" else 0)
    ev = [cf[i] for i in range(2, last + 1, 2) if cf.available(i)]
    return max(ev) if ev else 0


def sufficient_threshold_rho(alpha=Fraction(1, 2), wp: int = 1) -> float:
    """rho below which alpha pi rho / (2 sqrt(1-rho^2)) < 1/(wp + 2)."""
    a = float(alpha)
    return 1.0 / math.sqrt(1.0 + (a * math.pi * (wp + 2) / 2) ** 2)


def infinite_threshold_rho(alpha=Fraction(1, 2)) -> float:
    """rho above which every irrational theta* has infinitely many MUPOs (lead term > 1)."""
    a = float(alpha)
    return 1.0 / math.sqrt(1.0 + (a * math.pi / 2) ** 2)


def mupo_free_sufficient(xi_cf: ContinuedFraction, rho, alpha=Fraction(1, 2), Q: int = 100) -> bool:
    """K(Q, Q) < 1/(wp + 2), wp = max even partial quotient, and no solutions for q <= Q."""
    wp = even_quotient_max(xi_cf)
    alpha = _frac(alpha)
    if not k_bound(rho, alpha, Q, Q) < mp.mpf(1) / (wp + 2):
        return False
    if xi_cf.kind == "truncated":
        er = ExactRho.of(rho)
    else:
        er = ExactRho(_as_exact(xi_cf.value()) * alpha)
    return not enumerate_mupos_generalized(er, alpha, Q)


def _as_exact(v):
    return v.as_fraction() if isinstance(v, QuadraticSurd) and v.is_rational else v


# ---------------------------------------------------------------------------
# classification

@dataclass
class MupoFreeCertified:
    checked_to: int
    sufficient_condition: str   # 'bounded-even-quotients' | 'convergent-bound' | 'rational-exhaustive'
    kind: str = "MupoFreeCertified"

    def to_json(self):
        return asdict(self)


@dataclass
class FinitelySticky:
    set: list
    border: list = field(default_factory=list)
    checked_to: int = 0
    certificate: str = ""
    kind: str = "FinitelySticky"

    def to_json(self):
        return {"kind": self.kind, "set": [_js(m) for m in self.set], "border": [_js(m) for m in self.border],
                "checked_to": self.checked_to, "certificate": self.certificate}


@dataclass
class InfinitelySticky:
    witness: str
    convergents: list = field(default_factory=list)
    kind: str = "InfinitelySticky"

    def to_json(self):
        return {"kind": self.kind, "witness": self.witness, "convergents": [_js(m) for m in self.convergents]}


@dataclass
class UndecidedUpTo:
    q_bound: int
    found: list = field(default_factory=list)
    reason: str = ""
    kind: str = "UndecidedUpTo"

    def to_json(self):
        return {"kind": self.kind, "q_bound": self.q_bound, "found": [_js(m) for m in self.found],
                "reason": self.reason}


def _js(m):
    return m.to_json() if hasattr(m, "to_json") else {"p": m[0], "q": m[1]}


def _pack(er, alpha, pqs):
    """(p, q, border) triples -> Mupo objects at alpha = 1/2, else (p, q) pairs."""
    inner, border = [], []
    for p, q, b in pqs:
        if alpha == Fraction(1, 2):
            s, j = pq_to_sj(p, q)
            ok, bb, margin = _check_pq(er, alpha, p, q)
            m = _mupo_from_sj(er, s, j, b, margin)
        else:
            m = (p, q)
        (border if b else inner).append(m)
    key = (lambda m: (m.s, m.j)) if alpha == Fraction(1, 2) else (lambda m: (m[1], m[0]))
    return sorted(inner, key=key), sorted(border, key=key)


def _reverse_cf_bounds(seq: list) -> tuple[Fraction, Fraction]:
    """Bounds on [0; seq[0], seq[1], ...] valid for any continuation of seq."""
    lo = hi = None
    v1 = Fraction(0)
    for depth in (len(seq) - 1, len(seq)):
        v = Fraction(0)
        for a in reversed(seq[:depth]):
            v = 1 / (a + v)
        lo = v if lo is None else min(lo, v)
        hi = v if hi is None else max(hi, v)
    return lo, hi


def classify(xi, alpha=Fraction(1, 2), Q: int | None = None, depth_rounds: int = 6):
    """Decide whether rho = cos(pi alpha xi) is MUPO-free, finitely or infinitely sticky.

    ``xi`` = theta*/alpha must be exact (Fraction or QuadraticSurd).  With
    ``Q=None`` the cutoff is escalated from its smallest admissible value until
    a decision is reached (or 2**14 is passed).
    """
    alpha = _frac(alpha)
    if isinstance(xi, (int, Rational)):
        xi = Fraction(xi)
    if not isinstance(xi, (Fraction, QuadraticSurd)):
        raise TypeError("classify needs an exact xi; float input cannot be certified")
    xi = _as_exact(xi)
    er = ExactRho(xi * alpha if isinstance(xi, Fraction) else xi * QuadraticSurd.coerce(alpha))
    rho = er.rho_mpf()
    if not 0 < rho < 1:
        raise DomainError("xi must give 0 < rho < 1")
    qm = q_min(float(rho), alpha)
    if Q is not None:
        if not Q > qm:
            raise DomainError(f"Q = {Q} must exceed {qm:.6g}")
        return _classify_at(xi, er, rho, alpha, Q, depth_rounds)
    Q = int(math.floor(qm)) + 1
    while True:
        res = _classify_at(xi, er, rho, alpha, Q, depth_rounds)
        if not isinstance(res, UndecidedUpTo) or Q > 2 ** 14:
            return res
        Q *= 2


def _classify_at(xi, er, rho, alpha, Q, depth_rounds):
    K_QQ = k_bound(rho, alpha, Q, Q)

    # rational: every solution either equals xi or is at distance >= 1/(q v)
    if isinstance(xi, Fraction):
        v = xi.denominator
        bound = max(Q, v, int(mp.ceil(K_QQ * v)) + 1)
        sols = enumerate_mupos_generalized(er, alpha, bound, with_flags=True)
        inner, border = _pack(er, alpha, sols)
        if not inner and not border:
            return MupoFreeCertified(bound, "rational-exhaustive")
        return FinitelySticky(inner, border, bound, "rational-exhaustive")

    with mp.workdps(DPS):
        lead = mp.mpf(alpha.numerator) / alpha.denominator * mp.pi * rho / (2 * mp.sqrt(1 - rho ** 2))
    cf = expand(xi)

    # the exact tolerance q^2 T / alpha tends to `lead`; any convergent family whose
    # K stays below it is eventually a MUPO family
    k_hi = _period_upper_K(cf)
    if lead > 1 or k_hi < lead:
        A, B = convergent_table(cf, 60)
        wit = []
        for n in range(1, 61, 2):
            ok, _, _ = _check_pq(er, alpha, A[n], B[n])
            if ok:
                wit.append((A[n], B[n]))
        if alpha == Fraction(1, 2):
            wit = [_mupo_from_sj(er, *pq_to_sj(p, q), False, 0.0) for p, q in wit]
        why = (f"alpha*pi*cot(pi*theta*)/2 = {float(lead):.6f} exceeds 1 > K_n" if lead > 1 else
               f"limiting K along the period {float(k_hi):.6f} < alpha*pi*cot(pi*theta*)/2 = {float(lead):.6f}")
        return InfinitelySticky(why + ": infinitely many convergents solve the MUPO inequality", wit[:8])

    found = enumerate_mupos_generalized(er, alpha, Q, with_flags=True)
    if K_QQ >= 1:
        inner, border = _pack(er, alpha, found)
        return UndecidedUpTo(Q, inner + border, f"K(Q,Q) = {float(K_QQ):.4f} >= 1")

    try:
        wp = even_quotient_max(cf)
        eq15 = K_QQ < mp.mpf(1) / (wp + 2)
    except UnboundedEvenQuotients:
        eq15 = False
    if eq15 and not found:
        return MupoFreeCertified(Q, "bounded-even-quotients")

    ok, extra = _certify_beyond(cf, er, rho, alpha, Q, depth_rounds)
    found = sorted(set(found) | set(extra), key=lambda t: (t[1], t[0]))
    inner, border = _pack(er, alpha, found)
    if not ok:
        return UndecidedUpTo(Q, inner + border, "convergent bound not established along the period")
    if not found:
        return MupoFreeCertified(Q, "convergent-bound")
    return FinitelySticky(inner, border, Q, "convergent-bound")


def _period_upper_K(cf):
    """Upper bound on lim inf of K_n, Kbar_n(c) over odd n (periodic expansions)."""
    per, pre = len(cf.period), len(cf.pre)
    depth = 2 * per + 2
    n0 = pre + depth + 2
    n0 += (n0 % 2 == 0)
    best = None
    for r in range(per):
        n = n0 + 2 * r
        lo_x, _ = _reverse_cf_bounds([cf[n - i] for i in range(depth)])
        _, hi2 = _reverse_cf_bounds([cf[n + 1 - i] for i in range(depth)])
        vals = [(complete_quotient(cf, n + 1) + lo_x).reciprocal()]
        z2 = complete_quotient(cf, n + 2)
        vals += [(z2 - c) * (c + hi2) / (z2 + hi2) for c in range(1, cf[n + 2])]
        for v in vals:
            v = v.to_mpf(DPS)
            best = v if best is None else min(best, v)
    return best
def _certify_beyond(cf, er, rho, alpha, Q, rounds):
    """Check every odd convergent and intermediate convergent with denominator >= Q.

    Returns (certified, extra_solutions).  Finite explicit checks up to an index
    N, then a uniform lower bound per residue class of the period using
    two-sided bounds on B_{n-1}/B_n from the reversed expansion.
    """
    per = len(cf.period)
    pre = len(cf.pre)
    extra = []
    N = pre + 4 * per + 4
    for _ in range(rounds):
        A, B = convergent_table(cf, N + 3)
        # explicit range
        for n in range(1, N + 1, 2):
            cands = [(A[n], B[n], None)]
            cands += [(c * A[n + 1] + A[n], c * B[n + 1] + B[n], c) for c in range(1, cf[n + 2])]
            for p, q, c in cands:
                if q < Q:
                    continue
                Kv = odd_convergent_K(cf, n) if c is None else intermediate_K(cf, n, c)
                if not Kv.to_mpf(DPS) > k_bound(rho, alpha, q, Q, check=False):
                    good, border, _ = _check_pq(er, alpha, p, q)
                    if good:
                        extra.append((p, q, border))
        # uniform tail for n > N
        Kcap = k_bound(rho, alpha, max(B[N], Q), Q, check=False)
        uniform = True
        depth = 2 * per + 2
        for r in range(per):
            n = N + 1 + 2 * r if (N + 1) % 2 == 1 else N + 2 + 2 * r
            # odd n in class; B_{n-1}/B_n = [0; a_n, ..., a_1]
            seq = [cf[n - i] for i in range(depth)]
            lo_x, hi_x = _reverse_cf_bounds(seq)
            z1 = complete_quotient(cf, n + 1)
            Kn_lo = (z1 + hi_x).reciprocal()
            if not Kn_lo.to_mpf(DPS) > Kcap:
                uniform = False
                break
            seq2 = [cf[n + 1 - i] for i in range(depth)]   # B_n/B_{n+1}
            lo2, _ = _reverse_cf_bounds(seq2)
            z2 = complete_quotient(cf, n + 2)
            for c in range(1, cf[n + 2]):
                kb = (z2 - c) * (c + lo2) / (z2 + lo2)
                if not kb.to_mpf(DPS) > Kcap:
                    uniform = False
                    break
            if not uniform:
                break
        if uniform:
            return True, extra
        N = 2 * N + 1
    return False, extra
