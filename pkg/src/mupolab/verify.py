"""Acceptance checks shared by ``mupolab verify`` and the test suite.

Each check returns a CheckResult with the measured and expected values; the
Monte Carlo checks run at full scale (10^6 to 10^7 particles) and take minutes.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .contfrac import convergent_table, expand, parse_number
from .geometry import HoleSpec, MushroomSpec

HAT_THETA_STAR = Fraction(871, 2500)
FREE_THETA_STAR = "(5+sqrt(2))/23"
MC_SEED = 0


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    seconds: float = 0.0
    detail: str = ""

    def line(self) -> str:
        m = ", ".join(f"{k}={_short(v)}" for k, v in self.measured.items())
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.name} ({self.seconds:.1f}s): {m}"

    def to_json(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": bool(self.passed),
                "measured": self.measured, "expected": self.expected, "seconds": self.seconds,
                "detail": self.detail}


def _short(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)) and len(v) > 6:
        return f"[{len(v)} items]"
    return str(v)


# ---------------------------------------------------------------------------
# reference geometries

def sticky_triangular_spec() -> MushroomSpec:
    """Triangular stem, theta* = 871/2500, hole of 0.048 centred on the right slant edge."""
    rho = math.cos(math.pi * float(HAT_THETA_STAR))
    sl = math.hypot(rho, 1.0)
    return MushroomSpec.simple(1.0, rho, 1.0, "triangular",
                               HoleSpec("TriangularStemEdge", sl / 2 - 0.024, sl / 2 + 0.024))


def free_rho() -> float:
    return math.cos(math.pi * float(parse_number(FREE_THETA_STAR)))


def bouncing_rect_spec() -> MushroomSpec:
    """Rectangular stem with a MUPO-free hat; hole (0.28, 0.30) on the right stem wall."""
    return MushroomSpec.simple(1.0, free_rho(), 1.0, "rectangular", HoleSpec("RectStemRightWall", 0.28, 0.30))


def free_triangular_spec() -> MushroomSpec:
    return MushroomSpec.simple(1.0, free_rho(), 1.0, "triangular", HoleSpec("TriangularStemEdge", 0.40, 0.448))


def plateau_window(gamma: float, C: float) -> tuple[float, float]:
    """[t0, 10 t0] with t0 the first t where exp(-gamma t) < 0.01 C / t."""
    from scipy.optimize import brentq
    f = lambda t: -gamma * t - math.log(0.01 * C / t)
    lo = 1.0
    hi = 10.0
    while f(hi) > 0:
        hi *= 2
    return brentq(f, lo if f(lo) > 0 else hi / 2, hi), None


# ---------------------------------------------------------------------------
# checks

def check_1():
    from .mupo import enumerate_mupos
    t0 = time.time()
    got = [(m.s, m.j) for m in enumerate_mupos(0.815, 919)]
    dt = time.time() - t0
    at920 = [(m.s, m.j) for m in enumerate_mupos(0.815, 920) if m.s == 920]
    want = [(4, 1), (5, 1), (66, 13)]
    ok = got == want and at920 == [(920, 181)] and dt < 1.0
    return CheckResult(1, "MUPOs at rho=0.815", ok, {"set": got, "s=920": at920, "runtime": dt},
                       {"set": want, "s=920": [(920, 181)], "runtime": "< 1 s"}, dt)


def check_2():
    from .mupo import FinitelySticky, classify, enumerate_mupos
    t0 = time.time()
    ms = enumerate_mupos(s_max=5000, theta_star=HAT_THETA_STAR)
    got = [(m.s, m.j) for m in ms if not m.border]
    border = [(m.s, m.j) for m in ms if m.border]
    cls = classify(2 * HAT_THETA_STAR)
    dt = time.time() - t0
    cset = [(m.s, m.j) for m in cls.set] if isinstance(cls, FinitelySticky) else None
    want = [(20, 7), (66, 23), (376, 131)]
    ok = got == want and isinstance(cls, FinitelySticky) and cset == want and dt < 10
    return CheckResult(2, "MUPOs at theta*=871/2500", ok,
                       {"set": got, "border": border, "classify": cls.kind, "classify_set": cset, "runtime": dt},
                       {"set": want, "classify": "FinitelySticky", "runtime": "< 10 s"}, dt)


def check_3():
    from .mupo import MupoFreeCertified, classify, intermediate_K, k_bound, odd_convergent_K
    t0 = time.time()
    ts = parse_number(FREE_THETA_STAR)
    xi = 2 * ts
    cls = classify(xi, Fraction(1, 2), Q=95)
    K = float(k_bound(free_rho(), Fraction(1, 2), 95, 95))
    cf = expand(xi)
    K5 = float(odd_convergent_K(cf, 5))
    Kb = float(intermediate_K(cf, 5, 1))
    dt = time.time() - t0
    ok = (isinstance(cls, MupoFreeCertified) and K < 0.6549 and round(K5, 3) == 0.706
          and round(Kb, 3) == 1.237 and dt < 5)
    return CheckResult(3, "MUPO-free certificate", ok,
                       {"classify": cls.kind, "K(95,95)": K, "K5": K5, "Kbar5(1)": Kb, "runtime": dt},
                       {"classify": "MupoFreeCertified", "K(95,95)": "< 0.6549", "K5": 0.706, "Kbar5(1)": 1.237},
                       dt)


def check_4():
    from .mupo import sufficient_threshold_rho
    t0 = time.time()
    r = sufficient_threshold_rho(Fraction(1, 2), 1)
    ok = round(r, 6) == 0.390683
    return CheckResult(4, "sufficient-condition threshold", ok, {"rho": r}, {"rho": 0.390683}, time.time() - t0)


def check_5():
    from .stem import core_constant
    t0 = time.time()
    H = 1.0 - 0.3
    got = core_constant(1 - 1e-12, H, zeta=2)
    want = H * H * (3 * math.log(3) + 2) / 4
    rel = abs(got - want) / want
    return CheckResult(5, "stadium limit", rel < 1e-6, {"core": got, "rel_err": rel},
                       {"core": want, "rel_err": "< 1e-6"}, time.time() - t0)


def check_6(points: int = 50):
    from .stem import StemCase, core_constant, exact_area, polygon_area_sum, seven_sums
    t0 = time.time()
    grid = [r for r in np.linspace(0.2, 0.98, points + 2) if abs(r * math.ceil(1 / r - 1e-12) - 1) > 1e-6][:points]
    ts = (1e3, 1e4, 1e5)
    worst_sum = 0.0
    worst_1e5 = 0.0
    C0 = 0.0
    spread = 1.0
    for rho in grid:
        case = StemCase(float(rho), 1.0, 0.28, 0.3, 1.0, 1.0, 1.0)
        core = core_constant(case.rho, case.H)
        worst_sum = max(worst_sum, abs(seven_sums(case)["total"] - core) / core)
        for f in (exact_area, polygon_area_sum):
            et = []
            for t in ts:
                e = abs(f(t, case) - core) / core
                et.append(e * t)
                if t == 1e5:
                    worst_1e5 = max(worst_1e5, e)
            C0 = max(C0, max(et))
            spread = max(spread, max(et) / max(min(et), 1e-300))
    dt = time.time() - t0
    ok = worst_sum < 1e-10 and worst_1e5 < 1e-3 and C0 / 1e5 < 1e-3 and spread < 2.0
    return CheckResult(6, "stem closed form vs sums vs polygons", ok,
                       {"grid": len(grid), "sum_vs_closed": worst_sum, "max_err_t1e5": worst_1e5, "C0": C0,
                        "err_t_spread": spread, "runtime": dt},
                       {"sum_vs_closed": "< 1e-10", "max_err_t1e5": "< 1e-3", "err*t": "constant within x2"}, dt)


def check_7(n: int = 1000, seed: int = 0):
    from .errors import DomainError
    from .mupo import q_min, r2_bound, taylor_remainder
    t0 = time.time()
    rng = np.random.default_rng(seed)
    done = 0
    worst = -math.inf
    viol = 0
    while done < n:
        alpha = Fraction(int(rng.integers(1, 51)), 100)
        rho = float(rng.uniform(0.05, 0.95))
        Q = int(math.floor(q_min(rho, alpha))) + 1 + int(rng.integers(0, 50))
        q = int(Q * math.exp(rng.uniform(0, math.log(1000))))
        xi = math.acos(rho) / (math.pi * float(alpha))
        p = math.ceil(q * xi) + int(rng.integers(0, 3))
        if math.gcd(p, q) != 1 or not float(alpha) * p / q < 0.5:
            continue
        try:
            bound = r2_bound(rho, alpha, q, Q)
        except DomainError:
            continue
        true = taylor_remainder(rho, alpha, p, q)
        done += 1
        worst = max(worst, float(true / bound))
        viol += bool(true > bound)
    dt = time.time() - t0
    return CheckResult(7, "remainder bound", viol == 0, {"samples": done, "violations": viol,
                                                         "max_true_over_bound": worst, "runtime": dt},
                       {"violations": 0}, dt)


def check_8(particles: int = 10 ** 7, seed: int = MC_SEED):
    from .hat import escape_rate, hat_C
    from .montecarlo import plateau_estimate, survival_curve
    t0 = time.time()
    spec = sticky_triangular_spec()
    C = hat_C(spec, theta_star=HAT_THETA_STAR)
    g = escape_rate(spec)
    lo, _ = plateau_window(g, C)
    curve = survival_curve(spec, particles, 10.05 * lo, bins=100, seed=seed)
    est, ci, se = plateau_estimate(curve, lo, 10 * lo)
    rel = (est - C) / C
    dt = time.time() - t0
    return CheckResult(8, "hat Monte Carlo plateau", abs(rel) <= 0.15,
                       {"plateau": est, "ci95": ci, "rel_dev": rel, "window": (lo, 10 * lo), "runtime": dt},
                       {"hat_C": C, "tolerance": 0.15}, dt)


def check_9(particles: int = 10 ** 7, seed: int = MC_SEED):
    from .hat import escape_rate, mean_free_path
    from .montecarlo import fit_exponential_rate, plateau_estimate, survival_curve
    from .stem import StemCase, stem_C
    t0 = time.time()
    spec = bouncing_rect_spec()
    C = stem_C(StemCase.from_spec(spec))
    g = escape_rate(spec)
    lo, _ = plateau_window(g, C)
    curve = survival_curve(spec, particles, 10.05 * lo, bins=100, seed=seed)
    # early-time exponential window: two mean flights up to half an e-folding time
    rate = fit_exponential_rate(curve, 2 * mean_free_path(spec), 0.5 / g)
    est, ci, se = plateau_estimate(curve, lo, 10 * lo)
    rel_g = (rate - g) / g
    rel_c = (est - C) / C
    dt = time.time() - t0
    return CheckResult(9, "stem Monte Carlo slope and plateau", abs(rel_g) <= 0.05 and abs(rel_c) <= 0.15,
                       {"rate": rate, "rate_rel_dev": rel_g, "plateau": est, "ci95": ci, "plateau_rel_dev": rel_c,
                        "runtime": dt},
                       {"gamma_bar": g, "C": C, "tolerances": (0.05, 0.15)}, dt)


def check_10(particles: int = 10 ** 6, seed: int = MC_SEED):
    from .hat import escape_rate
    from .montecarlo import plateau_estimate, survival_curve
    t0 = time.time()
    spec = free_triangular_spec()
    g = escape_rate(spec)
    # past the point where the exponential leaves < 0.01 expected survivors
    lo = math.log(100 * particles) / g
    curve = survival_curve(spec, particles, 10.05 * lo, bins=100, seed=seed)
    est, ci, se = plateau_estimate(curve, lo, 10 * lo)
    dt = time.time() - t0
    return CheckResult(10, "no plateau without MUPOs", ci[0] <= 0 <= ci[1],
                       {"plateau": est, "ci95": ci, "window": (lo, 10 * lo), "runtime": dt},
                       {"ci95_contains": 0.0}, dt)


def check_11(samples: int = 4_000_000, seed: int = 0):
    from .hat import arc_interval_length, in_mupo_quadrilateral
    from .montecarlo import survivor_phase_map
    from .mupo import enumerate_mupos
    t0 = time.time()
    rho, N = 0.815, 200
    pm = survivor_phase_map(rho, N, samples, seed=seed)
    frac = {}
    for m in enumerate_mupos(rho, 5):
        ell = arc_interval_length(m, rho)
        band = np.abs(pm.theta - m.theta_sj) < ell / N
        ins = in_mupo_quadrilateral(pm.phi, pm.theta, m, rho, N)
        frac[f"({m.s},{m.j})"] = float((ins & band).sum() / max(band.sum(), 1))
    dt = time.time() - t0
    ok = len(frac) == 2 and min(frac.values()) >= 0.95
    return CheckResult(11, "phase-map bands", ok, {"inside_fraction": frac, "survivors": int(pm.phi.size),
                                                   "runtime": dt}, {"inside_fraction": ">= 0.95"}, dt)


def check_12(collisions: int = 10 ** 7):
    from .hat import mean_free_path
    from .montecarlo import diagnostics, set_threads, survival_curve
    t0 = time.time()
    # determinant identity on a few expansions
    det_ok = True
    for x in (Fraction(871, 2500), Fraction(2 * 871, 2500), parse_number("2*(5+sqrt(2))/23"),
              parse_number("(sqrt(5)-1)/2"), parse_number("sqrt(7)/3")):
        cf = expand(x)
        n = 30 if cf.kind == "periodic" else len(cf.pre)
        A, B = convergent_table(cf, n)
        det_ok &= all(A[k] * B[k - 1] - A[k - 1] * B[k] == (-1) ** (k - 1) for k in range(1, n + 1))
    spec = sticky_triangular_spec()
    d = diagnostics(spec, collisions, seed=1)
    mfp = mean_free_path(spec)
    mfp_rel = (d["mean_free_path"] - mfp) / mfp
    runs = []
    for th in (1, None):
        set_threads(th)
        c = survival_curve(spec, 200_000, 2000.0, bins=50, seed=5)
        runs.append((c.survivors.copy(), c.times.copy()))
    set_threads()
    same = all(np.array_equal(a, b) for a, b in zip(runs[0], runs[1]))
    dt = time.time() - t0
    ok = det_ok and d["ks_z"] < 0.005 and d["ks_sin_theta"] < 0.005 and abs(mfp_rel) < 0.01 and same
    return CheckResult(12, "property suites", ok,
                       {"determinant": det_ok, "ks_z": d["ks_z"], "ks_sin_theta": d["ks_sin_theta"],
                        "mfp_rel_dev": mfp_rel, "bit_identical": same, "runtime": dt},
                       {"ks": "< 0.005", "mfp_rel_dev": "< 0.01"}, dt)


CHECKS = {i: globals()[f"check_{i}"] for i in range(1, 13)}


def run_checks(only=None, echo=None) -> list:
    out = []
    for i in (only or sorted(CHECKS)):
        r = CHECKS[i]()
        if echo is not None:
            print(r.line(), file=echo, flush=True)
        out.append(r)
    return out
