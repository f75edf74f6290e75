"""Open-billiard escape simulation and circle-with-slit survivor maps.

Random numbers come from counter-based Philox streams keyed by (seed, chunk),
with a fixed chunk size, so the initial conditions of particle i never depend
on how the work is split across threads.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, asdict, field

import numba
import numpy as np

from . import _billiard as kb
from .geometry import BoundaryModel, BirkhoffCoord, MushroomSpec, build_boundary, regular_mask

CHUNK = 1 << 16
MAX_COLL = 1 << 40

__all__ = [
    "SurvivalCurve", "PhaseMap", "EscapeRecord", "chunk_rng", "sample_ergodic_ic",
    "evolve_until_escape", "survival_curve", "survivor_phase_map", "diagnostics", "set_threads",
    "plateau_estimate", "fit_exponential_rate", "spec_hash",
]


def set_threads(n: int | None = None) -> int:
    """Cap numba threads at MUPOLAB_THREADS (or n)."""
    env = os.environ.get("MUPOLAB_THREADS")
    cap = numba.config.NUMBA_NUM_THREADS
    want = n if n is not None else (int(env) if env else cap)
    want = max(1, min(int(want), cap))
    numba.set_num_threads(want)
    return want


def spec_hash(spec: MushroomSpec) -> str:
    blob = json.dumps(asdict(spec), sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) | int(chunk)))


def _as_model(spec) -> BoundaryModel:
    return spec if isinstance(spec, BoundaryModel) else build_boundary(spec)


def sample_ergodic_ic(rng: np.random.Generator, spec, n: int = 1, return_rate: bool = False):
    """n Birkhoff pairs uniform on the ergodic component (rejection of the island).

    Returns (z, sin_theta) arrays; with ``return_rate`` also the acceptance rate.
    """
    model = _as_model(spec)
    zs, ss = [], []
    got = drawn = 0
    while got < n:
        m = max(64, int(1.3 * (n - got)) + 64)
        z = rng.uniform(0.0, model.perimeter, m)
        s = rng.uniform(-1.0, 1.0, m)
        keep = ~regular_mask(z, s, model)
        zs.append(z[keep])
        ss.append(s[keep])
        got += int(keep.sum())
        drawn += m
    z = np.concatenate(zs)[:n]
    s = np.concatenate(ss)[:n]
    if return_rate:
        # acceptance over the draws actually consumed is not tracked exactly; report the batch rate
        return z, s, got / drawn
    return z, s


def particle_ics(seed: int, n: int, model: BoundaryModel, start: int = 0):
    """Initial conditions for particles start .. start+n-1 (chunk aligned streams)."""
    out_z = np.empty(n)
    out_s = np.empty(n)
    i = start
    while i < start + n:
        c = i // CHUNK
        lo = c * CHUNK
        z, s = sample_ergodic_ic(chunk_rng(seed, c), model, CHUNK)
        a = i - lo
        b = min(CHUNK, start + n - lo)
        out_z[i - start:i - start + b - a] = z[a:b]
        out_s[i - start:i - start + b - a] = s[a:b]
        i += b - a
    return out_z, out_s


@dataclass
class EscapeRecord:
    escaped: bool
    time: float
    collisions: int
    corner_flag: bool


def evolve_until_escape(ic, spec, t_max: float) -> EscapeRecord:
    """Follow one initial condition (BirkhoffCoord or ParticleState) to escape or t_max."""
    model = _as_model(spec)
    if model.hole_seg < 0:
        raise ValueError("spec has no hole")
    if isinstance(ic, BirkhoffCoord):
        st, t, n = kb.evolve_many(model.segs, np.array([ic.z]), np.array([ic.sin_theta]), model.hole_seg,
                                  model.hole_lo, model.hole_hi, float(t_max), MAX_COLL)
        st, t, n = int(st[0]), float(t[0]), int(n[0])
    else:
        st, t, n = kb.evolve(model.segs, ic.x, ic.y, ic.dx, ic.dy, ic.seg, model.hole_seg, model.hole_lo,
                             model.hole_hi, float(t_max), MAX_COLL)
    return EscapeRecord(st == 0, t, n, st == 2)


@dataclass
class SurvivalCurve:
    edges: np.ndarray          # log-spaced bin edges
    survivors: np.ndarray      # particles with escape time > t_hi of each bin
    n_particles: int           # requested
    n_valid: int               # excluding corner / failed trajectories
    seed: int
    spec_hash: str
    n_corner: int = 0
    n_failed: int = 0
    n_censored: int = 0
    t_max: float = 0.0
    collisions: int = 0
    times: np.ndarray | None = field(default=None, repr=False)  # per-particle escape times (valid only)

    @property
    def t_lo(self):
        return self.edges[:-1]

    @property
    def t_hi(self):
        return self.edges[1:]

    @property
    def fraction(self):
        return self.survivors / self.n_valid

    @property
    def stderr(self):
        f = self.fraction
        return np.sqrt(f * (1 - f) / self.n_valid)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("t_lo,t_hi,survivors,fraction,stderr\n")
            for a, b, s, f, e in zip(self.t_lo, self.t_hi, self.survivors, self.fraction, self.stderr):
                fh.write(f"{a:.10g},{b:.10g},{int(s)},{f:.10g},{e:.6g}\n")

    def survival_at(self, t):
        """Exact empirical P_e(t) from the stored escape times."""
        if self.times is None:
            raise ValueError("curve was computed without keep_times")
        srt = np.sort(self.times)
        t = np.asarray(t, dtype=float)
        return (self.n_valid - np.searchsorted(srt, t, side="right")) / self.n_valid


def survival_curve(spec, n_particles: int, t_max: float, bins: int = 200, seed: int = 0,
                   t_min: float = 0.1, keep_times: bool = True, threads: int | None = None) -> SurvivalCurve:
    """Escape-time statistics of n_particles ergodic initial conditions."""
    model = _as_model(spec)
    if model.hole_seg < 0:
        raise ValueError("spec has no hole")
    if n_particles < 1:
        raise ValueError("need at least one particle")
    set_threads(threads)
    edges = np.geomspace(t_min, t_max, bins + 1)
    hist = np.zeros(bins + 2, np.int64)
    keep = [] if keep_times else None
    n_corner = n_failed = n_cens = 0
    coll = 0
    for c in range((n_particles + CHUNK - 1) // CHUNK):
        m = min(CHUNK, n_particles - c * CHUNK)
        z, s = sample_ergodic_ic(chunk_rng(seed, c), model, CHUNK)
        st, t, n = kb.evolve_many(model.segs, z[:m], s[:m], model.hole_seg, model.hole_lo, model.hole_hi,
                                  float(t_max), MAX_COLL)
        coll += int(n.sum())
        n_corner += int((st == 2).sum())
        n_failed += int((st == 3).sum())
        good = (st == 0) | (st == 1)
        n_cens += int((st == 1).sum())
        t = np.where(st == 1, np.inf, t)   # censored: alive past every edge
        tv = t[good]
        hist += np.bincount(np.searchsorted(edges, tv, side="left"), minlength=bins + 2)[:bins + 2]
        if keep is not None:
            keep.append(tv)
    n_valid = n_particles - n_corner - n_failed
    # escapes with time <= edges[k+1] are gone by the end of bin k
    gone = np.cumsum(hist)[1:bins + 1]
    surv = n_valid - gone
    return SurvivalCurve(edges, surv, n_particles, n_valid, seed, spec_hash(model.spec), n_corner, n_failed,
                         n_cens, float(t_max), coll, np.concatenate(keep) if keep is not None else None)


def plateau_estimate(curve: SurvivalCurve, t_lo: float, t_hi: float, points: int = 64,
                     subtract_rate: float | None = None):
    """Mean of t * P_e(t) over log-spaced t in [t_lo, t_hi] with a 95% CI.

    The estimator is a per-particle sample mean, so its standard error is exact.
    With ``subtract_rate`` the exponential e^{-rate t} is removed first.
    """
    if curve.times is None:
        raise ValueError("curve was computed without keep_times")
    ts = np.geomspace(t_lo, t_hi, points)
    srt = np.sort(curve.times)
    # g(T) = mean_i t_i 1[T > t_i]; evaluate via counts per t_i
    cnt = curve.n_valid - np.searchsorted(srt, ts, side="right")
    est = float(np.mean(ts * cnt) / curve.n_valid)
    # second moment of g: E[g^2] = mean_{i,k} t_i t_k P(T > max(t_i, t_k))
    tt = np.maximum.outer(ts, ts)
    c2 = (curve.n_valid - np.searchsorted(srt, tt.ravel(), side="right")).reshape(tt.shape)
    eg2 = float(np.mean(np.outer(ts, ts) * c2) / curve.n_valid)
    se = math.sqrt(max(eg2 - est ** 2, 0.0) / curve.n_valid)
    if subtract_rate is not None:
        est -= float(np.mean(ts * np.exp(-subtract_rate * ts)))
    return est, (est - 1.96 * se, est + 1.96 * se), se


def fit_exponential_rate(curve: SurvivalCurve, t_lo: float, t_hi: float, points: int = 64) -> float:
    """Least-squares slope of -log P_e(t) on [t_lo, t_hi]."""
    ts = np.linspace(t_lo, t_hi, points)
    p = curve.survival_at(ts)
    ok = p > 0
    slope, _ = np.polyfit(ts[ok], np.log(p[ok]), 1)
    return float(-slope)


# ---------------------------------------------------------------------------
# circle map with slit

@dataclass
class PhaseMap:
    phi: np.ndarray
    theta: np.ndarray
    rho: float
    N: int
    n_samples: int
    seed: int

    @property
    def sin_theta(self):
        return np.sin(self.theta)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("phi,sin_theta\n")
            for a, b in zip(self.phi, self.sin_theta):
                fh.write(f"{a:.12g},{b:.12g}\n")


def survivor_phase_map(rho: float, N: int, n_samples: int, seed: int = 0, theta_range=None) -> PhaseMap:
    """Points (phi, theta), phi in (0, 2pi), theta in (0, arcsin rho), surviving >= N chords.

    Unit circle, slit |x| < rho on the diameter (hat base unfolded by reflection).
    """
    lo, hi = theta_range if theta_range is not None else (0.0, math.asin(rho))
    phis, ths = [], []
    for c in range((n_samples + CHUNK - 1) // CHUNK):
        m = min(CHUNK, n_samples - c * CHUNK)
        g = chunk_rng(seed, c)
        phi = g.uniform(0.0, 2 * math.pi, m)
        th = g.uniform(lo, hi, m)
        n = kb.slit_survivors(phi, th, float(rho), int(N))
        ok = n >= N
        phis.append(phi[ok])
        ths.append(th[ok])
    return PhaseMap(np.concatenate(phis), np.concatenate(ths), rho, N, n_samples, seed)


# ---------------------------------------------------------------------------
# long closed orbit

def diagnostics(spec, n_collisions: int = 10 ** 7, seed: int = 0, reference: int | None = None) -> dict:
    """Mean free path and Birkhoff-marginal uniformity along one chaotic orbit.

    Uniformity is tested with two-sample KS distances against independent
    rejection samples of the ergodic measure (``reference`` points).
    """
    from scipy.stats import ks_2samp
    model = _as_model(spec)
    g = chunk_rng(seed, 0)
    z0, s0 = sample_ergodic_ic(g, model, 1)
    x, y, dx, dy, k, s = kb.from_birkhoff(model.segs, z0[0], s0[0])
    zo = np.empty(n_collisions)
    so = np.empty(n_collisions)
    T, n, corners = kb.long_orbit(model.segs, x, y, dx, dy, k, n_collisions, zo, so)
    zo, so = zo[:n], so[:n]
    m = reference or min(n, 10 ** 7)
    zr, sr = sample_ergodic_ic(chunk_rng(seed, 1), model, m)
    sub = slice(None, None, max(1, n // 2_000_000))
    return {
        "mean_free_path": T / n,
        "collisions": int(n),
        "corners": int(corners),
        "ks_z": float(ks_2samp(zo[sub], zr).statistic),
        "ks_sin_theta": float(ks_2samp(so[sub], sr).statistic),
    }
