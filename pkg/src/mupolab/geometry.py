"""Mushroom billiard domain: a semicircular hat of radius R on a stem of half-width r.

Coordinates: hat centre at the origin, hat = upper half disk, hat base on
y = 0 for r <= |x| <= R.  Rectangular stem occupies |x| <= r, -L <= y <= 0;
triangular stem is the isoceles triangle (-r, 0), (r, 0), (0, -L).

Boundary arclength z starts at (R, 0) and runs anticlockwise: arc, left hat
base, stem, right hat base.  The Birkhoff pair is (z, sin theta) with theta the
angle of the outgoing direction from the inward normal, positive towards
increasing z.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, asdict
from enum import Enum

import numpy as np

from . import _billiard as kb
from .errors import CornerHit, InvalidGeometry, NotOnBoundary, NumericalStall, UnsupportedAlpha

__all__ = [
    "Stem", "HoleSpec", "MushroomSpec", "BoundaryModel", "ParticleState", "BirkhoffCoord",
    "build_boundary", "next_collision", "to_birkhoff", "from_birkhoff", "in_regular_region",
    "circle_map_step", "regular_mask", "geometry_summary",
]


class HoleWall(str, Enum):
    RectStemRightWall = "RectStemRightWall"
    TriangularStemEdge = "TriangularStemEdge"


@dataclass(frozen=True)
class Stem:
    kind: str       # 'triangular' | 'rectangular'
    L: float

    def __post_init__(self):
        if self.kind not in ("triangular", "rectangular"):
            raise InvalidGeometry(f"unknown stem kind {self.kind!r}")


@dataclass(frozen=True)
class HoleSpec:
    wall: str
    lo: float
    hi: float

    @property
    def eps(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class MushroomSpec:
    R: float
    r: float
    stem: Stem
    alpha: float = 0.5
    hole: HoleSpec | None = None

    def __post_init__(self):
        if not (0 < self.r < self.R):
            raise InvalidGeometry(f"need 0 < r < R, got r={self.r}, R={self.R}")
        if not self.stem.L > 0:
            raise InvalidGeometry(f"stem length must be positive, got {self.stem.L}")
        if not 0 < self.alpha <= 1:
            raise InvalidGeometry(f"hat fraction alpha must lie in (0, 1], got {self.alpha}")

    @classmethod
    def simple(cls, R=1.0, rho=0.5, L=1.0, kind="rectangular", hole=None, alpha=0.5):
        return cls(R, rho * R, Stem(kind, L), alpha, hole)

    @property
    def rho(self) -> float:
        return self.r / self.R

    @property
    def zeta(self) -> int:
        return math.ceil(self.R / self.r - 1e-12)

    @property
    def L(self) -> float:
        return self.stem.L

    def stem_wall_length(self) -> float:
        if self.stem.kind == "rectangular":
            return self.stem.L
        return math.hypot(self.r, self.stem.L)

    def with_hole(self, hole):
        return MushroomSpec(self.R, self.r, self.stem, self.alpha, hole)


@dataclass(frozen=True)
class ParticleState:
    x: float
    y: float
    dx: float
    dy: float
    time: float = 0.0
    seg: int = -1    # segment of the last collision, -1 if interior


@dataclass(frozen=True)
class BirkhoffCoord:
    z: float
    sin_theta: float


@dataclass
class BoundaryModel:
    spec: MushroomSpec
    segs: np.ndarray          # see _billiard for the row layout
    names: list
    hat_flags: np.ndarray     # 1 arc, 2 hat base, 0 stem
    perimeter: float
    area: float
    stem_area: float
    hole_seg: int = -1
    hole_lo: float = 0.0      # in segment parameter
    hole_hi: float = 0.0

    @property
    def junctions(self) -> np.ndarray:
        return np.array([kb.point_at(s, 0.0) for s in self.segs])


def _line(x0, y0, x1, y1):
    ln = math.hypot(x1 - x0, y1 - y0)
    return [kb.LINE, x0, y0, x1, y1, 0.0, 0.0, 0.0, ln, (x1 - x0) / ln, (y1 - y0) / ln, 0.0, 0.0]


def _arc(cx, cy, R, a0, a1):
    if not 0 < a1 - a0 <= math.pi + 1e-15:
        raise InvalidGeometry("arc segments must span (0, pi]")
    return [kb.ARC, cx, cy, R, 0.0, a0, a1, 0.0, R * (a1 - a0),
            math.cos(a0), math.sin(a0), math.cos(a1), math.sin(a1)]


def build_boundary(spec: MushroomSpec) -> BoundaryModel:
    """Ordered segment table plus perimeter, area and stem area."""
    if abs(spec.alpha - 0.5) > 1e-15:
        raise UnsupportedAlpha("billiard geometry is built for the semicircular hat only")
    R, r, L = spec.R, spec.r, spec.stem.L
    rows = [_arc(0.0, 0.0, R, 0.0, math.pi),
            _line(-R, 0.0, -r, 0.0)]
    names = ["arc", "base_left"]
    if spec.stem.kind == "rectangular":
        rows += [_line(-r, 0.0, -r, -L), _line(-r, -L, r, -L), _line(r, -L, r, 0.0)]
        names += ["stem_left", "stem_bottom", "stem_right"]
        stem_area = 2 * r * L
    else:
        rows += [_line(-r, 0.0, 0.0, -L), _line(0.0, -L, r, 0.0)]
        names += ["slant_left", "slant_right"]
        stem_area = r * L
    rows.append(_line(r, 0.0, R, 0.0))
    names.append("base_right")
    segs = np.array(rows, dtype=np.float64)
    z = 0.0
    for row in segs:
        row[7] = z
        z += row[8]
    hat = np.array([1 if n == "arc" else 2 if n.startswith("base") else 0 for n in names], dtype=np.int64)
    model = BoundaryModel(spec, segs, names, hat, z, math.pi * R * R / 2 + stem_area, stem_area)

    h = spec.hole
    if h is not None:
        if spec.stem.kind == "rectangular":
            if h.wall != HoleWall.RectStemRightWall:
                raise InvalidGeometry("rectangular stem takes a RectStemRightWall hole")
            k = names.index("stem_right")
            lo, hi = h.lo, h.hi   # measured upward from the stem bottom
        else:
            if h.wall != HoleWall.TriangularStemEdge:
                raise InvalidGeometry("triangular stem takes a TriangularStemEdge hole")
            k = names.index("slant_right")
            ln = segs[k, 8]
            lo, hi = ln - h.hi, ln - h.lo  # measured from the hat-base end
        ln = segs[k, 8]
        if not (0 <= h.lo < h.hi <= ln):
            raise InvalidGeometry(f"hole ({h.lo}, {h.hi}) outside wall of length {ln}")
        if h.eps > 0.2 * ln:
            warnings.warn(f"hole size {h.eps} exceeds 20% of its wall")
        model.hole_seg, model.hole_lo, model.hole_hi = k, lo, hi
    return model


def geometry_summary(model: BoundaryModel) -> dict:
    s = model.spec
    return {"perimeter": model.perimeter, "area": model.area, "stem_area": model.stem_area,
            "rho": s.rho, "zeta": s.zeta}


# ---------------------------------------------------------------------------
# collision map

def next_collision(state: ParticleState, model: BoundaryModel):
    """Fly to the next wall and reflect.  Returns (state, flight_time, segment_id)."""
    x, y, dx, dy, t, k, s, st = kb.step(model.segs, state.x, state.y, state.dx, state.dy, state.seg)
    if st == kb.STALLED:
        raise NumericalStall(f"flight time {t:.3g} below threshold")
    if st == kb.LOST:
        raise NumericalStall("no boundary intersection found (state outside the domain?)")
    if st == kb.CORNER:
        raise CornerHit(f"impact within {kb.CORNER_TOL} of a junction on segment {model.names[k]}")
    return ParticleState(x, y, dx, dy, state.time + t, k), t, k


def _locate(state: ParticleState, model: BoundaryModel, tol=1e-9):
    cands = [state.seg] if state.seg >= 0 else range(len(model.segs))
    for k in cands:
        seg = model.segs[k]
        if seg[0] == kb.LINE:
            ln = seg[8]
            ux, uy = (seg[3] - seg[1]) / ln, (seg[4] - seg[2]) / ln
            wx, wy = state.x - seg[1], state.y - seg[2]
            s = wx * ux + wy * uy
            if -tol <= s <= ln + tol and abs(wx * uy - wy * ux) < tol:
                return k, min(max(s, 0.0), ln)
        else:
            px, py = state.x - seg[1], state.y - seg[2]
            if abs(math.hypot(px, py) - seg[3]) < tol:
                a = math.atan2(py, px) - seg[5]
                if a < -1e-9:
                    a += 2 * math.pi
                if -tol <= a <= seg[6] - seg[5] + tol:
                    return k, seg[3] * min(max(a, 0.0), seg[6] - seg[5])
    raise NotOnBoundary(f"({state.x}, {state.y}) is not on the boundary")


def to_birkhoff(state: ParticleState, model: BoundaryModel) -> BirkhoffCoord:
    """Birkhoff pair of the outgoing direction (an incoming one is reflected first)."""
    k, s = _locate(state, model)
    seg = model.segs[k]
    nx, ny, tx, ty = kb.normal_tangent(seg, s)
    dx, dy = state.dx, state.dy
    if dx * nx + dy * ny < 0:
        dx, dy = kb.reflect(seg, s, dx, dy)
    return BirkhoffCoord(seg[7] + s, dx * tx + dy * ty)


def from_birkhoff(coord: BirkhoffCoord, model: BoundaryModel) -> ParticleState:
    x, y, dx, dy, k, s = kb.from_birkhoff(model.segs, coord.z, coord.sin_theta)
    return ParticleState(x, y, dx, dy, 0.0, k)


def regular_mask(z, sin_theta, model: BoundaryModel) -> np.ndarray:
    z = np.ascontiguousarray(z, dtype=np.float64)
    st = np.ascontiguousarray(sin_theta, dtype=np.float64)
    return kb.regular_mask(model.segs, model.spec.R, model.spec.r, z, st, model.hat_flags)


def in_regular_region(coord: BirkhoffCoord, model: BoundaryModel) -> bool:
    """True if the orbit through coord never leaves the hat (integrable island).

    Hat-base collisions are included: under unfolding they belong to the same
    circle chord family, so the island measure comes out right.
    """
    return bool(regular_mask(np.array([coord.z]), np.array([coord.sin_theta]), model)[0])


def circle_map_step(phi: float, psi: float) -> tuple[float, float]:
    """(phi, psi) -> (phi + pi - 2 psi mod 2 pi, psi)."""
    return (phi + math.pi - 2.0 * psi) % (2.0 * math.pi), psi
