"""numba kernels for the specular billiard flow on a segment/arc boundary.

Segment table row layout (float64):
    0 kind (0 line, 1 arc)
    1-4 line: x0 y0 x1 y1        | arc: cx cy radius (1-3), 4 unused
    5-6 arc: angle start, angle end (anticlockwise)
    7 z0 (arclength offset)  8 length
    9-10 line: unit tangent      | arc: unit vector to the start point
    11-12 arc: unit vector to the end point (arcs span at most pi)
Line parameter runs from (x0, y0); arc parameter is radius * (angle - start).
"""
import math
import warnings

import numpy as np
from numba import njit, prange

# this container's TBB is too old; numba falls back to another layer anyway
warnings.filterwarnings("ignore", message="The TBB threading layer")

LINE = 0
ARC = 1

T_MIN = 1e-12       # smallest accepted root
CORNER_TOL = 1e-10  # distance to a junction counted as a corner hit
STALL = 1e-13

OK = 0
CORNER = 1
STALLED = 2
LOST = 3


@njit(cache=True)
def _line_hit(seg, x, y, dx, dy):
    ux = seg[9]
    uy = seg[10]
    den = dx * uy - dy * ux
    if abs(den) < 1e-300:
        return -1.0, 0.0
    wx = seg[1] - x
    wy = seg[2] - y
    t = (wx * uy - wy * ux) / den
    s = (wx * dy - wy * dx) / den
    if s < -1e-12 or s > seg[8] + 1e-12:
        return -1.0, 0.0
    return t, s


@njit(cache=True)
def _arc_hit(seg, x, y, dx, dy):
    # exit root of |p + t d - c|^2 = R^2 ; the entry root is never a valid hit from inside
    px = x - seg[1]
    py = y - seg[2]
    R = seg[3]
    b = px * dx + py * dy
    c = px * px + py * py - R * R
    disc = b * b - c
    if disc < 0.0:
        return -1.0
    t = -b + math.sqrt(disc)
    hx = px + t * dx
    hy = py + t * dy
    tol = 1e-12 * R
    if seg[9] * hy - seg[10] * hx < -tol or hx * seg[12] - hy * seg[11] < -tol:
        return -1.0
    return t


@njit(cache=True)
def _arc_param(seg, x, y, dx, dy, t):
    hx = x + t * dx - seg[1]
    hy = y + t * dy - seg[2]
    da = math.atan2(hy, hx) - seg[5]
    if da < -0.5 * math.pi:
        da += 2.0 * math.pi
    da = min(max(da, 0.0), seg[6] - seg[5])
    return seg[3] * da


@njit(cache=True)
def next_hit(segs, x, y, dx, dy, last):
    """Nearest boundary hit. Returns (t, seg, param, status)."""
    best_t = 1e300
    best_k = -1
    best_s = 0.0
    for k in range(segs.shape[0]):
        seg = segs[k]
        if seg[0] == LINE:
            if k == last:
                continue
            t, s = _line_hit(seg, x, y, dx, dy)
        else:
            t = _arc_hit(seg, x, y, dx, dy)
            s = -1.0
        if t > T_MIN and t < best_t:
            best_t = t
            best_k = k
            best_s = s
    if best_k < 0:
        return 0.0, -1, 0.0, LOST
    if segs[best_k, 0] == ARC:
        best_s = _arc_param(segs[best_k], x, y, dx, dy, best_t)
    if best_t < STALL:
        return best_t, best_k, best_s, STALLED
    ln = segs[best_k, 8]
    if best_s < CORNER_TOL or best_s > ln - CORNER_TOL:
        return best_t, best_k, best_s, CORNER
    return best_t, best_k, best_s, OK


@njit(cache=True)
def normal_tangent(seg, s):
    """Inward unit normal and tangent (direction of increasing z) at parameter s."""
    if seg[0] == LINE:
        ux = seg[9]
        uy = seg[10]
        return -uy, ux, ux, uy
    a = seg[5] + s / seg[3]
    ca = math.cos(a)
    sa = math.sin(a)
    return -ca, -sa, -sa, ca


@njit(cache=True)
def point_at(seg, s):
    if seg[0] == LINE:
        ln = seg[8]
        f = s / ln
        return seg[1] + f * (seg[3] - seg[1]), seg[2] + f * (seg[4] - seg[2])
    a = seg[5] + s / seg[3]
    return seg[1] + seg[3] * math.cos(a), seg[2] + seg[3] * math.sin(a)


@njit(cache=True)
def reflect(seg, s, dx, dy):
    nx, ny, tx, ty = normal_tangent(seg, s)
    dn = dx * nx + dy * ny
    rx = dx - 2.0 * dn * nx
    ry = dy - 2.0 * dn * ny
    nrm = math.sqrt(rx * rx + ry * ry)
    return rx / nrm, ry / nrm


@njit(cache=True)
def step(segs, x, y, dx, dy, last):
    """One flight + specular reflection. Returns (x, y, dx, dy, t, seg, param, status)."""
    t, k, s, st = next_hit(segs, x, y, dx, dy, last)
    if st == LOST or st == STALLED:
        return x, y, dx, dy, t, k, s, st
    hx, hy = point_at(segs[k], s)
    rx, ry = reflect(segs[k], s, dx, dy)
    return hx, hy, rx, ry, t, k, s, st


@njit(cache=True)
def from_birkhoff(segs, z, sin_t):
    per = segs[-1, 7] + segs[-1, 8]
    z = z % per
    k = 0
    while k < segs.shape[0] - 1 and z >= segs[k + 1, 7]:
        k += 1
    s = z - segs[k, 7]
    x, y = point_at(segs[k], s)
    nx, ny, tx, ty = normal_tangent(segs[k], s)
    c = math.sqrt(max(0.0, 1.0 - sin_t * sin_t))
    return x, y, c * nx + sin_t * tx, c * ny + sin_t * ty, k, s


@njit(cache=True)
def evolve(segs, x, y, dx, dy, seg, hole_seg, hole_lo, hole_hi, t_max, max_coll):
    """Flow until escape through the hole, t_max, or a corner.

    Returns (status, time, collisions) with status 0 escaped, 1 censored,
    2 corner, 3 numerical failure.
    """
    t = 0.0
    n = 0
    last = seg
    while n < max_coll:
        ft, k, s, st = next_hit(segs, x, y, dx, dy, last)
        if st == LOST or st == STALLED:
            return 3, t, n
        if t + ft >= t_max:
            return 1, t_max, n
        t += ft
        n += 1
        if st == CORNER:
            return 2, t, n
        if k == hole_seg and s > hole_lo and s < hole_hi:
            return 0, t, n
        x, y = point_at(segs[k], s)
        dx, dy = reflect(segs[k], s, dx, dy)
        last = k
    return 1, t, n


@njit(parallel=True, cache=True)
def evolve_many(segs, z, sin_t, hole_seg, hole_lo, hole_hi, t_max, max_coll):
    m = z.shape[0]
    status = np.empty(m, np.int8)
    times = np.empty(m, np.float64)
    coll = np.empty(m, np.int64)
    for i in prange(m):
        x, y, dx, dy, k, s = from_birkhoff(segs, z[i], sin_t[i])
        if k == hole_seg and s > hole_lo and s < hole_hi:
            status[i] = 0
            times[i] = 0.0
            coll[i] = 0
            continue
        st, t, n = evolve(segs, x, y, dx, dy, k, hole_seg, hole_lo, hole_hi, t_max, max_coll)
        status[i] = st
        times[i] = t
        coll[i] = n
    return status, times, coll


@njit(cache=True)
def long_orbit(segs, x, y, dx, dy, seg, n_coll, z_out, s_out):
    """Closed-billiard orbit; fills Birkhoff samples, returns (total time, collisions done, corners)."""
    t = 0.0
    last = seg
    corners = 0
    i = 0
    while i < n_coll:
        ft, k, s, st = next_hit(segs, x, y, dx, dy, last)
        if st == LOST or st == STALLED:
            break
        x, y = point_at(segs[k], s)
        if st == CORNER:
            corners += 1
        dx, dy = reflect(segs[k], s, dx, dy)
        nx, ny, tx, ty = normal_tangent(segs[k], s)
        t += ft
        z_out[i] = segs[k, 7] + s
        s_out[i] = dx * tx + dy * ty
        last = k
        i += 1
    return t, i, corners


@njit(cache=True)
def regular_mask(segs, hat_R, r, z, sin_t, hat_segs):
    """True where (z, sin theta) starts on an orbit confined to the hat island.

    Arc: R |sin theta| > r.  Hat base: distance of the outgoing line from the
    hat centre > r (under unfolding the orbit is a circle chord family).
    """
    m = z.shape[0]
    out = np.zeros(m, np.bool_)
    for i in range(m):
        x, y, dx, dy, k, s = from_birkhoff(segs, z[i], sin_t[i])
        if hat_segs[k] == 1:
            out[i] = hat_R * abs(sin_t[i]) > r
        elif hat_segs[k] == 2:
            out[i] = abs(x * dy - y * dx) > r
    return out


@njit(parallel=True, cache=True)
def slit_survivors(phi, psi, rho, N):
    """Circle map with slit |x| < rho on the diameter y = 0 (unit circle).

    Returns the number of chords (<= N) travelled before the first slit crossing.
    """
    m = phi.shape[0]
    out = np.empty(m, np.int64)
    for i in prange(m):
        p = phi[i]
        step_ = math.pi - 2.0 * psi[i]
        x0 = math.cos(p)
        y0 = math.sin(p)
        n = 0
        while n < N:
            p += step_
            x1 = math.cos(p)
            y1 = math.sin(p)
            if (y0 > 0.0) != (y1 > 0.0):
                xc = x0 + (x1 - x0) * (-y0) / (y1 - y0)
                if abs(xc) < rho:
                    break
            x0 = x1
            y0 = y1
            n += 1
        out[i] = n
    return out
