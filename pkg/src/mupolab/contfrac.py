"""Exact continued fractions for rationals and real quadratic irrationals.

Everything here is big-integer exact.  A quadratic surd is stored as
``(p + q*sqrt(d)) / m``; the expansion runs the classical ``(P + sqrt(D)) / Q``
state machine so periodicity is detected by state recurrence, which is exact
for every real quadratic irrational.

Inexact inputs (doubles, mpf) go through :func:`expand_interval`, which expands
an enclosing rational interval and stops as soon as the two ends disagree on a
partial quotient.
"""
from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Sequence

import mpmath as mp

from .errors import DepthExceeded, DomainError

__all__ = [
    "QuadraticSurd", "ContinuedFraction", "expand", "expand_interval", "expand_float",
    "convergents", "convergent_table", "complete_quotient", "intermediate_convergents",
    "one_sided_solutions", "parse_number",
]


def _squarefree_split(d: int, limit: int = 100_000) -> tuple[int, int]:
    """d = k^2 * d0; d0 is squarefree when d has no repeated prime factor above ``limit``.

    Periodic expansions produce radicands with dozens of digits, so full
    factorisation is out; mismatched radicands are reconciled in arithmetic.
    """
    k = 1
    f = 2
    while f * f <= d and f <= limit:
        while d % (f * f) == 0:
            d //= f * f
            k *= f
        f += 1
    r = math.isqrt(d)
    if r * r == d:
        return k * r, 1
    return k, d


def _common_radicand(d1: int, d2: int):
    """(g, a, b) with d1 = g a^2 and d2 = g b^2, or None if sqrt(d1/d2) is irrational."""
    s = math.isqrt(d1 * d2)
    if s * s != d1 * d2:
        return None
    g = math.gcd(d1, d2)
    return g, math.isqrt(d1 // g), math.isqrt(d2 // g)


class QuadraticSurd:
    """Exact real number (p + q*sqrt(d)) / m.

    Canonical form: m > 0, gcd(p, q, m) = 1, d squarefree (or 0), q = 0 iff rational.
    Arithmetic between two irrational surds requires the same d.
    """
    __slots__ = ("p", "q", "d", "m")

    def __init__(self, p=0, q=0, d=0, m=1):
        p, q, d, m = int(p), int(q), int(d), int(m)
        if m == 0:
            raise ZeroDivisionError("surd denominator is zero")
        if d < 0:
            raise DomainError("negative radicand")
        if d in (0, 1) or q == 0:
            p, q, d = p + (q if d == 1 else 0), 0, 0
        else:
            k, d = _squarefree_split(d)
            q *= k
            if d == 1:
                p, q, d = p + q, 0, 0
        if m < 0:
            p, q, m = -p, -q, -m
        g = math.gcd(math.gcd(p, q), m)
        self.p, self.q, self.d, self.m = p // g, q // g, d, m // g

    # -- constructors ---------------------------------------------------
    @classmethod
    def coerce(cls, x) -> "QuadraticSurd":
        if isinstance(x, QuadraticSurd):
            return x
        if isinstance(x, (int, Rational)):
            f = Fraction(x)
            return cls(f.numerator, 0, 0, f.denominator)
        raise TypeError(f"cannot make an exact surd from {type(x).__name__}")

    @classmethod
    def sqrt(cls, d: int) -> "QuadraticSurd":
        return cls(0, 1, d, 1)

    @property
    def is_rational(self) -> bool:
        return self.q == 0

    def as_fraction(self) -> Fraction:
        if self.q:
            raise ValueError("irrational surd")
        return Fraction(self.p, self.m)

    # -- arithmetic -------------------------------------------------------
    def _radicand(self, other):
        if self.q and other.q and self.d != other.d:
            raise ValueError(f"mixed radicands {self.d} and {other.d}")
        return self.d or other.d

    def _align(self, other):
        """Rewrite both operands over one radicand when they differ by a square factor."""
        if not (self.q and other.q) or self.d == other.d:
            return self, other
        c = _common_radicand(self.d, other.d)
        if c is None:
            raise ValueError(f"mixed radicands {self.d} and {other.d}")
        g, a, b = c
        x, y = object.__new__(QuadraticSurd), object.__new__(QuadraticSurd)
        x.p, x.q, x.d, x.m = self.p, self.q * a, g, self.m
        y.p, y.q, y.d, y.m = other.p, other.q * b, g, other.m
        return x, y

    def __add__(self, other):
        try:
            o = QuadraticSurd.coerce(other)
        except TypeError:
            return NotImplemented
        a, o = self._align(o)
        d = a._radicand(o)
        return QuadraticSurd(a.p * o.m + o.p * a.m, a.q * o.m + o.q * a.m, d, a.m * o.m)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.p, -self.q, self.d, self.m)

    def __sub__(self, other):
        try:
            o = QuadraticSurd.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = QuadraticSurd.coerce(other)
        except TypeError:
            return NotImplemented
        a, o = self._align(o)
        d = a._radicand(o)
        return QuadraticSurd(a.p * o.p + a.q * o.q * d, a.p * o.q + a.q * o.p, d, a.m * o.m)

    __rmul__ = __mul__

    def reciprocal(self) -> "QuadraticSurd":
        # m / (p + q sqrt d) = m (p - q sqrt d) / (p^2 - q^2 d)
        den = self.p * self.p - self.q * self.q * self.d
        if den == 0:
            raise ZeroDivisionError("reciprocal of zero")
        return QuadraticSurd(self.m * self.p, -self.m * self.q, self.d, den)

    def __truediv__(self, other):
        try:
            o = QuadraticSurd.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        return QuadraticSurd.coerce(other) * self.reciprocal()

    def conjugate(self) -> "QuadraticSurd":
        return QuadraticSurd(self.p, -self.q, self.d, self.m)

    # -- order ------------------------------------------------------------
    def sign(self) -> int:
        p, q = self.p, self.q
        if q == 0:
            return (p > 0) - (p < 0)
        sp, sq = (p > 0) - (p < 0), (q > 0) - (q < 0)
        if sp == 0 or sp == sq:
            return sq
        # opposite signs: compare p^2 with q^2 d (never equal, d is not a perfect square)
        return sp if p * p > q * q * self.d else sq

    def _cmp(self, other):
        try:
            return (self - QuadraticSurd.coerce(other)).sign()
        except TypeError:
            return None

    def __eq__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c == 0

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __hash__(self):
        return hash((self.p, self.q, self.d, self.m))

    def floor(self) -> int:
        if self.q == 0:
            return self.p // self.m
        r = math.isqrt(self.q * self.q * self.d)  # q^2 d is never a square here
        fl = self.p + (r if self.q > 0 else -r - 1)
        return fl // self.m

    def ceil(self) -> int:
        return -((-self).floor())

    def __floor__(self):
        return self.floor()

    def __ceil__(self):
        return self.ceil()

    # -- conversion ---------------------------------------------------------
    def to_mpf(self, dps: int = 50):
        with mp.workdps(dps + 10):
            v = (mp.mpf(self.p) + mp.mpf(self.q) * mp.sqrt(self.d)) / self.m
        return v

    def __float__(self):
        return float(self.to_mpf(30))

    def __repr__(self):
        return f"QuadraticSurd({self.p}, {self.q}, {self.d}, {self.m})"

    def __str__(self):
        if self.q == 0:
            return str(Fraction(self.p, self.m))
        q = "" if abs(self.q) == 1 else f"{abs(self.q)}*"
        num = f"{self.p} {'+' if self.q > 0 else '-'} {q}sqrt({self.d})" if self.p else \
            f"{'-' if self.q < 0 else ''}{q}sqrt({self.d})"
        return f"({num})/{self.m}" if self.m != 1 else f"({num})"


def parse_number(text: str):
    """Parse an exact real such as '871/2500', '2*(5+sqrt(2))/23' or '(sqrt(5)-1)/2'.

    Only integer literals, + - * /, unary minus and sqrt(<int>) are allowed.
    Returns Fraction for rationals, QuadraticSurd otherwise.
    """
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return QuadraticSurd(node.value)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)):
            l, r = ev(node.left), ev(node.right)
            return {ast.Add: l.__add__, ast.Sub: l.__sub__, ast.Mult: l.__mul__,
                    ast.Div: l.__truediv__}[type(node.op)](r)
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt"
                and len(node.args) == 1 and isinstance(node.args[0], ast.Constant)
                and isinstance(node.args[0].value, int)):
            return QuadraticSurd.sqrt(node.args[0].value)
        raise ValueError(f"unsupported token in exact number {text!r}")

    try:
        v = ev(ast.parse(text.strip(), mode="eval"))
    except SyntaxError as e:
        raise ValueError(f"cannot parse exact number {text!r}") from e
    return v.as_fraction() if v.is_rational else v


# ---------------------------------------------------------------------------
# continued fraction container

_KINDS = ("terminated", "periodic", "truncated")


@dataclass(frozen=True)
class ContinuedFraction:
    """[a0; a1, ..., {period}] with an explicit tail kind.

    ``pre`` holds a1.. up to (not including) the periodic block.  For kind
    'truncated' the known terms are a0 and ``pre``; nothing beyond is known.
    """
    a0: int
    pre: tuple = ()
    period: tuple = ()
    kind: str = "terminated"

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown tail kind {self.kind}")
        if any(a < 1 for a in self.pre + self.period):
            raise ValueError("partial quotients after a0 must be >= 1")
        if (self.kind == "periodic") != bool(self.period):
            raise ValueError("period block required iff kind is periodic")

    @classmethod
    def from_quotients(cls, quotients: Sequence[int], period: Sequence[int] = ()):
        q = [int(a) for a in quotients]
        return cls(q[0], tuple(q[1:]), tuple(int(a) for a in period),
                   "periodic" if period else "terminated")

    @property
    def depth(self):
        """Largest available index, or None if unbounded (periodic)."""
        return None if self.kind == "periodic" else len(self.pre)

    def available(self, i: int) -> bool:
        return i >= 0 and (self.kind == "periodic" or i <= len(self.pre))

    def __getitem__(self, i: int) -> int:
        if i == 0:
            return self.a0
        if i < 0:
            raise IndexError(i)
        if i <= len(self.pre):
            return self.pre[i - 1]
        if self.kind == "periodic":
            return self.period[(i - 1 - len(self.pre)) % len(self.period)]
        raise DepthExceeded(f"partial quotient a_{i} not available (depth {len(self.pre)}, {self.kind})")

    def terms(self, n: int) -> list:
        """a_0 .. a_n."""
        return [self[i] for i in range(n + 1)]

    def tail(self, n: int) -> "ContinuedFraction":
        """[a_n; a_{n+1}, ...]."""
        if not self.available(n):
            raise DepthExceeded(f"tail at {n} beyond depth")
        if n == 0:
            return self
        if n <= len(self.pre):
            return ContinuedFraction(self.pre[n - 1], self.pre[n:], self.period, self.kind)
        k = (n - 1 - len(self.pre)) % len(self.period)
        rot = self.period[k:] + self.period[:k]
        return ContinuedFraction(rot[0], (), rot[1:] + rot[:1], "periodic")

    def value(self):
        """Exact value (Fraction or QuadraticSurd)."""
        if self.kind == "truncated":
            raise DepthExceeded("value of a truncated expansion is not exact")
        if self.kind == "terminated":
            v = Fraction(self.pre[-1]) if self.pre else None
            for a in reversed(self.pre[:-1]):
                v = a + 1 / v
            return Fraction(self.a0) if v is None else self.a0 + 1 / v
        # purely periodic y = [b0; ..., b_{k-1}, y] = (A y + A') / (B y + B')
        A, Ap, B, Bp = 1, 0, 0, 1  # matrix product of [[b,1],[1,0]]
        for b in self.period:
            A, Ap, B, Bp = A * b + Ap, A, B * b + Bp, B
        # B y^2 + (B' - A) y - A' = 0, positive root
        disc = (Bp - A) ** 2 + 4 * B * Ap
        y = QuadraticSurd(A - Bp, 1, disc, 2 * B)
        for a in reversed(self.pre):
            y = a + y.reciprocal()
        return self.a0 + y.reciprocal()

    # -- io -----------------------------------------------------------------
    def __str__(self):
        body = [str(a) for a in self.pre]
        if self.period:
            body.append("{" + ", ".join(map(str, self.period)) + "}")
        if self.kind == "truncated":
            body.append("...")
        return f"[{self.a0}" + ("; " + ", ".join(body) if body else "") + "]"

    def to_json(self) -> dict:
        return {"a0": self.a0, "pre_period": list(self.pre), "period": list(self.period), "kind": self.kind}

    @classmethod
    def from_json(cls, obj: dict) -> "ContinuedFraction":
        return cls(int(obj["a0"]), tuple(obj.get("pre_period", ())), tuple(obj.get("period", ())), obj["kind"])

    @classmethod
    def parse(cls, text: str) -> "ContinuedFraction":
        t = text.strip()
        if not (t.startswith("[") and t.endswith("]")):
            raise ValueError(f"not a continued fraction: {text!r}")
        t = t[1:-1]
        head, _, rest = t.partition(";")
        a0 = int(head)
        truncated = rest.rstrip().endswith("...")
        rest = rest.replace("...", "")
        per = ()
        if "{" in rest:
            rest, _, pblock = rest.partition("{")
            per = tuple(int(x) for x in pblock.rstrip("}, ").split(",") if x.strip())
        pre = tuple(int(x) for x in rest.split(",") if x.strip())
        kind = "periodic" if per else ("truncated" if truncated else "terminated")
        return cls(a0, pre, per, kind)


# ---------------------------------------------------------------------------
# expansion

def expand(x, max_depth: int = 10_000) -> ContinuedFraction:
    """Exact expansion of a rational or quadratic surd.

    Rationals terminate; surds are returned with their minimal period,
    detected by recurrence of the complete-quotient state (P, Q).
    """
    if isinstance(x, (int, Rational)):
        x = QuadraticSurd.coerce(x)
    if not isinstance(x, QuadraticSurd):
        raise TypeError("expand needs an exact value; use expand_float for floats")
    if x.is_rational:
        f = x.as_fraction()
        num, den = f.numerator, f.denominator
        out = []
        while True:
            a, r = divmod(num, den)
            out.append(a)
            if r == 0:
                break
            if len(out) > max_depth:
                raise DepthExceeded("rational expansion exceeded max_depth")
            num, den = den, r
        return ContinuedFraction(out[0], tuple(out[1:]), (), "terminated")

    # x = (P + sqrt(D)) / Q with Q | D - P^2
    if x.q > 0:
        P, D, Q = x.p, x.q * x.q * x.d, x.m
    else:
        P, D, Q = -x.p, x.q * x.q * x.d, -x.m
    if (D - P * P) % Q:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    s = math.isqrt(D)
    seen: dict = {}
    quot = []
    while (P, Q) not in seen:
        if len(quot) > max_depth:
            raise DepthExceeded("no period found within max_depth")
        seen[(P, Q)] = len(quot)
        a = _floor_pq(P, s, Q)
        quot.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    start = seen[(P, Q)]
    pre, per = quot[:start], quot[start:]
    if start == 0:
        # a0 itself starts the period: keep a0 separate, rotate the block
        return ContinuedFraction(per[0], (), tuple(per[1:] + per[:1]), "periodic")
    return ContinuedFraction(pre[0], tuple(pre[1:]), tuple(per), "periodic")


def _floor_pq(P: int, s: int, Q: int) -> int:
    # floor((P + sqrt(D)) / Q) with s = isqrt(D), D nonsquare
    if Q > 0:
        return (P + s) // Q
    return -((P + s) // (-Q)) - 1


def expand_interval(lo: Fraction, hi: Fraction, max_depth: int = 200) -> ContinuedFraction:
    """Partial quotients shared by every real in [lo, hi].

    Used for inexact inputs: the expansion stops at the first quotient the two
    ends disagree on, and the tail is marked 'truncated'.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        lo, hi = hi, lo
    out = []
    while len(out) <= max_depth:
        a, b = math.floor(lo), math.floor(hi)
        if a != b:
            break
        out.append(a)
        flo, fhi = lo - a, hi - a
        if flo == 0 or fhi == 0:
            if flo == fhi == 0:
                return ContinuedFraction(out[0], tuple(out[1:]), (), "terminated")
            break
        lo, hi = 1 / fhi, 1 / flo
    if not out:
        raise DepthExceeded("interval too wide to fix even a0")
    return ContinuedFraction(out[0], tuple(out[1:]), (), "truncated")


def expand_float(x, max_depth: int = 200, rel_uncertainty: float | None = None) -> ContinuedFraction:
    """Expansion of an inexact real.

    A double is treated as known to half an ulp; an mpf to half its working
    precision; ``rel_uncertainty`` overrides both.
    """
    if isinstance(x, float):
        u = rel_uncertainty * abs(x) if rel_uncertainty is not None else math.ulp(x) / 2
        c = Fraction(x)
        return expand_interval(c - Fraction(u), c + Fraction(u), max_depth)
    x = mp.mpf(x)
    c = _mpf_fraction(x)
    u = Fraction(rel_uncertainty * abs(float(x))) if rel_uncertainty is not None else \
        abs(c) * Fraction(1, 2 ** (mp.mp.prec - 1)) + Fraction(1, 2 ** (mp.mp.prec + 60))
    return expand_interval(c - u, c + u, max_depth)


def _mpf_fraction(x) -> Fraction:
    man, exp = mp.mpf(x).man_exp
    return Fraction(int(man)) * (Fraction(2) ** int(exp))


# ---------------------------------------------------------------------------
# convergents and friends

def convergent_table(cf: ContinuedFraction, n: int) -> tuple[list, list]:
    """Numerators A_0..A_n and denominators B_0..B_n (big ints)."""
    if not cf.available(n):
        raise DepthExceeded(f"convergent {n} beyond depth {cf.depth}")
    A = [cf[0]]
    B = [1]
    a_prev, b_prev = 1, 0  # A_{-1}, B_{-1}
    for k in range(1, n + 1):
        a = cf[k]
        A.append(a * A[-1] + a_prev)
        B.append(a * B[-1] + b_prev)
        a_prev, b_prev = A[-2], B[-2]
    return A, B


def convergents(cf: ContinuedFraction, n: int) -> list:
    """A_k/B_k for k = 0..n as Fractions."""
    A, B = convergent_table(cf, n)
    return [Fraction(a, b) for a, b in zip(A, B)]


def complete_quotient(cf: ContinuedFraction, n: int):
    """zeta_n = [a_n; a_{n+1}, ...] exactly."""
    return cf.tail(n).value()


def intermediate_convergents(cf: ContinuedFraction, n: int) -> list:
    """(c A_{n+1} + A_n) / (c B_{n+1} + B_n) for 1 <= c < a_{n+2}."""
    A, B = convergent_table(cf, n + 2)
    top = cf[n + 2]
    return [Fraction(c * A[n + 1] + A[n], c * B[n + 1] + B[n]) for c in range(1, top)]


def _exact_lt(x, bound) -> bool:
    """x < bound where x is exact and bound may be float/mpf/exact."""
    if isinstance(bound, (int, Rational, QuadraticSurd)):
        return QuadraticSurd.coerce(x) < bound
    xv = QuadraticSurd.coerce(x).to_mpf(60)
    with mp.workdps(60):
        return xv < mp.mpf(bound)


def one_sided_solutions(xi, K: Callable[[int], object], q_max: int) -> list:
    """All reduced p/q, q <= q_max, with 0 <= p/q - xi < K(q)/q^2.

    Brute force over q with the single candidate p = ceil(q xi) (valid while
    K(q) < q); this is the reference the MUPO enumerators are checked against.
    """
    x = QuadraticSurd.coerce(xi)
    out = []
    for q in range(1, q_max + 1):
        p = (x * q).ceil()
        if math.gcd(p, q) != 1:
            continue
        gap = (Fraction(p) - x * q) * q  # q^2 (p/q - xi) >= 0 by construction
        if _exact_lt(gap, K(q)):
            out.append(Fraction(p, q))
    return out
