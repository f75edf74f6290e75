import math
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from mupolab.contfrac import ContinuedFraction, QuadraticSurd, convergent_table, expand, parse_number
from mupolab.mupo import (FinitelySticky, InfinitelySticky, MupoFreeCertified, classify, enumerate_mupos,
                          enumerate_mupos_generalized, infinite_threshold_rho, intermediate_K, k_bound,
                          mupo_free_sufficient, odd_convergent_K, pq_to_sj, q_min, r2_bound, sj_to_pq,
                          sufficient_threshold_rho, taylor_remainder)

from conftest import FREE_XI, STICKY_THETA

HALF = Fraction(1, 2)


def sj(ms):
    return [(m.s, m.j) for m in ms]


def test_enumeration_at_0815():
    assert sj(enumerate_mupos(0.815, 919)) == [(4, 1), (5, 1), (66, 13)]
    assert sj(enumerate_mupos(0.815, 920)) == [(4, 1), (5, 1), (66, 13), (920, 181)]


def test_square_and_pentagon_records():
    four, five, _ = enumerate_mupos(0.815, 100)
    assert four.lam == 1 and five.lam == 2
    assert four.theta_sj == pytest.approx(math.pi / 4)
    assert four.alpha_sj == pytest.approx(math.cos(math.pi / 4))
    assert four.beta_sj == pytest.approx(1.0)
    assert five.weight == 2 * (5 + 2)


def test_sticky_set_exact_theta():
    ms = enumerate_mupos(theta_star=Fraction(871, 2500), s_max=5000)
    strict = [m for m in ms if not m.border]
    border = [m for m in ms if m.border]
    assert sj(strict) == [(20, 7), (66, 23), (376, 131)]
    assert sj(border) == [(2500, 871)]


def test_sticky_set_float_rho():
    rho = math.cos(0.3484 * math.pi)
    assert rho == pytest.approx(0.458463, abs=1e-6)
    strict = [m for m in enumerate_mupos(rho, 2000, include_border=False)]
    assert sj(strict) == [(20, 7), (66, 23), (376, 131)]


@given(st.integers(1, 400), st.integers(1, 400))
def test_sj_pq_roundtrip(s, j):
    if not (2 * j < s and math.gcd(s, j) == 1):
        return
    p, q = sj_to_pq(s, j)
    assert pq_to_sj(p, q) == (s, j)
    # same angle: j pi / s == alpha p pi / q at alpha = 1/2
    assert Fraction(j, s) == Fraction(p, 2 * q)


@pytest.mark.parametrize("rho", [0.3, 0.45, 0.5546, 0.62, 0.7, 0.815, 0.9, 0.95])
def test_cross_enumeration_half(rho):
    s_max = 600
    a = sorted(sj_to_pq(m.s, m.j) for m in enumerate_mupos(rho, s_max))
    gen = enumerate_mupos_generalized(rho, HALF, q_max=s_max)
    b = sorted((p, q) for p, q in gen if pq_to_sj(p, q)[0] <= s_max)
    assert a == b


def test_free_example_no_solutions(free_rho):
    assert enumerate_mupos_generalized(free_rho, HALF, q_max=95) == []
    assert enumerate_mupos(theta_star=parse_number("(5+sqrt(2))/23"), s_max=190) == []


def test_k_bound_limit_quarter_pi():
    rho = 1 / math.sqrt(2)
    prev = None
    for Q in (10 ** 2, 10 ** 3, 10 ** 4):
        k = float(k_bound(rho, HALF, Q, Q))
        # K(Q, Q) - pi/4 shrinks like Q^-2
        if prev is not None:
            assert (k - math.pi / 4) < (prev - math.pi / 4) / 50
        prev = k
    assert prev == pytest.approx(math.pi / 4, abs=1e-6)


def test_k_bound_free_example(free_rho):
    assert float(k_bound(free_rho, HALF, 95, 95)) < 0.6549
    # decreasing in q
    assert k_bound(free_rho, HALF, 500, 95) < k_bound(free_rho, HALF, 95, 95)


@given(st.floats(0.05, 0.9), st.integers(1, 50), st.integers(0, 40), st.floats(0, 3))
def test_remainder_bound_holds(rho, k, dQ, logq):
    alpha = Fraction(k, 100)
    Q = math.floor(q_min(rho, alpha)) + 1 + dQ
    q = max(Q, int(Q * 10 ** logq))
    ts = math.acos(rho) / math.pi
    p = math.ceil(q * ts / float(alpha))
    if float(alpha) * p / q >= 0.5 or float(alpha) * math.pi / q >= math.pi / 2:
        return
    try:
        bound = r2_bound(rho, alpha, q, Q)
    except Exception:
        return
    assert taylor_remainder(rho, alpha, p, q) <= bound


def test_sufficient_threshold_value():
    assert sufficient_threshold_rho(HALF) == pytest.approx(0.390683, abs=5e-7)
    assert infinite_threshold_rho(HALF) == pytest.approx(4 / math.sqrt(16 + math.pi ** 2), rel=1e-12)


def test_sufficient_condition_low_rho():
    # at alpha = 1/2 a small rho forces a large a_2; a narrower hat admits even quotients of 1
    alpha = Fraction(1, 4)
    cf = ContinuedFraction.from_quotients([1], [1, 1])
    rho = math.cos(math.pi * float(cf.value() * alpha))
    assert rho < sufficient_threshold_rho(alpha, 1)
    assert mupo_free_sufficient(cf, rho, alpha, Q=100)
    # the same hat with a rho above the threshold is not certified by this route
    cf2 = ContinuedFraction.from_quotients([0, 1], [1, 4])
    assert not mupo_free_sufficient(cf2, math.cos(math.pi * float(cf2.value() * alpha)), alpha, Q=100)


def test_odd_convergent_bounds():
    cf = expand(parse_number(FREE_XI))
    k5 = odd_convergent_K(cf, 5)
    assert float(k5) == pytest.approx(0.706, abs=5e-4)
    for n in range(5, 30, 2):
        kn = odd_convergent_K(cf, n)
        assert k5 <= kn < QuadraticSurd.sqrt(2) / 2


@pytest.mark.parametrize("m", [2, 4, 7, 12])
def test_first_odd_convergent_closed_form(m):
    cf = ContinuedFraction.from_quotients([0, 1], [1, m])
    assert float(odd_convergent_K(cf, 1)) == pytest.approx(2 * m / (3 * m + math.sqrt(m * (4 + m))), rel=1e-13)


def test_odd_convergent_dual_path():
    x = parse_number(FREE_XI)
    cf = expand(x)
    A, B = convergent_table(cf, 15)
    with mp.workdps(60):
        xv = x.to_mpf(60)
        for n in (5, 7, 9, 11, 13):
            direct = B[n] ** 2 * (mp.mpf(A[n]) / B[n] - xv)
            assert abs(direct - odd_convergent_K(cf, n).to_mpf(60)) < mp.mpf(10) ** -50


def test_intermediate_bounds():
    cf = expand(parse_number(FREE_XI))
    base = intermediate_K(cf, 5, 1)
    assert float(base) == pytest.approx(1.237, abs=5e-4)
    for n in range(5, 25, 2):
        if cf[n + 2] != 4:
            continue
        for c in (1, 2, 3):
            v = intermediate_K(cf, n, c)
            assert base <= v
            assert v < Fraction(4 + 4 * c - c * c, 8) * QuadraticSurd.sqrt(2)


def test_classify_free():
    res = classify(parse_number(FREE_XI), HALF, Q=95)
    assert isinstance(res, MupoFreeCertified)


def test_classify_rational_finite():
    res = classify(2 * Fraction(STICKY_THETA))
    assert isinstance(res, FinitelySticky)
    assert sj(res.set) == [(20, 7), (66, 23), (376, 131)]
    assert sj(res.border) == [(2500, 871)]


@pytest.mark.parametrize("text", ["2*(sqrt(2)-1)/5", "(sqrt(3)-1)/4", "(sqrt(5)-1)/6"])
def test_classify_high_rho_infinite(text):
    xi = parse_number(text)
    rho = math.cos(math.pi * float(xi) / 2)
    assert rho > infinite_threshold_rho(HALF)
    assert isinstance(classify(xi), InfinitelySticky)


def test_classify_golden_infinite():
    assert isinstance(classify(parse_number("(sqrt(5)-1)/2")), InfinitelySticky)


def test_classify_to_json_kinds():
    for xi in (parse_number(FREE_XI), 2 * Fraction(STICKY_THETA)):
        d = classify(xi).to_json()
        assert d["kind"] in ("MupoFreeCertified", "FinitelySticky", "InfinitelySticky", "UndecidedUpTo")
