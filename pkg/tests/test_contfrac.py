import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from mupolab.contfrac import (ContinuedFraction, QuadraticSurd, complete_quotient, convergent_table,
                              convergents, expand, intermediate_convergents, one_sided_solutions,
                              parse_number)
from mupolab.mupo import k_bound

from conftest import FREE_XI


def surd(text):
    return parse_number(text)


def test_half_expansion():
    cf = expand(Fraction(1, 2))
    assert cf.terms(1) == [0, 2]
    assert str(cf) == "[0; 2]"


def test_free_example_expansion():
    cf = expand(surd(FREE_XI))
    assert cf.terms(3) == [0, 1, 1, 3]
    assert list(cf.period) == [1, 4]
    assert [cf[i] for i in range(4, 10)] == [1, 4, 1, 4, 1, 4]


@pytest.mark.parametrize("m", [2, 5, 10, 17])
def test_periodic_one_m_value(m):
    # exact value of [0; 1, {1, m}] (see ledger for the printed variant)
    cf = ContinuedFraction.from_quotients([0, 1], [1, m])
    v = cf.value()
    expected = (QuadraticSurd(m - 2, 1, m * m + 4 * m, 4 * m - 2))
    assert v == expected
    # independent oracle: sympy's periodic continued fraction reducer
    ref = sympy.continued_fraction_reduce([0, 1, [1, m]])
    assert abs(float(v) - float(ref)) < 1e-14


def test_convergents_and_determinant():
    cf = expand(surd(FREE_XI))
    assert convergents(cf, 5) == [Fraction(0), Fraction(1), Fraction(1, 2), Fraction(4, 7), Fraction(5, 9),
                                  Fraction(24, 43)]
    A, B = convergent_table(cf, 30)
    for k in range(1, 31):
        assert A[k] * B[k - 1] - A[k - 1] * B[k] in (1, -1)


@pytest.mark.parametrize("text,expected", [
    ("[1; 4, {1, 4}]", "(1+sqrt(2))/2"),
    ("[4; 1, {4, 1}]", "2+2*sqrt(2)"),
    ("[6; 1, {6, 1}]", "3+sqrt(15)"),
])
def test_complete_quotients(text, expected):
    cf = ContinuedFraction.parse(text)
    assert complete_quotient(cf, 0) == surd(expected)


def test_complete_quotient_inside_expansion():
    cf = expand(surd(FREE_XI))
    # zeta_{n+1} at the start of the period
    assert complete_quotient(cf, 4) == surd("(1+sqrt(2))/2")
    assert complete_quotient(cf, 5) == surd("2+2*sqrt(2)")


def test_intermediates_between_convergents():
    cf = expand(surd(FREE_XI))
    n = 3      # a_{n+2} = 4
    assert cf[n + 2] == 4
    mids = intermediate_convergents(cf, n)
    assert len(mids) == 3
    c = convergents(cf, n + 2)
    lo, hi = sorted((c[n], c[n + 2]))
    assert all(lo < x < hi for x in mids)


@given(st.integers(1, 40), st.integers(1, 60), st.integers(1, 15))
def test_intermediates_strictly_between_random(a, b, c):
    x = QuadraticSurd(a, 1, b * b + c + 1, a + 2 * b + 1)   # generic irrational surd in (0, 1)-ish
    if x.is_rational:
        return
    cf = expand(x)
    conv = convergents(cf, 8)
    for n in range(0, 6):
        lo, hi = sorted((conv[n], conv[n + 2]))
        assert all(lo < y < hi for y in intermediate_convergents(cf, n))


@given(st.fractions(min_value=-50, max_value=50, max_denominator=10 ** 6))
def test_rational_expansion_roundtrip(x):
    cf = expand(x)
    assert cf.value() == x
    assert ContinuedFraction.parse(str(cf)).value() == x
    assert ContinuedFraction.from_json(cf.to_json()).value() == x


@given(st.integers(0, 30), st.integers(2, 400).filter(lambda d: math.isqrt(d) ** 2 != d), st.integers(1, 30))
def test_surd_expansion_roundtrip(p, d, q):
    x = QuadraticSurd(p, 1, d, q)
    cf = expand(x)
    assert cf.period, "quadratic irrationals have eventually periodic expansions"
    assert cf.value() == x
    assert float(x) == pytest.approx((p + math.sqrt(d)) / q, rel=1e-14)


def test_one_sided_free_example_empty():
    xi = surd(FREE_XI)
    rho = math.cos((5 + math.sqrt(2)) * math.pi / 23)
    # the bound K(q, 95) covers q >= 95; smaller q are settled by the exact MUPO test
    sols = one_sided_solutions(xi, lambda q: k_bound(rho, Fraction(1, 2), max(q, 95), 95, check=False), 2000)
    assert [s for s in sols if s.denominator >= 95] == []


def test_one_sided_golden_all_odd_convergents():
    xi = surd("(sqrt(5)-1)/2")
    sols = one_sided_solutions(xi, lambda q: 1, 50)
    cf = expand(xi)
    conv = convergents(cf, 12)
    above = {c.denominator for c in conv if c > xi and c.denominator <= 50}
    assert above <= {s.denominator for s in sols}
    assert all(s > xi for s in sols)


def test_parse_number_rejects_garbage():
    with pytest.raises(ValueError):
        parse_number("import os")


def test_radicands_with_large_square_factor_compare_equal():
    big = 100_003                      # prime above the trial-division limit
    x = QuadraticSurd(0, 1, 2 * big * big, 1)
    y = QuadraticSurd(0, big, 2, 1)
    assert x == y
    assert (x - y).is_rational
    assert x * y == 2 * big * big


def test_long_period_value_roundtrip():
    x = QuadraticSurd(0, 1, 9_999_991, 1)   # long period, radicand of the periodic part is huge
    cf = expand(x)
    assert len(cf.period) > 20
    assert cf.value() == x
