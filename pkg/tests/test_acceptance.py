"""The twelve acceptance criteria at their stated tolerances and sample sizes.

Each test prints one [PASS]/[FAIL] line; the lines are repeated in the
terminal summary so they survive output capture.
"""
import pytest

from mupolab import verify

RESULTS = []


def _run(n):
    r = verify.CHECKS[n]()
    RESULTS.append(r.line())
    print(r.line())
    assert r.passed, r.line()


def test_01_mupos_at_0815():
    _run(1)


def test_02_sticky_mupo_set():
    _run(2)


def test_03_mupo_free_certificate():
    _run(3)


def test_04_sufficient_threshold():
    _run(4)


def test_05_stadium_limit():
    _run(5)


@pytest.mark.slow
def test_06_stem_closed_form_vs_sums_vs_polygons():
    _run(6)


def test_07_remainder_bound():
    _run(7)


@pytest.mark.slow
def test_08_hat_monte_carlo_plateau():
    _run(8)


@pytest.mark.slow
def test_09_stem_monte_carlo_slope_and_plateau():
    _run(9)


@pytest.mark.slow
def test_10_no_plateau_without_mupos():
    _run(10)


@pytest.mark.slow
def test_11_phase_map_bands():
    _run(11)


@pytest.mark.slow
def test_12_property_suites():
    _run(12)
