import math

import pytest

from cardytest.closedforms import rho0_equal, rho0_single, rho0_sym3, rho0_two
from cardytest.errors import DomainError
from cardytest.slitmap import GapVector, rho0_from_gaps


def test_single():
    assert rho0_single() == 4.0
    assert math.log(rho0_single()) == pytest.approx(1.3862943611198906)
    assert 1 / rho0_single() == rho0_equal(1) ** -1


def test_two_values():
    assert rho0_two(1.0) == pytest.approx(2.0, abs=1e-15)
    # 4 (1/3)^(1/3) (2/3)^(2/3)
    assert rho0_two(2 / 3) == pytest.approx(2.1165347359576, abs=1e-12)


@pytest.mark.parametrize("g", [0.1, 0.5, 2 / 3, 1.3, 1.9])
def test_two_reversal(g):
    assert rho0_two(g) == pytest.approx(rho0_two(2 - g), rel=1e-15)


@pytest.mark.parametrize("g", [0.0, 2.0, -0.1, 2.5])
def test_two_domain(g):
    with pytest.raises(DomainError):
        rho0_two(g)


def test_equal():
    assert rho0_equal(1) == 4.0
    assert rho0_equal(2) == 2.0
    assert abs(rho0_equal(10**6) - 1.0) < 1e-5
    for m in range(1, 30):
        assert rho0_equal(m) == pytest.approx(rho0_single() ** (1 / m), rel=1e-15)
    with pytest.raises(DomainError):
        rho0_equal(0)


def test_sym3_degenerates_to_equal():
    assert rho0_sym3(2 / 3) == pytest.approx(rho0_equal(3), abs=1e-12)


def test_sym3_limits():
    assert rho0_sym3(1 - 1e-9) == pytest.approx(rho0_two(1.0), abs=1e-6)
    assert rho0_sym3(1e-9) == pytest.approx(rho0_single(), abs=1e-6)


@pytest.mark.parametrize("g", [0.05, 0.2, 0.4, 0.5, 2 / 3, 0.8, 0.95])
def test_sym3_range(g):
    assert 1.0 <= rho0_sym3(g) <= 4.0


@pytest.mark.parametrize("g", [0.0, 1.0, 1.5])
def test_sym3_domain(g):
    with pytest.raises(DomainError):
        rho0_sym3(g)


@pytest.mark.parametrize("n", range(2, 21))
def test_two_matches_solver(n):
    for a in range(1, n):
        assert rho0_from_gaps(GapVector.from_parts((a, n - a))) == pytest.approx(rho0_two(2 * a / n), abs=1e-8)


@pytest.mark.parametrize("m", range(1, 9))
def test_equal_matches_solver(m):
    assert rho0_from_gaps(GapVector.from_parts([1] * m)) == pytest.approx(rho0_equal(m), abs=1e-8)


@pytest.mark.parametrize("g", [0.2, 0.4, 0.5, 2 / 3, 0.8])
def test_sym3_matches_solver(g):
    assert rho0_from_gaps((g, g, 2 - 2 * g)) == pytest.approx(rho0_sym3(g), abs=1e-6)
