from decimal import Decimal
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latexp.exactreal import (
    BetaSpec,
    NonPositiveInput,
    Ordering,
    PrecisionExhausted,
    RatInterval,
    dec_to_int,
    decide,
    fraction_to_sci,
    int_to_dec,
    integer_root,
    iv_abs,
    iv_add,
    iv_compare,
    iv_max,
    iv_mul,
    log_interval,
    log_magnitude,
    pow_enclosure,
    pow_floor_div,
    root_enclosure,
)

TOL = Decimal("1e-6")


def iv(lo, hi):
    return RatInterval(Fraction(lo), Fraction(hi))


def test_interval_examples():
    assert iv_mul(iv(1, 2), iv(3, 4)) == iv(3, 8)
    assert iv_abs(iv(-2, 1)) == iv(0, 2)
    assert iv_add(RatInterval.point(Fraction(1, 3)), RatInterval.point(Fraction(1, 6))) == RatInterval.point(Fraction(1, 2))
    assert iv_max(iv(1, 5), iv(2, 3)) == iv(2, 5)


def test_compare_examples():
    assert iv_compare(iv(1, 2), iv(3, 4)) is Ordering.LESS
    assert iv_compare(iv(3, 4), iv(1, 2)) is Ordering.GREATER
    assert iv_compare(iv(1, 3), iv(2, 4)) is Ordering.OVERLAP
    half = RatInterval.point(Fraction(5, 2))
    assert iv_compare(half, half) is Ordering.OVERLAP


def test_empty_interval_rejected():
    with pytest.raises(ValueError):
        RatInterval(Fraction(2), Fraction(1))


def test_reciprocal_straddling_zero():
    with pytest.raises(ZeroDivisionError):
        iv(-1, 1).reciprocal()


fractions = st.fractions(min_value=-100, max_value=100, max_denominator=50)


@st.composite
def nested(draw):
    """An interval together with a sub-interval of it."""
    a, b = sorted((draw(fractions), draw(fractions)))
    c, d = sorted((draw(fractions), draw(fractions)))
    inner_lo = a + (b - a) * min(abs(c) / 100, 1)
    inner_hi = inner_lo + (b - inner_lo) * min(abs(d) / 100, 1)
    return RatInterval(inner_lo, inner_hi), RatInterval(a, b)


@given(nested(), nested())
def test_inclusion_monotonicity(x, y):
    (xi, xo), (yi, yo) = x, y
    assert iv_mul(xi, yi).subset_of(iv_mul(xo, yo))
    assert iv_add(xi, yi).subset_of(iv_add(xo, yo))
    assert iv_abs(xi).subset_of(iv_abs(xo))


@given(fractions, fractions, fractions, fractions, fractions, fractions)
def test_products_contain_pointwise(a, b, c, d, u, v):
    x, y = RatInterval.hull(a, b), RatInterval.hull(c, d)
    px = x.lo + (x.hi - x.lo) * (abs(u) / 100)
    py = y.lo + (y.hi - y.lo) * (abs(v) / 100)
    assert iv_mul(x, y).contains(px * py)
    assert iv_add(x, y).contains(px + py)
    assert iv_abs(x).contains(abs(px))


def test_log_examples():
    assert log_magnitude(1).value == 0
    assert abs(log_magnitude(27).value - Decimal("3.295837")) < TOL
    # ln(534386) = 13.1888737..., checked against mpmath below
    assert abs(log_magnitude(534386).value - Decimal("13.188874")) < TOL
    with pytest.raises(NonPositiveInput):
        log_magnitude(0)
    with pytest.raises(NonPositiveInput):
        log_magnitude(Fraction(-1, 2))


def test_log_of_huge_integer():
    n = 3**2_000_000  # about 950k digits
    got = log_magnitude(n)
    assert got.abs_err <= TOL
    expected = Decimal(2_000_000) * Decimal(3).ln(context=None)
    assert abs(got.value - expected) < TOL


@settings(max_examples=60)
@given(st.integers(1, 10**400), st.integers(1, 10**400), st.integers(1, 10**50), st.integers(1, 10**50))
def test_log_additive(a, b, c, d):
    x, y = Fraction(a, c), Fraction(b, d)
    lhs = log_magnitude(x * y).value
    rhs = log_magnitude(x).value + log_magnitude(y).value
    assert abs(lhs - rhs) <= Decimal("3e-6")


@settings(max_examples=40)
@given(st.integers(1, 10**60), st.integers(0, 10**30))
def test_log_matches_mpmath(n, extra):
    with mpmath.workdps(50):
        ref = mpmath.log(mpmath.mpf(n) + extra)
    got = log_magnitude(n + extra)
    assert abs(got.value - Decimal(mpmath.nstr(ref, 40))) <= got.abs_err + Decimal("1e-30")


def test_log_interval_encloses_endpoints():
    enc = log_interval(iv(Fraction(1, 3), 7))
    assert enc.contains(log_magnitude(Fraction(1, 3)).value)
    assert enc.contains(log_magnitude(7).value)


def test_beta_spec():
    assert BetaSpec.parse("3/2") == BetaSpec(3, 2)
    assert BetaSpec(6, 4) == BetaSpec(3, 2)
    assert str(BetaSpec(2)) == "2/1"
    for bad in ("1/1", "1", "2/3", "0"):
        with pytest.raises(ValueError, match="beta must exceed 1"):
            BetaSpec.parse(bad)


def test_pow_floor_div_examples():
    assert pow_floor_div(5, BetaSpec(2), 1, 2) == 12
    assert pow_floor_div(27, BetaSpec(2), 1, 5) == 145
    assert pow_floor_div(4, BetaSpec(3, 2), 0, 1) == 8


@given(st.integers(1, 10**6), st.integers(2, 5), st.integers(1, 4), st.integers(0, 100), st.integers(1, 1000))
def test_pow_floor_div_perfect_powers(root, den, num_extra, sub, div):
    beta = BetaSpec(den + num_extra, den)
    s = root**den
    exact = root ** (den + num_extra)
    assert pow_floor_div(s, beta, sub, div) == (exact - sub) // div


@settings(max_examples=60)
@given(st.integers(2, 10**40), st.integers(0, 10**6), st.integers(1, 10**6))
def test_pow_floor_div_irrational_case(s, sub, div):
    beta = BetaSpec(3, 2)
    got = pow_floor_div(s, beta, sub, div)
    # floor((s^1.5 - sub)/div) = got  <=>  got*div + sub <= s^1.5 < (got+1)*div + sub
    lo, hi = got * div + sub, (got + 1) * div + sub
    assert (lo <= 0 or lo * lo <= s**3) and hi * hi > s**3


def test_escalation_hits_cap():
    with pytest.raises(PrecisionExhausted):
        decide(lambda bits: (iv(0, 1), iv(0, 1)), cap=256)


def test_root_enclosure():
    enc = root_enclosure(2, 2, 64)
    assert enc.lo**2 < 2 < enc.hi**2
    assert enc.width == Fraction(1, 2**64)
    assert root_enclosure(81, 4, 10).is_exact
    assert integer_root(80, 4) == (2, False)
    assert pow_enclosure(4, BetaSpec(3, 2), 8) == RatInterval.point(8)


def test_determinism():
    a = [pow_floor_div(10**30 + 7, BetaSpec(7, 5), 3, 11) for _ in range(3)]
    b = [log_magnitude(Fraction(10**500 + 1, 7)) for _ in range(3)]
    assert len(set(a)) == 1 and len(set(b)) == 1


def test_big_decimal_round_trip():
    n = 7**20000
    assert dec_to_int(int_to_dec(n)) == n
    assert int_to_dec(-12) == "-12"


@pytest.mark.parametrize("x,digits,direction,expected", [
    (Fraction(3, 4), 12, "nearest", "7.50000000000e-1"),
    (Fraction(1, 3), 3, "down", "3.33e-1"),
    (Fraction(1, 3), 3, "up", "3.34e-1"),
    (Fraction(-1, 3), 3, "up", "-3.33e-1"),
    (Fraction(999999), 3, "up", "1.00e+6"),
    (Fraction(0), 5, "nearest", "0"),
])
def test_fraction_to_sci(x, digits, direction, expected):
    assert fraction_to_sci(x, digits, direction) == expected


@given(st.fractions(min_value=Fraction(1, 10**9), max_value=10**9))
def test_sci_rounding_is_outward(x):
    assert Fraction(fraction_to_sci(x, 6, "down").replace("e", "E")) <= x
    assert Fraction(fraction_to_sci(x, 6, "up").replace("e", "E")) >= x
