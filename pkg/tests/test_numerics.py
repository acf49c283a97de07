import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from denseorbit.numerics import (
    ComplexBall,
    IndeterminateError,
    RealBall,
    Surd,
    arg_principal,
    ball_arith,
    circle_distance,
    complex_log,
    exp_2pi_i,
    frac,
    pi_ball,
    real,
)

fractions = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**6)
small = st.fractions(min_value=-50, max_value=50, max_denominator=1000)


def contains_mp(b: RealBall, x, slack=Fraction(0)) -> bool:
    """b contains the mpmath value x, up to the oracle's own error ``slack``."""
    x = mpmath.mpf(x)
    man, exp = x.man_exp  # unsigned mantissa
    exact = int(mpmath.sign(x)) * Fraction(int(man)) * Fraction(2) ** int(exp)
    return b.lower_fraction() - slack <= exact <= b.upper_fraction() + slack


def test_exact_integer_sum_has_zero_radius():
    s = RealBall.exact_value(1) + RealBall.exact_value(2)
    assert s.rad == 0
    assert s.exact == Surd(3)


def test_product_with_exact_zero_is_exact_zero():
    x = RealBall.from_mid_rad("0.3", "1e-10")
    z = x * RealBall.exact_value(0)
    assert z.rad == 0 and z.mid == 0


def test_division_by_straddling_enclosure_raises():
    with pytest.raises(IndeterminateError, match="indeterminate division"):
        RealBall.exact_value(1) / RealBall.from_mid_rad(0, "1e-3")


def test_ball_arith_dispatch():
    a, b = real(Fraction(1, 3)), real(Fraction(1, 6))
    assert ball_arith(a, b, "+").contains(Fraction(1, 2))
    assert ball_arith(a, b, "/").exact == Surd(2)
    with pytest.raises(ValueError):
        ball_arith(a, b, "%")


@given(fractions, fractions)
def test_field_ops_enclose_exact_results(x, y):
    a = RealBall.from_mid_rad(x, 0, 64)
    b = RealBall.from_mid_rad(y, 0, 64)
    assert (a + b).contains(x + y)
    assert (a - b).contains(x - y)
    assert (a * b).contains(x * y)
    if y != 0:
        assert (a / b).contains(x / y)


@given(small, st.fractions(min_value=0, max_value=1, max_denominator=1000))
def test_inexact_inputs_keep_enclosing(x, r):
    # any point of the input enclosure maps into the output enclosure
    a = RealBall.from_mid_rad(x, r / 1000, 128)
    for t in (x - r / 1000, x, x + r / 1000):
        assert (a * a).contains(t * t)
        assert (a + 1).contains(t + 1)


@settings(max_examples=40)
@given(st.fractions(min_value=-20, max_value=20, max_denominator=97))
def test_transcendentals_against_mpmath(x):
    b = RealBall.exact_value(x, 200)
    with mpmath.workdps(120):
        xm = mpmath.mpf(x.numerator) / x.denominator
        assert contains_mp(b.exp(), mpmath.exp(xm))
        assert contains_mp(b.sin(), mpmath.sin(xm))
        assert contains_mp(b.cos(), mpmath.cos(xm))
        if x > 0:
            assert contains_mp(b.log(), mpmath.log(xm))
            assert contains_mp(b.sqrt(), mpmath.sqrt(xm))
        if -1 < x < 1:
            assert contains_mp(b.asin(), mpmath.asin(xm))


def test_sqrt_of_rational_tracks_surd():
    s = RealBall.exact_value(2, 128).sqrt()
    assert s.exact == Surd.sqrt(2)
    assert (s * s).exact == Surd(2)


def test_surd_ring_and_zero_test():
    a = Surd.sqrt(2) - 1
    b = Surd.sqrt(8) - 2
    assert b == 2 * a
    assert (a * a + 2 * a - 1).is_zero()
    assert Surd.sqrt(12) == 2 * Surd.sqrt(3)
    with pytest.raises(TypeError):
        a / Surd.sqrt(2)


@given(st.lists(st.tuples(st.sampled_from([1, 2, 3, 5, 6, 7]), small), max_size=4),
       st.lists(st.tuples(st.sampled_from([1, 2, 3, 5, 6, 7]), small), max_size=4))
def test_surd_arithmetic_matches_floats(xs, ys):
    a = sum((Surd(c) * Surd.sqrt(d) for d, c in xs), Surd(0))
    b = sum((Surd(c) * Surd.sqrt(d) for d, c in ys), Surd(0))
    fa, fb = float(a), float(b)
    assert math.isclose(float(a * b), fa * fb, rel_tol=1e-9, abs_tol=1e-6)
    assert math.isclose(float(a - b), fa - fb, rel_tol=1e-9, abs_tol=1e-6)
    assert a.enclose(128).contains(RealBall.exact_value(a, 256)) or a.is_zero()


def test_frac_floor_convention():
    assert frac(RealBall.exact_value(Fraction(15, 4))).exact == Surd(Fraction(3, 4))
    assert frac(RealBall.exact_value(Fraction(-1, 4))).exact == Surd(Fraction(3, 4))


def test_frac_rejects_wide_enclosure_and_flags_wrap():
    with pytest.raises(IndeterminateError):
        frac(RealBall.from_mid_rad("0.5", "0.3"))
    w = frac(RealBall.from_mid_rad(3, "1e-9"))
    assert w.wrapped


@given(st.fractions(min_value=-10, max_value=10, max_denominator=500),
       st.fractions(min_value=-10, max_value=10, max_denominator=500))
def test_circle_distance_oracle(x, t):
    d = circle_distance(RealBall.exact_value(x, 128), t)
    f = (x - t) % 1
    assert d.contains(min(f, 1 - f))


def test_exp_2pi_i_special_values():
    one = exp_2pi_i(ComplexBall.exact_value(0, 0, 128), 128)
    assert one.re.mid == 1 and one.re.rad == 0 and one.im.rad == 0
    i_ = exp_2pi_i(ComplexBall.exact_value(Fraction(1, 4), 0, 128), 128)
    assert i_.contains((0, 1))
    decay = exp_2pi_i(ComplexBall.exact_value(0, 1, 128), 128)
    assert abs(float(decay.re.mid) - math.exp(-2 * math.pi)) < 1e-15
    with pytest.raises(ValueError):
        exp_2pi_i(ComplexBall.exact_value(0, 0, 128), 32)


@settings(max_examples=30)
@given(st.fractions(min_value=-10**6, max_value=10**6, max_denominator=1000), st.fractions(min_value=-2, max_value=2, max_denominator=1000))
def test_exp_2pi_i_against_mpmath(a, b):
    z = exp_2pi_i(ComplexBall.exact_value(a, b, 256), 256)
    with mpmath.workdps(100):
        w = mpmath.exp(2j * mpmath.pi * (mpmath.mpf(a.numerator) / a.denominator + 1j * mpmath.mpf(b.numerator) / b.denominator))
        slack = Fraction(1, 10 ** 90)
        assert contains_mp(z.re, w.real, slack) and contains_mp(z.im, w.imag, slack)


def test_arg_principal_values():
    p = pi_ball(128)
    assert arg_principal(ComplexBall.exact_value(1, 0, 128)).contains(0)
    assert arg_principal(ComplexBall.exact_value(0, 1, 128)).overlaps(p / 2)
    assert arg_principal(ComplexBall.exact_value(-1, 0, 128)).overlaps(p)
    with pytest.raises(IndeterminateError):
        arg_principal(ComplexBall(RealBall.from_mid_rad(0, "0.1"), RealBall.from_mid_rad(0, "0.1")))


def test_complex_log_inverts_exp():
    z = ComplexBall.exact_value(Fraction(3, 2), Fraction(-1, 3), 256)
    w = complex_log(z)
    back = exp_2pi_i(ComplexBall(w.im / (pi_ball(256) * 2), -(w.re / (pi_ball(256) * 2))), 256)
    assert back.contains(z)


@given(st.fractions(min_value=-10**9, max_value=10**9, max_denominator=10**9),
       st.fractions(min_value=0, max_value=1, max_denominator=10**6))
def test_json_round_trip(mid, rad):
    b = RealBall.from_mid_rad(mid, rad, 256) * RealBall.exact_value(Fraction(1, 3), 256)
    back = RealBall.from_json(b.to_json(), 256)
    assert back.contains(RealBall.from_mid_rad(mid * Fraction(1, 3), 0, 256)) or rad
    assert back.to_json() == b.to_json()
    if b.exact is None:
        assert back.mid == b.mid and back.rad >= b.rad


def test_complex_json_round_trip_and_containment_forms():
    z = ComplexBall.exact_value(Fraction(1, 3), 2, 128)
    back = ComplexBall.from_json(z.to_json(), 128)
    assert back.contains(z) and z.contains((Fraction(1, 3), 2))
    assert ComplexBall.exact_value(2, 0, 64).contains(2)
    assert ComplexBall.exact_value(1, 1, 64).contains(complex(1, 1))


def test_huge_radicand_drops_exact_tracking_quickly():
    x = Fraction(1, 10 ** 300) ** 2 * 2 + Fraction(1, 10 ** 300) ** 2 * 7 / 3
    b = RealBall.exact_value(x, 256).sqrt()
    assert b.exact is None or (b.exact * b.exact).rational == x
    assert Surd.try_sqrt(Fraction(12, 7)) == 2 * Surd.sqrt(Fraction(3, 7))
    assert Surd.sqrt(6) * Surd.sqrt(10) == 2 * Surd.sqrt(15)
