from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from denseorbit.contfrac import (
    CFTerms,
    ContFracError,
    convergents,
    smallest_rational_in,
    terms_from_denominators,
    value_bracket,
    value_enclosure,
)
from oracles import convergents_oracle, cf_value

terms = st.lists(st.integers(min_value=1, max_value=10**6), min_size=1, max_size=12)


def test_seeds_and_first_convergents():
    cs = convergents([1, 1, 15, 32])
    assert [(c.p, c.q) for c in cs] == [(1, 1), (1, 2), (16, 31), (513, 994)]


@given(terms)
def test_convergents_match_truncated_values(t):
    assert [(c.p, c.q) for c in convergents(t)] == convergents_oracle(t)


@given(terms)
def test_determinant_identity(t):
    cs = convergents(t)
    for k in range(len(cs) - 1):
        assert cs[k].p * cs[k + 1].q - cs[k + 1].p * cs[k].q == (-1) ** k


@given(terms)
def test_denominators_round_trip(t):
    qs = [c.q for c in convergents(t)]
    assert terms_from_denominators(qs).terms == tuple(t)


def test_schedule_examples():
    assert terms_from_denominators([1, 2, 31, 994]).terms == (1, 1, 15, 32)
    assert terms_from_denominators([2, 3, 32, 995]).terms == (2, 1, 10, 31)


def test_schedule_errors():
    with pytest.raises(ContFracError, match="not realizable"):
        terms_from_denominators([1, 2, 4])
    with pytest.raises(ContFracError, match="positivity"):
        terms_from_denominators([2, 1])
    with pytest.raises(ContFracError):
        terms_from_denominators([])


def test_terms_validation_and_insufficient_terms():
    with pytest.raises(ContFracError):
        CFTerms((1, 0))
    with pytest.raises(ContFracError):
        CFTerms(())
    with pytest.raises(ContFracError, match="insufficient terms"):
        convergents([1, 2], 3)
    assert CFTerms.from_json(CFTerms((3, 4)).to_json()) == CFTerms((3, 4))


@given(terms.filter(lambda t: len(t) >= 2), st.lists(st.integers(1, 50), max_size=5))
def test_enclosure_contains_every_extension(t, tail):
    b = value_enclosure(t, None, 128)
    lo, hi = value_bracket(t)
    assert b.contains(cf_value(t + tail)) and b.contains(lo) and b.contains(hi)


def test_enclosure_needs_two_terms():
    with pytest.raises(ContFracError):
        value_enclosure([1, 2, 3], 1)


def _simplest_oracle(lo, hi, max_den):
    for q in range(1, max_den + 1):
        p = -((-lo * q).__floor__())  # ceil(lo * q)
        if Fraction(p, q) <= hi:
            return Fraction(p, q)
    return None


@given(st.fractions(min_value=-3, max_value=3, max_denominator=200),
       st.fractions(min_value=0, max_value=Fraction(1, 10), max_denominator=500))
def test_smallest_rational_matches_brute_force(lo, width):
    hi = lo + width
    got = smallest_rational_in(lo, hi, max_den=300)
    want = _simplest_oracle(lo, hi, 300)
    if want is None:
        assert got is None
    else:
        assert got is not None and got.denominator == want.denominator and lo <= got <= hi


def test_smallest_rational_limits():
    assert smallest_rational_in(Fraction(2, 3), Fraction(2, 3)) == Fraction(2, 3)
    assert smallest_rational_in(Fraction(1, 1000001), Fraction(1, 1000000), max_den=100) is None
    with pytest.raises(ValueError):
        smallest_rational_in(1, 0)
