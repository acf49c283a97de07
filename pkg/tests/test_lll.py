import doctest
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from denseorbit import lll
from denseorbit.lll import babai_nearest_plane, gram_schmidt, lll_reduce

rows3 = st.lists(st.lists(st.integers(-60, 60), min_size=3, max_size=3), min_size=3, max_size=3)


def _det3(b):
    return (b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
            - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
            + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]))


def test_doctests():
    assert doctest.testmod(lll).failed == 0


@settings(max_examples=60)
@given(rows3.filter(lambda b: _det3(b) != 0))
def test_reduction_preserves_lattice_and_is_reduced(b):
    r = lll_reduce(b)
    assert abs(_det3(r)) == abs(_det3(b))
    _, mu, norms = gram_schmidt(r)
    for i in range(3):
        for j in range(i):
            assert abs(mu[i][j]) <= Fraction(1, 2)
    for k in range(1, 3):
        assert norms[k] >= (Fraction(3, 4) - mu[k][k - 1] ** 2) * norms[k - 1]


@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(-50, 50))
def test_babai_recovers_lattice_points(x, y, z):
    basis = lll_reduce([[1, 0, 7], [0, 1, 11], [0, 0, 13]])
    v = [x * a + y * b + z * c for a, b, c in zip(*basis)]
    assert babai_nearest_plane(basis, v) == v
