"""Textbook LLL reduction over the integers, exact rational Gram-Schmidt.

Meant for the 3x3 embeddings used by the search code; no attempt is made at
floating-point speedups.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def gram_schmidt(b: list[list[int]]):
    """Exact Gram-Schmidt: (b*, mu, squared norms of b*)."""
    n = len(b)
    bstar: list[list[Fraction]] = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    norms: list[Fraction] = []
    for i in range(n):
        v = [Fraction(x) for x in b[i]]
        for j in range(i):
            mu[i][j] = _dot(b[i], bstar[j]) / norms[j] if norms[j] else Fraction(0)
            v = [vi - mu[i][j] * bj for vi, bj in zip(v, bstar[j])]
        bstar.append(v)
        norms.append(_dot(v, v))
    return bstar, mu, norms


def lll_reduce(basis: Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)) -> list[list[int]]:
    """Return an LLL-reduced basis (rows) of the lattice spanned by ``basis``.

    >>> lll_reduce([[1, 0], [7, 1]])
    [[1, 0], [0, 1]]
    """
    b = [[int(x) for x in row] for row in basis]
    n = len(b)
    if n == 0:
        return b
    _, mu, norms = gram_schmidt(b)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            c = round(mu[k][j])
            if c:
                b[k] = [x - c * y for x, y in zip(b[k], b[j])]
                _, mu, norms = gram_schmidt(b)
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            _, mu, norms = gram_schmidt(b)
            k = max(k - 1, 1)
    return b


def babai_nearest_plane(basis: Sequence[Sequence[int]], target: Sequence[int]) -> list[int]:
    """Lattice vector near ``target`` by Babai's nearest-plane rounding (basis should be reduced).

    >>> babai_nearest_plane([[1, 0], [0, 1]], [3, -2])
    [3, -2]
    """
    b = [[int(x) for x in row] for row in basis]
    bstar, _, norms = gram_schmidt(b)
    t = [Fraction(x) for x in target]
    for i in range(len(b) - 1, -1, -1):
        if not norms[i]:
            continue
        c = round(_dot(t, bstar[i]) / norms[i])
        t = [x - c * y for x, y in zip(t, b[i])]
    return [int(x - y) for x, y in zip(target, t)]
