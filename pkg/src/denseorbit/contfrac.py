"""Continued fractions ``1/(a_1 + 1/(a_2 + ...))`` with exact integer terms."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .numerics import DEFAULT_PREC, RealBall


class ContFracError(ValueError):
    pass


@dataclass(frozen=True)
class Convergent:
    p: int
    q: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    def __iter__(self):
        return iter((self.p, self.q))


@dataclass(frozen=True)
class CFTerms:
    """Positive integer terms of a continued fraction with zero integer part."""

    terms: tuple[int, ...]

    def __post_init__(self):
        terms = tuple(int(a) for a in self.terms)
        if not terms:
            raise ContFracError("continued fraction needs at least one term")
        if any(a < 1 for a in terms):
            raise ContFracError("continued fraction terms must be >= 1")
        object.__setattr__(self, "terms", terms)

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, i):
        return self.terms[i]

    def to_json(self) -> list[str]:
        return [str(a) for a in self.terms]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "CFTerms":
        return cls(tuple(int(a) for a in data))


def convergents(t: CFTerms | Sequence[int], n: int | None = None) -> list[Convergent]:
    """Convergents p_k/q_k for k = 1..n.

    Seeds p_0 = 0, q_0 = 1, p_{-1} = 1, q_{-1} = 0, so that
    p_k q_{k+1} - p_{k+1} q_k = (-1)^(k+1).
    """
    if not isinstance(t, CFTerms):
        t = CFTerms(tuple(t))
    if n is None:
        n = len(t)
    if n > len(t):
        raise ContFracError(f"insufficient terms: asked for {n}, have {len(t)}")
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    out = []
    for a in t.terms[:n]:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append(Convergent(p, q))
    return out


def terms_from_denominators(qs: Sequence[int]) -> CFTerms:
    """Recover the terms whose convergent denominators are exactly ``qs``.

    Uses a_{k+2} = (Q_{k+2} - Q_k) / Q_{k+1} with Q_0 = 1, Q_{-1} = 0.
    """
    qs = [int(q) for q in qs]
    if not qs:
        raise ContFracError("empty denominator schedule")
    if qs[0] < 1:
        raise ContFracError("schedule violates CF positivity: Q_1 < 1")
    prev2, prev1 = 0, 1
    terms = []
    for k, q in enumerate(qs, start=1):
        a, r = divmod(q - prev2, prev1)
        if r:
            raise ContFracError(
                f"denominator schedule not realizable: ({q} - {prev2}) / {prev1} is not an integer (position {k})"
            )
        if a < 1:
            raise ContFracError(f"schedule violates CF positivity: term {k} would be {a}")
        terms.append(a)
        prev2, prev1 = prev1, q
    return CFTerms(tuple(terms))


def value_bracket(t: CFTerms | Sequence[int], n: int | None = None) -> tuple[Fraction, Fraction]:
    """The last two convergents, ordered (lo, hi); every tail extension lies between them."""
    cs = convergents(t, n)
    if len(cs) < 2:
        raise ContFracError("need at least two convergents for a bracket")
    a, b = cs[-1].value, cs[-2].value
    return (a, b) if a <= b else (b, a)


def value_enclosure(t: CFTerms | Sequence[int], n: int | None = None, prec: int = DEFAULT_PREC) -> RealBall:
    """Ball containing the value of every continued fraction that starts with these n terms.

    Its radius is at most |c_n - c_{n-1}| / 2 = 1 / (2 q_n q_{n-1}) plus rounding.
    """
    if n is not None and n < 2:
        raise ContFracError("value_enclosure needs n >= 2")
    lo, hi = value_bracket(t, n)
    return RealBall.from_interval(lo, hi, prec)


def smallest_rational_in(lo: Fraction, hi: Fraction, max_den: int | None = None) -> Fraction | None:
    """Rational with the smallest denominator in the closed interval [lo, hi].

    Descends the continued-fraction expansions of both endpoints together; the
    result is the simplest rational of the interval.  With ``max_den`` the walk
    stops early and returns None once every candidate denominator exceeds it.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        raise ValueError("empty interval")
    # x = (p1*y + p0) / (q1*y + q0), y ranging over the current [lo, hi]
    p0, q0, p1, q1 = 0, 1, 1, 0
    while True:
        fl = lo.numerator // lo.denominator
        if fl == lo:
            y = fl
            break
        if fl + 1 <= hi:
            y = fl + 1
            break
        p0, p1 = p1, fl * p1 + p0
        q0, q1 = q1, fl * q1 + q0
        if max_den is not None and q1 > max_den:
            return None
        lo, hi = 1 / (hi - fl), 1 / (lo - fl)
    result = Fraction(p1 * y + p0, q1 * y + q0)
    if max_den is not None and result.denominator > max_den:
        return None
    return result
