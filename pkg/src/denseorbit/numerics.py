"""Exact surds and midpoint-radius ball arithmetic on top of MPFR (gmpy2).

A ball ``mid ± rad`` encloses a real number.  Midpoints are MPFR floats at the
ball's working precision (round-to-nearest); radii are 64-bit MPFR floats that
are only ever rounded upward.  Every operation adds the rounding error of its
midpoint to the radius, so the true value never leaves the enclosure.

Balls built from exactly known values (integers, rationals, sums of rational
multiples of square roots) remember that value in ``exact``; arithmetic keeps
it alive where the result stays in that class.  This is what lets the search
code tell a genuine relation from a near miss.

Nothing here touches gmpy2's global context: every call builds its own
context object, so all functions are safe to call from several threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import gmpy2
from gmpy2 import mpfr, mpq

DEFAULT_PREC = 256
GUARD_BITS = 32
RAD_PREC = 64

_ZERO = mpfr(0)


class IndeterminateError(ArithmeticError):
    """An enclosure was too wide (or contained zero) for the requested operation."""


def _nearest(prec: int) -> gmpy2.context:
    return gmpy2.context(precision=prec, round=gmpy2.RoundToNearest)


def _up() -> gmpy2.context:
    return gmpy2.context(precision=RAD_PREC, round=gmpy2.RoundUp)


def _down() -> gmpy2.context:
    return gmpy2.context(precision=RAD_PREC, round=gmpy2.RoundDown)


def _rsum(*terms) -> mpfr:
    """Upper bound on a sum of nonnegative terms."""
    up = _up()
    acc = _ZERO
    for t in terms:
        acc = up.add(acc, t)
    return acc


def _rprod(*factors) -> mpfr:
    up = _up()
    acc = mpfr(1)
    for f in factors:
        acc = up.mul(acc, f)
    return acc


def _rounding_error(ctx: gmpy2.context, value: mpfr, prec: int) -> mpfr:
    # |exact - value| <= |value| * 2^(1-prec) for a round-to-nearest result
    if not ctx.inexact:
        return _ZERO
    return _up().mul_2exp(_up().abs(value), 1 - prec)


def _neg(x: mpfr) -> mpfr:
    return _nearest(max(x.precision, 2)).minus(x)


def _floor(x: mpfr) -> int:
    return int(_nearest(max(x.precision, 64)).floor(x))


def _to_mpq(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def _as_fraction(x: mpfr) -> Fraction:
    q = mpq(x)
    return Fraction(int(q.numerator), int(q.denominator))


# ---------------------------------------------------------------------------
# Exact surds
# ---------------------------------------------------------------------------

_TRIAL_BOUND = 1 << 12


@lru_cache(maxsize=1024)
def _squarefree_split(n: int) -> tuple[int, int] | None:
    """Return (s, f) with n = s^2 * f and f squarefree, n > 0; None if that is not settled cheaply.

    Trial division stops at 2^12.  A cofactor r with no prime below that is
    squarefree or a square whenever r < 2^36 (at most two prime factors).
    """
    s, f, p = 1, 1, 2
    while p * p <= n and p < _TRIAL_BOUND:
        while n % (p * p) == 0:
            n //= p * p
            s *= p
        if n % p == 0:
            n //= p
            f *= p
        p += 1
    if n > 1 and p * p <= n:
        if gmpy2.is_square(n):
            return s * int(gmpy2.isqrt(n)), f
        if n >= _TRIAL_BOUND ** 3:
            return None
    return s, f * n


class Surd:
    """Exact real number ``sum(c_d * sqrt(d))`` with rational ``c_d`` and squarefree ``d``.

    Square roots of distinct squarefree integers are linearly independent over
    the rationals, so equality and zero tests are exact.  The set is a ring;
    division is supported by nonzero rationals only.
    """

    __slots__ = ("_terms",)

    def __init__(self, value: Union[int, Fraction, "Surd", dict] = 0):
        if isinstance(value, Surd):
            self._terms = value._terms
            return
        if isinstance(value, dict):
            items = {d: Fraction(c) for d, c in value.items() if c != 0}
        else:
            v = Fraction(value)
            items = {1: v} if v != 0 else {}
        self._terms = tuple(sorted(items.items()))

    @classmethod
    def sqrt(cls, x: Union[int, Fraction]) -> "Surd":
        x = Fraction(x)
        if x < 0:
            raise ValueError("square root of a negative rational")
        if x == 0:
            return cls(0)
        split = _squarefree_split(x.numerator * x.denominator)
        if split is None:
            raise ValueError("cannot split the radicand into square and squarefree parts cheaply")
        s, f = split
        return cls({f: Fraction(s, x.denominator)})

    @classmethod
    def try_sqrt(cls, x: Union[int, Fraction]) -> "Surd | None":
        """Like :meth:`sqrt`, but None when the radicand is too large to split."""
        try:
            return cls.sqrt(x)
        except ValueError:
            return None

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    @property
    def rational(self) -> Fraction | None:
        """The value as a Fraction when it is rational, else None."""
        if not self._terms:
            return Fraction(0)
        if len(self._terms) == 1 and self._terms[0][0] == 1:
            return self._terms[0][1]
        return None

    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other):
        other = _surd(other)
        if other is None:
            return NotImplemented
        acc = dict(self._terms)
        for d, c in other._terms:
            acc[d] = acc.get(d, Fraction(0)) + c
        return Surd(acc)

    __radd__ = __add__

    def __neg__(self):
        return Surd({d: -c for d, c in self._terms})

    def __sub__(self, other):
        other = _surd(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _surd(other)
        if other is None:
            return NotImplemented
        acc: dict[int, Fraction] = {}
        for d1, c1 in self._terms:
            for d2, c2 in other._terms:
                # both squarefree: sqrt(d1 d2) = g sqrt(d1 d2 / g^2) with g = gcd
                s = math.gcd(d1, d2)
                f = d1 // s * (d2 // s)
                acc[f] = acc.get(f, Fraction(0)) + c1 * c2 * s
        return Surd(acc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _surd(other)
        if other is None:
            return NotImplemented
        q = other.rational
        if q is None:
            raise TypeError("Surd division is only defined for rational divisors")
        if q == 0:
            raise ZeroDivisionError("Surd division by zero")
        return Surd({d: c / q for d, c in self._terms})

    def __eq__(self, other):
        other = _surd(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def __float__(self):
        return float(sum(float(c) * math.sqrt(d) for d, c in self._terms))

    def __repr__(self):
        if not self._terms:
            return "Surd(0)"
        parts = [str(c) if d == 1 else f"{c}*sqrt({d})" for d, c in self._terms]
        return "Surd(" + " + ".join(parts) + ")"

    def enclose(self, prec: int) -> "RealBall":
        acc = RealBall.zero(prec)
        for d, c in self._terms:
            term = RealBall._from_rational(c, prec)
            if d != 1:
                term = term * RealBall._from_rational(Fraction(d), prec).sqrt()
            acc = acc + term
        return RealBall(acc.mid, acc.rad, prec, self)

    def sign(self, start_prec: int = 64) -> int:
        if self.is_zero():
            return 0
        prec = start_prec
        while True:
            b = self.enclose(prec)
            if not b.contains_zero():
                return 1 if b.mid > 0 else -1
            prec *= 2

    def floor(self) -> int:
        q = self.rational
        if q is not None:
            return math.floor(q)
        prec = 64
        while True:
            b = self.enclose(prec)
            lo, hi = b.lower(), b.upper()
            if _floor(lo) == _floor(hi) and not gmpy2.is_integer(hi):
                return _floor(lo)
            prec *= 2


def _surd(x) -> Surd | None:
    if isinstance(x, Surd):
        return x
    if isinstance(x, (int, Fraction)):
        return Surd(x)
    return None


ExactReal = Union[int, Fraction, Surd]


# ---------------------------------------------------------------------------
# Real balls
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RealBall:
    """Enclosure ``[mid - rad, mid + rad]`` of a real number.

    ``wrapped`` marks a periodic quantity (fractional part, argument) whose
    enclosure crosses the period boundary; read it modulo the period.
    """

    mid: mpfr
    rad: mpfr
    prec: int = DEFAULT_PREC
    exact: Surd | None = None
    wrapped: bool = False

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, prec: int = DEFAULT_PREC) -> "RealBall":
        return cls(mpfr(0), _ZERO, prec, Surd(0))

    @classmethod
    def _from_rational(cls, q: Fraction, prec: int) -> "RealBall":
        ctx = _nearest(prec)
        mid = ctx.add(_to_mpq(q), _ZERO)
        return cls(mid, _rounding_error(ctx, mid, prec), prec, Surd(q))

    @classmethod
    def exact_value(cls, x: ExactReal, prec: int = DEFAULT_PREC) -> "RealBall":
        """Enclose an integer, Fraction or Surd; the ball remembers the exact value."""
        if isinstance(x, Surd):
            q = x.rational
            return cls._from_rational(q, prec) if q is not None else x.enclose(prec)
        return cls._from_rational(Fraction(x), prec)

    @classmethod
    def from_interval(cls, lo: ExactReal, hi: ExactReal, prec: int = DEFAULT_PREC) -> "RealBall":
        """Smallest ball (up to rounding) containing the rational interval [lo, hi]."""
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            lo, hi = hi, lo
        ctx = _nearest(prec)
        mid = ctx.add(_to_mpq((lo + hi) / 2), _ZERO)
        half = _to_mpq((hi - lo) / 2)
        err = _up().add(_up().add(half, _ZERO), _rounding_error(ctx, mid, prec))
        return cls(mid, err, prec, Surd(lo) if lo == hi else None)

    @classmethod
    def from_mid_rad(cls, mid, rad=0, prec: int = DEFAULT_PREC) -> "RealBall":
        """Ball from a midpoint and radius given as ints, Fractions, floats or decimal strings."""
        m = cls._from_rational(Fraction(mid), prec)
        r = _up().add(_to_mpq(Fraction(rad)), _ZERO)
        if r < 0:
            raise ValueError("radius must be nonnegative")
        exact = m.exact if r == 0 else None
        return cls(m.mid, _rsum(m.rad, r), prec, exact)

    def with_prec(self, prec: int) -> "RealBall":
        """Re-enclose at another precision.  Exact balls are recomputed; others are rounded."""
        if self.exact is not None:
            return RealBall.exact_value(self.exact, prec)
        ctx = _nearest(prec)
        mid = ctx.add(self.mid, _ZERO)
        return RealBall(mid, _rsum(self.rad, _rounding_error(ctx, mid, prec)), prec)

    # -- inspection ---------------------------------------------------------

    def lower(self) -> mpfr:
        return _down().sub(self.mid, self.rad)

    def upper(self) -> mpfr:
        return _up().add(self.mid, self.rad)

    def lower_fraction(self) -> Fraction:
        return _as_fraction(self.mid) - _as_fraction(self.rad)

    def upper_fraction(self) -> Fraction:
        return _as_fraction(self.mid) + _as_fraction(self.rad)

    def contains_zero(self) -> bool:
        return gmpy2.cmp_abs(self.mid, self.rad) <= 0

    def contains(self, x: Union[ExactReal, "RealBall", float]) -> bool:
        """True if x (a number, or every point of a ball) lies in the enclosure."""
        if isinstance(x, RealBall):
            return x.lower_fraction() >= self.lower_fraction() and x.upper_fraction() <= self.upper_fraction()
        if isinstance(x, Surd):
            q = x.rational
            if q is None:
                return self.contains(x.enclose(self.prec + GUARD_BITS))
            x = q
        return self.lower_fraction() <= Fraction(x) <= self.upper_fraction()

    def overlaps(self, other: "RealBall") -> bool:
        return not (self.upper_fraction() < other.lower_fraction() or other.upper_fraction() < self.lower_fraction())

    def certainly_positive(self) -> bool:
        return self.mid > self.rad

    def certainly_negative(self) -> bool:
        return _up().add(self.mid, self.rad) < 0

    def certainly_lt(self, other) -> bool:
        return (_coerce(other, self.prec) - self).certainly_positive()

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        return f"RealBall({float(self.mid):.17g} ± {float(self.rad):.3g}, prec={self.prec})"

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self) -> "RealBall":
        return RealBall(_neg(self.mid), self.rad, self.prec, None if self.exact is None else -self.exact)

    def __add__(self, other) -> "RealBall":
        other = _coerce(other, self.prec)
        if other is None:
            return NotImplemented
        prec = max(self.prec, other.prec)
        ctx = _nearest(prec)
        mid = ctx.add(self.mid, other.mid)
        rad = _rsum(self.rad, other.rad, _rounding_error(ctx, mid, prec))
        return RealBall(mid, rad, prec, _exact_op(self, other, "+"))

    __radd__ = __add__

    def __sub__(self, other) -> "RealBall":
        other = _coerce(other, self.prec)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "RealBall":
        return (-self) + other

    def __mul__(self, other) -> "RealBall":
        other = _coerce(other, self.prec)
        if other is None:
            return NotImplemented
        prec = max(self.prec, other.prec)
        ctx = _nearest(prec)
        mid = ctx.mul(self.mid, other.mid)
        up = _up()
        rad = _rsum(
            up.mul(up.abs(self.mid), other.rad),
            up.mul(up.abs(other.mid), self.rad),
            up.mul(self.rad, other.rad),
            _rounding_error(ctx, mid, prec),
        )
        return RealBall(mid, rad, prec, _exact_op(self, other, "*"))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RealBall":
        other = _coerce(other, self.prec)
        if other is None:
            return NotImplemented
        if other.contains_zero():
            raise IndeterminateError("indeterminate division: divisor enclosure contains 0")
        prec = max(self.prec, other.prec)
        ctx = _nearest(prec)
        mid = ctx.div(self.mid, other.mid)
        up, down = _up(), _down()
        # |x/y - a/b| <= (ra*|b| + |a|*rb) / (|b| * (|b| - rb))
        b_abs = down.abs(other.mid)
        gap = down.sub(b_abs, other.rad)
        num = _rsum(up.mul(self.rad, up.abs(other.mid)), up.mul(up.abs(self.mid), other.rad))
        den = down.mul(b_abs, gap)
        prop = up.div(num, den) if num != 0 else _ZERO
        rad = _rsum(prop, _rounding_error(ctx, mid, prec))
        return RealBall(mid, rad, prec, _exact_op(self, other, "/"))

    def __rtruediv__(self, other) -> "RealBall":
        other = _coerce(other, self.prec)
        if other is None:
            return NotImplemented
        return other / self

    def __abs__(self) -> "RealBall":
        if not self.contains_zero():
            return self if self.mid > 0 else -self
        hi = self.upper() if self.mid >= 0 else _up().sub(self.rad, self.mid)
        half = _up().mul_2exp(hi, -1)
        ex = Surd(0) if (self.exact is not None and self.exact.is_zero()) else None
        return RealBall(mpfr(half, self.prec), half, self.prec, ex)

    # -- elementary functions ------------------------------------------------

    def sqrt(self) -> "RealBall":
        if self.certainly_negative():
            raise IndeterminateError("square root of a negative enclosure")
        prec = self.prec
        ctx = _nearest(prec)
        lo = self.lower()
        if lo <= 0:
            hi = _up().sqrt(self.upper())
            half = _up().mul_2exp(hi, -1)
            return RealBall(mpfr(half, prec), half, prec)
        mid = ctx.sqrt(self.mid)
        # |sqrt(x) - sqrt(m)| <= r / (sqrt(m - r) + sqrt(m))
        prop = _up().div(self.rad, _down().add(_down().sqrt(lo), _down().sqrt(self.mid))) if self.rad else _ZERO
        rad = _rsum(prop, _rounding_error(ctx, mid, prec))
        q = self.exact.rational if self.exact is not None else None
        return RealBall(mid, rad, prec, Surd.try_sqrt(q) if q is not None and q >= 0 else None)

    def exp(self) -> "RealBall":
        prec = self.prec
        ctx = _nearest(prec)
        mid = ctx.exp(self.mid)
        up = _up()
        # |exp(m + t) - exp(m)| <= exp(m) * expm1(r)
        bound_exp_m = up.mul(mid, up.add(mpfr(1), up.mul_2exp(mpfr(1), 1 - prec)))
        prop = up.mul(bound_exp_m, up.expm1(self.rad)) if self.rad else _ZERO
        rad = _rsum(prop, _rounding_error(ctx, mid, prec))
        ex = Surd(1) if (self.exact is not None and self.exact.is_zero()) else None
        return RealBall(mid, rad, prec, ex)

    def log(self) -> "RealBall":
        if not self.certainly_positive():
            raise IndeterminateError("log of an enclosure not certainly positive")
        prec = self.prec
        ctx = _nearest(prec)
        mid = ctx.log(self.mid)
        # |log(x) - log(m)| <= r / (m - r)
        prop = _up().div(self.rad, self.lower()) if self.rad else _ZERO
        rad = _rsum(prop, _rounding_error(ctx, mid, prec))
        return RealBall(mid, rad, prec)

    def cos(self) -> "RealBall":
        ctx = _nearest(self.prec)
        mid = ctx.cos(self.mid)
        return RealBall(mid, _rsum(self.rad, _rounding_error(ctx, mid, self.prec)), self.prec)

    def sin(self) -> "RealBall":
        ctx = _nearest(self.prec)
        mid = ctx.sin(self.mid)
        return RealBall(mid, _rsum(self.rad, _rounding_error(ctx, mid, self.prec)), self.prec)

    def asin(self) -> "RealBall":
        lo, hi = self.lower(), self.upper()
        if lo < -1 or hi > 1:
            raise IndeterminateError("asin of an enclosure reaching outside [-1, 1]")
        prec = self.prec
        a = gmpy2.context(precision=prec, round=gmpy2.RoundDown).asin(lo)
        b = gmpy2.context(precision=prec, round=gmpy2.RoundUp).asin(hi)
        ctx = _nearest(prec)
        mid = ctx.div(ctx.add(a, b), 2)
        rad = max(_up().sub(b, mid), _up().sub(mid, a))
        return RealBall(mid, rad, prec)

    def nearest_int(self) -> int:
        """Integer nearest the midpoint (ties to even)."""
        return int(_nearest(max(self.mid.precision, 64)).rint(self.mid))

    def floor_mid(self) -> int:
        return _floor(self.mid)

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        q = self.exact.rational if self.exact is not None else None
        # an exactly known rational is written as its canonical enclosure, so re-reading is idempotent
        b = RealBall.exact_value(q, self.prec) if q is not None else self
        out = {"mid": _decimal_nearest(b.mid, b.prec), "rad": _decimal_up(b.rad)}
        if q is not None:
            out["exact"] = f"{q.numerator}/{q.denominator}"
        return out

    @classmethod
    def from_json(cls, data: dict, prec: int) -> "RealBall":
        if "exact" in data:
            return cls.exact_value(Fraction(data["exact"]), prec)
        mid = mpfr(data["mid"], prec)
        return cls(mid, _parse_rad(data["rad"]), prec)


def _decimal_nearest(x: mpfr, prec: int) -> str:
    """Decimal string that parses back (round-to-nearest, same precision) to exactly x."""
    if x == 0:
        return "0"
    ndig = int(math.ceil(prec * math.log10(2))) + 2
    digits, exp, _ = x.digits(10, ndig)
    sign = ""
    if digits.startswith("-"):
        sign, digits = "-", digits[1:]
    digits = digits.rstrip("0") or "0"
    return f"{sign}0.{digits}e{exp}"


def _parse_rad(text: str) -> mpfr:
    """Read a radius written by ``_decimal_up``; anything else is rounded upward."""
    near = _nearest(RAD_PREC).add(mpfr(text, RAD_PREC + 16), _ZERO)
    if _decimal_up(near) == text:
        # our own output: ``text`` is the upward rounding of exactly this radius
        return near
    return _up().add(_to_mpq(Fraction(text)), _ZERO)


def _decimal_up(x: mpfr, ndig: int = 22) -> str:
    """Decimal string >= x with ndig significant digits (x >= 0)."""
    q = _as_fraction(x)
    if q == 0:
        return "0"
    e = math.floor(math.log10(q.numerator) - math.log10(q.denominator)) - ndig + 1
    scaled = q / (Fraction(10) ** e)
    m = -((-scaled.numerator) // scaled.denominator)
    return f"{m}e{e}"


def _coerce(x, prec: int) -> RealBall | None:
    if isinstance(x, RealBall):
        return x
    if isinstance(x, (int, Fraction, Surd)):
        return RealBall.exact_value(x, prec)
    return None


def _exact_op(a: RealBall, b: RealBall, op: str) -> Surd | None:
    if a.exact is None or b.exact is None:
        return None
    if op == "+":
        return a.exact + b.exact
    if op == "*":
        return a.exact * b.exact
    if b.exact.rational is None or b.exact.is_zero():
        return None
    return a.exact / b.exact


def real(x, prec: int = DEFAULT_PREC) -> RealBall:
    """Coerce an int, Fraction, Surd, decimal string or RealBall to a ball."""
    if isinstance(x, RealBall):
        return x
    if isinstance(x, str):
        return RealBall.exact_value(Fraction(x), prec)
    if isinstance(x, float):
        return RealBall.exact_value(Fraction(x), prec)
    return RealBall.exact_value(x, prec)


def pi_ball(prec: int) -> RealBall:
    ctx = _nearest(prec)
    mid = ctx.const_pi()
    return RealBall(mid, _rounding_error(ctx, mid, prec), prec)


# ---------------------------------------------------------------------------
# Complex balls
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ComplexBall:
    """Componentwise enclosure of a complex number."""

    re: RealBall
    im: RealBall

    @classmethod
    def exact_value(cls, re: ExactReal = 0, im: ExactReal = 0, prec: int = DEFAULT_PREC) -> "ComplexBall":
        return cls(RealBall.exact_value(re, prec), RealBall.exact_value(im, prec))

    @property
    def prec(self) -> int:
        return max(self.re.prec, self.im.prec)

    @property
    def exact(self) -> tuple[Surd, Surd] | None:
        if self.re.exact is None or self.im.exact is None:
            return None
        return self.re.exact, self.im.exact

    def with_prec(self, prec: int) -> "ComplexBall":
        return ComplexBall(self.re.with_prec(prec), self.im.with_prec(prec))

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def contains(self, z) -> bool:
        if isinstance(z, ComplexBall):
            return self.re.contains(z.re) and self.im.contains(z.im)
        if isinstance(z, complex):
            return self.re.contains(Fraction(z.real)) and self.im.contains(Fraction(z.imag))
        re, im = z if isinstance(z, tuple) else (z, 0)
        return self.re.contains(re) and self.im.contains(im)

    def overlaps(self, other: "ComplexBall") -> bool:
        return self.re.overlaps(other.re) and self.im.overlaps(other.im)

    def conj(self) -> "ComplexBall":
        return ComplexBall(self.re, -self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re.mid), float(self.im.mid))

    def __repr__(self) -> str:
        return f"ComplexBall({complex(self)!r}, rad=({float(self.re.rad):.3g}, {float(self.im.rad):.3g}))"

    def __neg__(self):
        return ComplexBall(-self.re, -self.im)

    def __add__(self, other):
        other = _ccoerce(other, self.prec)
        if other is None:
            return NotImplemented
        return ComplexBall(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _ccoerce(other, self.prec)
        if other is None:
            return NotImplemented
        return ComplexBall(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (RealBall, int, Fraction, Surd)):
            return ComplexBall(self.re * other, self.im * other)
        other = _ccoerce(other, self.prec)
        if other is None:
            return NotImplemented
        return ComplexBall(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (RealBall, int, Fraction, Surd)):
            return ComplexBall(self.re / other, self.im / other)
        other = _ccoerce(other, self.prec)
        if other is None:
            return NotImplemented
        n2 = other.abs2()
        if n2.contains_zero():
            raise IndeterminateError("indeterminate division: divisor enclosure contains 0")
        num = self * other.conj()
        return ComplexBall(num.re / n2, num.im / n2)

    def __rtruediv__(self, other):
        other = _ccoerce(other, self.prec)
        if other is None:
            return NotImplemented
        return other / self

    def abs2(self) -> RealBall:
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> RealBall:
        return self.abs2().sqrt()

    def to_json(self) -> dict:
        return {"re": self.re.to_json(), "im": self.im.to_json()}

    @classmethod
    def from_json(cls, data: dict, prec: int) -> "ComplexBall":
        return cls(RealBall.from_json(data["re"], prec), RealBall.from_json(data["im"], prec))


def _ccoerce(x, prec: int) -> ComplexBall | None:
    if isinstance(x, ComplexBall):
        return x
    if isinstance(x, RealBall):
        return ComplexBall(x, RealBall.zero(x.prec))
    if isinstance(x, (int, Fraction, Surd)):
        return ComplexBall.exact_value(x, 0, prec)
    return None


def ball_arith(a, b, op: str):
    """Apply one of ``+ - * /`` to two balls of the same kind."""
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# Periodic helpers
# ---------------------------------------------------------------------------

def frac(x: RealBall) -> RealBall:
    """Fractional part ``x - floor(x)`` (floor convention, so -0.25 -> 0.75).

    When the enclosure straddles an integer the result is shifted by the
    midpoint's floor and flagged ``wrapped``; it may then poke outside [0, 1).
    """
    if x.rad >= mpfr("0.25"):
        raise IndeterminateError("enclosure too wide for a fractional part")
    n = x.floor_mid()
    y = x - n
    lo, hi = y.lower(), y.upper()
    straddles = lo < 0 or hi >= 1
    exact = None
    if x.exact is not None and not straddles:
        exact = x.exact - n
    return RealBall(y.mid, y.rad, y.prec, exact, straddles)


def circle_distance(x: RealBall, t: RealBall | ExactReal) -> RealBall:
    """Enclosure of the distance from x to t on the circle R/Z (values in [0, 1/2])."""
    d = x - t
    return abs(d - d.nearest_int())


def exp_2pi_i(u: ComplexBall, prec: int = DEFAULT_PREC) -> ComplexBall:
    """Enclosure of ``exp(2*pi*i*u)``."""
    if prec < 64:
        raise ValueError("prec must be at least 64")
    re = u.re.with_prec(prec) if u.re.prec < prec else u.re
    im = u.im.with_prec(prec) if u.im.prec < prec else u.im
    # an integer shift of Re(u) leaves the value unchanged and keeps the angle small
    re = re - re.nearest_int()
    two_pi = pi_ball(prec) * 2
    mag = (-(two_pi * im)).exp() if not (im.exact is not None and im.exact.is_zero()) else RealBall.exact_value(1, prec)
    if re.exact is not None and re.exact.is_zero():
        return ComplexBall(mag, RealBall.zero(prec))
    angle = two_pi * re
    return ComplexBall(mag * angle.cos(), mag * angle.sin())


def arg_principal(z: ComplexBall) -> RealBall:
    """Principal argument in (-pi, pi].

    An enclosure that reaches across the negative real axis is returned around
    the midpoint's argument and flagged ``wrapped`` (read it modulo 2*pi).
    """
    if z.contains_zero():
        raise IndeterminateError("argument undefined: enclosure contains 0")
    prec = z.prec
    ctx = _nearest(prec)
    im_mid = z.im.mid if z.im.mid != 0 else mpfr(0)
    mid = ctx.atan2(im_mid, z.re.mid)
    err = _rounding_error(ctx, mid, prec)
    spread = _rsum(z.re.rad, z.im.rad)
    if spread == 0:
        return RealBall(mid, err, prec)
    down = _down()
    modulus = down.hypot(z.re.mid, z.im.mid)
    t = _up().div(spread, modulus)
    if t >= 1:
        raise IndeterminateError("argument undefined: enclosure too wide")
    # the disk of radius `spread` subtends at most asin(t) <= t*pi/2
    rad = _rsum(_rprod(t, mpfr("1.5708", RAD_PREC)), err)
    wrapped = z.re.mid < 0 and z.im.contains_zero()
    return RealBall(mid, rad, prec, None, wrapped)


def complex_log(z: ComplexBall) -> ComplexBall:
    """Principal logarithm ``log|z| + i*arg(z)``."""
    return ComplexBall(z.abs2().log() * Fraction(1, 2), arg_principal(z))
