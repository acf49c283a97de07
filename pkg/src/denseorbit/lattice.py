"""Additive groups <1, i, tau, +> in the plane: independence checks, small
elements, epsilon-nets and target approximation.

The third generator is called ``tau`` throughout (tau = x + i y).  The group
is dense in C exactly when k x + l y + m = 0 forces k = l = m = 0; a finite
computation can only certify that up to a coefficient bound M, and the
verdict types say so.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

from .lll import lll_reduce
from .numerics import (
    DEFAULT_PREC,
    ComplexBall,
    IndeterminateError,
    RealBall,
    Surd,
    real,
)

DEFAULT_STAR_BOUND = 50


class LatticeError(ValueError):
    pass


class PrecisionError(IndeterminateError):
    """An enclosure contains 0 but the inputs are inexact: relation or near-relation?"""


class DegenerateBasisError(LatticeError):
    pass


class BudgetExhausted(LatticeError):
    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class RelationCertificate:
    k: int
    l: int
    m: int
    margin: RealBall = field(default_factory=RealBall.zero)

    def __post_init__(self):
        if self.k == 0 and self.l == 0 and self.m == 0:
            raise LatticeError("relation certificate must have a nonzero coefficient")

    @property
    def is_exact(self) -> bool:
        return self.margin.exact is not None and self.margin.exact.is_zero()

    def to_json(self) -> dict:
        return {"k": str(self.k), "l": str(self.l), "m": str(self.m), "margin": self.margin.to_json(), "exact": self.is_exact}


@dataclass(frozen=True)
class IndependentUpTo:
    bound: int
    min_margin: RealBall
    """Enclosure whose lower end bounds |k x + l y + m| from below over the whole scan."""

    @property
    def margin_lower(self) -> Fraction:
        return self.min_margin.lower_fraction()

    def to_json(self) -> dict:
        return {"verdict": "IndependentUpTo", "M": self.bound, "min_margin": self.min_margin.to_json(),
                "min_margin_lower": float(self.min_margin.lower())}


@dataclass(frozen=True)
class RelationFound:
    cert: RelationCertificate

    def to_json(self) -> dict:
        return {"verdict": "RelationFound", "relation": self.cert.to_json()}


DensityVerdict = Union[IndependentUpTo, RelationFound]


@dataclass(frozen=True)
class AdditiveTriple:
    """The group element m*tau + k + l*i."""

    m: int
    k: int
    l: int

    def value(self, tau: ComplexBall) -> ComplexBall:
        return tau * self.m + ComplexBall.exact_value(self.k, self.l, tau.prec)

    def __add__(self, other: "AdditiveTriple") -> "AdditiveTriple":
        return AdditiveTriple(self.m + other.m, self.k + other.k, self.l + other.l)

    def __mul__(self, c: int) -> "AdditiveTriple":
        return AdditiveTriple(self.m * c, self.k * c, self.l * c)

    __rmul__ = __mul__

    def cross(self, other: "AdditiveTriple") -> tuple[int, int, int]:
        a, b = (self.m, self.k, self.l), (other.m, other.k, other.l)
        return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])

    def to_json(self) -> dict:
        return {"m": str(self.m), "k": str(self.k), "l": str(self.l)}


def _strip(b: RealBall) -> RealBall:
    # drop exact tracking inside hot loops
    return RealBall(b.mid, b.rad, b.prec) if b.exact is not None else b




def check_condition_star(x, y, M: int, prec: int | None = None) -> DensityVerdict:
    """Search all integer (k, l, m), 0 < max(|k|, |l|, |m|) <= M, for k x + l y + m = 0.

    For each (k, l) only the m nearest to -(k x + l y) can come close to zero,
    so the scan costs O(M^2) ball evaluations while staying exhaustive.
    Exact inputs (ints, Fractions, Surds, or balls that carry an exact value)
    are decided exactly; inexact inputs whose enclosure cannot exclude 0 raise
    PrecisionError.
    """
    if M < 1:
        raise ValueError("coefficient bound must be >= 1")
    p = prec or max(getattr(x, "prec", DEFAULT_PREC), getattr(y, "prec", DEFAULT_PREC))
    xb, yb = real(x, p), real(y, p)
    exact = xb.exact is not None and yb.exact is not None
    xs, ys = _strip(xb), _strip(yb)
    relations: list[tuple[tuple, RelationCertificate]] = []
    best_lower: Fraction | None = None
    best_ball: RealBall | None = None
    for k in range(0, M + 1):
        kx = xs * k
        for l in range(-M, M + 1):
            if k == 0 and l <= 0:
                continue  # (k, l) and (-k, -l) give the same values; (0, 0, m) is never 0
            t = kx + ys * l
            m = max(-M, min(M, -t.nearest_int()))
            val = t + m
            if val.contains_zero():
                if not exact:
                    raise PrecisionError(
                        f"precision insufficient: enclosure of {k}x + {l}y + {m} contains 0"
                    )
                ev = xb.exact * k + yb.exact * l + m
                if ev.is_zero():
                    cert = RelationCertificate(k, l, m, RealBall(val.mid, val.rad, val.prec, Surd(0)))
                    relations.append(((abs(k) + abs(l) + abs(m), max(abs(k), abs(l), abs(m)), k, l, m), cert))
                    continue
                q = val.prec
                while val.contains_zero():
                    q *= 2
                    val = ev.enclose(q)
            # m is the best allowed integer (|t + m| is convex in m), so |val| is the margin
            lower = abs(val).lower_fraction()
            if best_lower is None or lower < best_lower:
                best_lower, best_ball = lower, abs(val)
    if relations:
        return RelationFound(min(relations, key=lambda r: r[0])[1])
    return IndependentUpTo(M, best_ball)


def _det(u: ComplexBall, v: ComplexBall) -> RealBall:
    return u.re * v.im - u.im * v.re


def reduce_general_basis(u: ComplexBall, v: ComplexBall, w) -> tuple[RealBall, RealBall]:
    """Real coordinates (x, y) with x u + y v = w, by certified Cramer's rule."""
    w = w if isinstance(w, ComplexBall) else ComplexBall.exact_value(w, 0, max(u.prec, v.prec))
    det = _det(u, v)
    if det.contains_zero():
        raise DegenerateBasisError("degenerate basis: Im(u/v) enclosure contains 0")
    x = (w.re * v.im - w.im * v.re) / det
    y = (u.re * w.im - u.im * w.re) / det
    return x, y


def multiplicative_density_check(u: ComplexBall, v: ComplexBall, M: int = DEFAULT_STAR_BOUND) -> DensityVerdict:
    """Density of <e^{2 pi i u}, e^{2 pi i v}> via the coordinates of 1 in the basis (u, v)."""
    x, y = reduce_general_basis(u, v, 1)
    return check_condition_star(x, y, M)


def _require_star(tau: ComplexBall, bound: int) -> None:
    key = tuple((b.mid, b.rad, b.prec, b.exact) for b in (tau.re, tau.im))
    relation = _star_relation(key, bound)
    if relation is not None:
        k, l, m = relation
        raise LatticeError(f"tau fails the independence condition: {k}x + {l}y + {m} = 0")


@lru_cache(maxsize=64)
def _star_relation(key, bound: int) -> tuple[int, int, int] | None:
    # memoized on the balls' contents: repeated targets against one tau skip the rescan
    (rm, rr, rp, rx), (im, ir, ip, ix) = key
    verdict = check_condition_star(RealBall(rm, rr, rp, rx), RealBall(im, ir, ip, ix), bound)
    if isinstance(verdict, RelationFound):
        c = verdict.cert
        return c.k, c.l, c.m
    return None


def _float_parts(tau: ComplexBall) -> tuple[float, float]:
    return float(tau.re.mid), float(tau.im.mid)


def _small_element_candidates(tau: ComplexBall, eps: float, budget: int) -> list[tuple[AdditiveTriple, RealBall]]:
    """All m in 1..budget whose best (k, l) give a certified |m tau + k + l i| < eps."""
    x, y = _float_parts(tau)
    ms = np.arange(1, budget + 1, dtype=np.float64)
    fx, fy = ms * x, ms * y
    dx, dy = fx - np.rint(fx), fy - np.rint(fy)
    slack = 1e-9 + 4 * budget * 2.0 ** -50 * (abs(x) + abs(y) + 1)
    hits = np.nonzero(np.hypot(dx, dy) < eps + slack)[0]
    tre, tim = _strip(tau.re), _strip(tau.im)
    out = []
    for i in hits:
        m = int(i) + 1
        re, im = tre * m, tim * m
        k, l = -re.nearest_int(), -im.nearest_int()
        if abs(k) > budget or abs(l) > budget:
            continue
        mod = abs(ComplexBall(re + k, im + l))
        if mod.upper() < eps:
            out.append((AdditiveTriple(m, k, l), mod))
    return out


def _lll_candidates(tau: ComplexBall, eps: float, budget: int) -> list[tuple[AdditiveTriple, RealBall]]:
    tre, tim = _strip(tau.re), _strip(tau.im)
    scale = 1 << max(4, math.ceil(math.log2(1 / eps)))
    found: dict[tuple, tuple[AdditiveTriple, RealBall]] = {}
    while True:
        X, Y = (tre * scale).nearest_int(), (tim * scale).nearest_int()
        basis = lll_reduce([[1, X, Y], [0, scale, 0], [0, 0, scale]])
        too_big = True
        for row in basis:
            m = row[0]
            if m == 0:
                continue
            if m < 0:
                row = [-c for c in row]
                m = -m
            if m > budget:
                continue
            too_big = False
            # the row fixes m; k and l are re-picked against the true tau
            re, im = tre * m, tim * m
            k, l = -re.nearest_int(), -im.nearest_int()
            mod = abs(ComplexBall(re + k, im + l))
            if mod.upper() < eps:
                found[(m, k, l)] = (AdditiveTriple(m, k, l), mod)
        if len(found) >= 2 and _pick_basis(list(found.values())) is not None:
            return list(found.values())
        if too_big:
            return list(found.values())
        scale *= 2


def _pick_basis(cands):
    cands = sorted(cands, key=lambda c: (c[1].upper(), c[0].m))
    for i, (a, _) in enumerate(cands):
        for b, _ in cands[i + 1:]:
            if a.cross(b) != (0, 0, 0):
                return a, b
    return None


def epsilon_net_basis(tau: ComplexBall, eps, budget: int, *, engine: str = "scan",
                      star_bound: int | None = None) -> tuple[AdditiveTriple, AdditiveTriple]:
    """Two non-collinear group elements of modulus < eps.

    Integer combinations of the pair form an eps-net of the plane: any point is
    within (|a| + |b|) / 2 of the lattice they span.
    """
    eps = float(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    _require_star(tau, star_bound or min(budget, DEFAULT_STAR_BOUND))
    if eps >= 1:
        return AdditiveTriple(0, 1, 0), AdditiveTriple(0, 0, 1)
    if engine == "scan":
        cands = _small_element_candidates(tau, eps, budget)
    elif engine == "lll":
        cands = _lll_candidates(tau, eps, budget)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    cands.sort(key=lambda c: (c[1].upper(), c[0].m))
    for i, (a, _) in enumerate(cands):
        va = a.value(tau)
        for b, _ in cands[i + 1:]:
            if a.cross(b) == (0, 0, 0):
                continue
            if not _det(va, b.value(tau)).contains_zero():
                return a, b
    best = [float(c[1].upper()) for c in cands[:2]]
    raise BudgetExhausted(f"no basis found within budget {budget} (best moduli {best})", best)


def _triple_key(t: AdditiveTriple):
    return (abs(t.m) + abs(t.k) + abs(t.l), t.m, t.k, t.l)


def _error(tau: ComplexBall, z: ComplexBall, t: AdditiveTriple) -> RealBall:
    return abs(t.value(tau) - z)


def approximate_additive(tau: ComplexBall, z, eps, budget: int, *, engine: str = "scan",
                         star_bound: int | None = None) -> AdditiveTriple:
    """A triple (m, k, l) with certified |m tau + k + l i - z| < eps.

    ``scan`` tries every |m| <= budget with its best (k, l) and returns the
    solution minimising (|m| + |k| + |l|, m, k, l).  ``net`` rounds z against
    an eps-net basis from :func:`epsilon_net_basis`.
    """
    eps_f = float(eps)
    if not isinstance(z, ComplexBall):
        z = ComplexBall.exact_value(Fraction(complex(z).real), Fraction(complex(z).imag), tau.prec)
    _require_star(tau, star_bound or min(budget, DEFAULT_STAR_BOUND))
    if engine == "net":
        return _approximate_by_net(tau, z, eps_f, budget)
    if engine != "scan":
        raise ValueError(f"unknown engine {engine!r}")
    x, y = _float_parts(tau)
    zr, zi = float(z.re.mid), float(z.im.mid)
    ms = np.arange(-budget, budget + 1, dtype=np.float64)
    rx, ry = zr - ms * x, zi - ms * y
    reach = math.floor(eps_f) + 1
    slack = 1e-9 + 4 * budget * 2.0 ** -50 * (abs(x) + abs(y) + abs(zr) + abs(zi) + 1)
    best = None
    for dk in range(-reach, reach + 1):
        for dl in range(-reach, reach + 1):
            ks, ls = np.rint(rx) + dk, np.rint(ry) + dl
            hits = np.nonzero(np.hypot(rx - ks, ry - ls) < eps_f + slack)[0]
            for i in hits:
                t = AdditiveTriple(int(ms[i]), int(ks[i]), int(ls[i]))
                if max(abs(t.k), abs(t.l)) > budget + abs(zr) + abs(zi) + 1:
                    continue
                if best is not None and _triple_key(t) >= _triple_key(best):
                    continue
                if _error(tau, z, t).upper() < eps_f:
                    best = t
    if best is None:
        raise BudgetExhausted(f"no approximation within {eps_f} for |m| <= {budget}")
    return best


def _approximate_by_net(tau: ComplexBall, z: ComplexBall, eps: float, budget: int) -> AdditiveTriple:
    a, b = epsilon_net_basis(tau, eps, budget, star_bound=1)
    va, vb = a.value(tau), b.value(tau)
    s, t = reduce_general_basis(va, vb, z)
    s0, t0 = s.nearest_int(), t.nearest_int()
    found = []
    for ds in (-1, 0, 1):
        for dt in (-1, 0, 1):
            cand = a * (s0 + ds) + b * (t0 + dt)
            if _error(tau, z, cand).upper() < eps:
                found.append(cand)
    if not found:
        raise BudgetExhausted("net rounding did not reach the tolerance")
    return min(found, key=_triple_key)


def nondensity_witness(cert: RelationCertificate) -> dict:
    """Line family k X + l Y = n (n integer) carrying every group element.

    Adjacent lines are 1 / sqrt(k^2 + l^2) apart; the open strips between
    them contain no element of the group.
    """
    if not cert.is_exact:
        raise LatticeError("witness needs an exact relation (margin exactly 0)")
    if cert.k == 0 and cert.l == 0:
        raise LatticeError("no geometric witness: relation does not involve x or y")
    n2 = cert.k ** 2 + cert.l ** 2
    spacing = RealBall.exact_value(Surd.sqrt(Fraction(1, n2)), cert.margin.prec)
    return {"line_normal": (cert.k, cert.l), "spacing": spacing}
