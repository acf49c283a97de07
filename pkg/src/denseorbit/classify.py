"""The circle homomorphism psi, samples of the limit set H_G, and type tests.

For G = <xi, eta> with xi = e^{2 pi i u}, eta = e^{2 pi i v}, the map
psi(xi^n eta^m) = (xi/|xi|)^n = e^{2 pi i n Re(u)} sends G to the unit
circle.  H_G collects the limits of psi over group elements tending to 1,
i.e. over integer triples (n, m, k) with n u + m v - k -> 0.  Angles are
measured in turns (fractions of a full circle) throughout this module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .construction import ConstructionResult
from .contfrac import smallest_rational_in
from .numerics import ComplexBall, RealBall, circle_distance, exp_2pi_i, frac

DEDUP_RESOLUTION = Fraction(1, 2 ** 20)
_DEDUP = float(DEDUP_RESOLUTION)
DEFAULT_ORDER_BOUND = 64
DEFAULT_TOLERANCE = 1e-5


class DegenerateGeneratorsError(ValueError):
    pass


@dataclass(frozen=True)
class NearUnitElement:
    n: int
    m: int
    k: int
    residual: RealBall
    psi_angle: RealBall
    source: str = "scan"

    def to_json(self) -> dict:
        return {
            "n": str(self.n), "m": str(self.m), "k": str(self.k),
            "residual_hi": float(self.residual.upper()),
            "psi_angle": float(self.psi_angle.mid),
            "source": self.source,
        }


@dataclass(frozen=True)
class FiniteOrderConsistent:
    order: int
    tolerance: float


@dataclass(frozen=True)
class DenseEvidence:
    samples: int
    max_gap: RealBall


@dataclass(frozen=True)
class FirstTypeByRatio:
    """Certified rational ratio p/q; sampled H_G angles should be multiples of 1/|p - q|."""

    p: int
    q: int

    @property
    def predicted_order_divides(self) -> int:
        return abs(self.p - self.q)

    def prediction_holds(self, angles: list[RealBall], tol: float = DEFAULT_TOLERANCE) -> bool:
        d = self.predicted_order_divides
        if d == 0:
            return False
        return all(circle_distance(a * d, 0).upper() <= tol * d for a in angles)


@dataclass(frozen=True)
class RatioConsistent:
    """Inexact inputs: the ratio enclosure contains p/q with q <= the search bound."""

    p: int
    q: int


@dataclass(frozen=True)
class NoRationalUpTo:
    bound: int
    irrational: bool = False


TypeVerdict = Union[FiniteOrderConsistent, DenseEvidence, FirstTypeByRatio, RatioConsistent, NoRationalUpTo]


def verdict_to_json(v) -> dict:
    name = type(v).__name__
    if isinstance(v, FiniteOrderConsistent):
        return {"verdict": name, "order": v.order, "tolerance": v.tolerance}
    if isinstance(v, DenseEvidence):
        return {"verdict": name, "samples": v.samples, "max_gap": v.max_gap.to_json(), "max_gap_hi": float(v.max_gap.upper())}
    if isinstance(v, FirstTypeByRatio):
        return {"verdict": name, "p": str(v.p), "q": str(v.q), "predicted_order_divides": str(v.predicted_order_divides)}
    if isinstance(v, RatioConsistent):
        return {"verdict": name, "p": str(v.p), "q": str(v.q)}
    return {"verdict": name, "D": v.bound, "irrational": v.irrational}


def psi_angle(G: ConstructionResult, n: int) -> RealBall:
    """{n Re(u)}, the image of xi^n eta^m under psi measured in turns."""
    return frac(G.u.re * n)


def psi(G: ConstructionResult, n: int) -> ComplexBall:
    """e^{2 pi i n Re(u)}, computed from the reduced angle rather than by powering xi/|xi|."""
    if n == 0:
        return ComplexBall.exact_value(1, 0, G.prec)
    a = psi_angle(G, n)
    return exp_2pi_i(ComplexBall(a, RealBall.zero(G.prec)), G.prec)


def _element(G: ConstructionResult, n: int, m: int, k: int, source: str) -> NearUnitElement:
    res = abs(G.u * n + G.v * m - k)
    return NearUnitElement(n, m, k, res, psi_angle(G, n), source)


def near_unit_elements(G: ConstructionResult, eps, budget: int, *, include_identity: bool = False,
                       include_construction: bool = True) -> list[NearUnitElement]:
    """Triples (n, m, k) with certified |n u + m v - k| < eps.

    Scans |n|, |m| <= budget (for each n only the m allowed by the imaginary
    part are tried), then adds the construction's own rows (r_j, s_j, q_j + 1)
    for odd j.  Sorted by (residual, n, m).
    """
    eps = float(eps)
    if not 0 < eps < 0.25:
        raise ValueError("eps must lie in (0, 1/4)")
    ur, ui = float(G.u.re.mid), float(G.u.im.mid)
    vr, vi = float(G.v.re.mid), float(G.v.im.mid)
    ns = np.arange(-budget, budget + 1, dtype=np.float64)
    slack = 1e-9 + 8 * budget * 2.0 ** -50 * (abs(ur) + abs(ui) + abs(vr) + abs(vi))
    centre = -ns * ui / vi
    width = (eps + slack) / abs(vi)
    found: dict[tuple[int, int, int], NearUnitElement] = {}
    for off in range(0, math.ceil(2 * width) + 2):
        ms = np.floor(centre - width) + off
        re = ns * ur + ms * vr
        ks = np.rint(re)
        ok = (np.abs(ms) <= budget) & (np.hypot(re - ks, ns * ui + ms * vi) < eps + slack)
        for i in np.nonzero(ok)[0]:
            n, m, k = int(ns[i]), int(ms[i]), int(ks[i])
            if n == 0 and m == 0 and not include_identity:
                continue
            if (n, m, k) in found:
                continue
            e = _element(G, n, m, k, "scan")
            if e.residual.upper() < eps:
                found[(n, m, k)] = e
    if include_construction:
        for j, (r, s, qq) in zip(range(3, G.depth, 2), G.near_unit_rows()):
            e = _element(G, r, s, qq, f"construction:n={j}")
            if e.residual.upper() < eps:
                found[(r, s, qq)] = e
    return sorted(found.values(), key=lambda e: (e.residual.upper(), e.n, e.m))


def dedupe_angles(angles: list[RealBall]) -> list[RealBall]:
    """Sort by midpoint and drop angles within 2^-20 turns of one already kept (circularly)."""
    out: list[RealBall] = []
    for a in sorted(angles, key=lambda b: b.mid):
        if out and circle_distance(a, out[-1]).mid <= _DEDUP:
            continue
        out.append(a)
    if len(out) > 1 and circle_distance(out[-1], out[0]).mid <= _DEDUP:
        out.pop()
    return out


def sample_HG(G: ConstructionResult, eps, budget: int) -> list[RealBall]:
    """psi-angles (turns, in [0, 1)) of near-unit elements, identity included, deduplicated."""
    elems = near_unit_elements(G, eps, budget)
    angles = [RealBall.zero(G.prec)] + [e.psi_angle for e in elems]
    return dedupe_angles(angles)


def _degenerate(b: RealBall) -> bool:
    return b.contains_zero()


def first_type_ratio_test(u: ComplexBall, v: ComplexBall, D: int = 10 ** 6) -> TypeVerdict:
    """Rationality of Re(u) Im(v) / (Re(v) Im(u)), which forces the first type.

    Exact inputs are decided exactly.  For enclosures the simplest rational in
    the ratio's enclosure is looked up; one with denominator <= D is reported
    as merely consistent.
    """
    if _degenerate(v.re) or _degenerate(u.im):
        raise DegenerateGeneratorsError("degenerate generators: Re v or Im u may vanish")
    rho = (u.re * v.im) / (v.re * u.im)
    if rho.exact is not None:
        q = rho.exact.rational
        if q is not None:
            return FirstTypeByRatio(q.numerator, q.denominator)
        return NoRationalUpTo(D, irrational=True)
    found = smallest_rational_in(rho.lower_fraction(), rho.upper_fraction(), max_den=D)
    if found is None:
        return NoRationalUpTo(D)
    return RatioConsistent(found.numerator, found.denominator)


def classify_type(samples: list[RealBall], D: int = DEFAULT_ORDER_BOUND, tol: float = DEFAULT_TOLERANCE) -> TypeVerdict:
    """Smallest n <= D such that every angle sits within tol of a multiple of 1/n;
    otherwise the largest circular gap between the sorted angles."""
    if not samples:
        raise ValueError("need at least one sample")
    for n in range(1, D + 1):
        if all(circle_distance(a * n, 0).upper() <= tol * n for a in samples):
            return FiniteOrderConsistent(n, tol)
    ordered = sorted(samples, key=lambda b: b.mid)
    gaps = [b - a for a, b in zip(ordered, ordered[1:])]
    gaps.append(ordered[0] + 1 - ordered[-1])
    return DenseEvidence(len(samples), max(gaps, key=lambda g: g.mid))
