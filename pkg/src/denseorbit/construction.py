"""Explicit dense 2-generator group of the second type.

The recipe:

1. A denominator schedule q = (1, 2, 31, 994, ...) given by
   q_{2n+1} = q_{2n-1} + q_{2n}(q_{2n}+1)(q_{2n}+3) and
   q_{2n+2} = q_{2n} + q_{2n+1}(q_{2n+1}+1).
2. Three continued fractions alpha, beta, gamma whose convergent denominators
   are q_n, q_n + 1 and q_n + 2 + (-1)^n.  For odd n the beta and gamma
   convergents share the denominator q_n + 1.
3. u = (alpha + i h)/beta, v = (1 - alpha - i h)/gamma, so beta*u + gamma*v = 1
   and Re(beta*u) = alpha; the generators are xi = e^{2 pi i u}, eta = e^{2 pi i v}.

For odd n the integer triple (r_n, s_n, q_n + 1) satisfies
r_n u + s_n v ~ q_n + 1 (so xi^{r_n} eta^{s_n} -> 1) while {r_n Re u} -> alpha.

The printed term list for gamma in the source construction shows 32 in
position 4; the closed formula c_{2n+2} = q_{2n+1} gives 31, and only 31
reproduces the required denominator 997 = q_4 + 3.  This module follows the
formula.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .contfrac import CFTerms, Convergent, convergents, value_enclosure
from .numerics import GUARD_BITS, ComplexBall, RealBall, exp_2pi_i

FORMAT = "dense-orbit/construction-v1"
DEFAULT_H = Fraction(1, 2)
DEFAULT_DEPTH = 6
DEFAULT_PREC = 4096
DEPTH_CAP = 12


class ConstructionError(ValueError):
    pass


def q_sequence(n: int) -> list[int]:
    """First n terms of the denominator schedule, exactly."""
    if n < 2:
        raise ConstructionError("q_sequence needs n >= 2")
    q = [1, 2]
    while len(q) < n:
        k = len(q) + 1  # 1-based index of the next term
        if k % 2:
            q.append(q[k - 3] + q[k - 2] * (q[k - 2] + 1) * (q[k - 2] + 3))
        else:
            q.append(q[k - 3] + q[k - 2] * (q[k - 2] + 1))
    return q


def schedules(n: int) -> tuple[list[int], list[int], list[int]]:
    """Denominator schedules (q_k), (q_k + 1), (q_k + 2 + (-1)^k) for k = 1..n."""
    q = q_sequence(n)
    qb = [x + 1 for x in q]
    qc = [x + 2 + (-1) ** k for k, x in enumerate(q, start=1)]
    return q, qb, qc


def abc_terms(n: int) -> tuple[CFTerms, CFTerms, CFTerms]:
    """Terms of alpha, beta, gamma up to position n, from the closed formulas."""
    if n < 2:
        raise ConstructionError("abc_terms needs n >= 2")
    q = q_sequence(n)
    a, b, c = [1, 1], [2, 1], [2, 2]
    for k in range(3, n + 1):
        if k % 2:
            qe = q[k - 2]  # q_{2m} for k = 2m+1
            a.append((qe + 1) * (qe + 3))
            b.append(qe * (qe + 3))
            c.append(qe * (qe + 1))
        else:
            qo = q[k - 2]  # q_{2m+1} for k = 2m+2
            a.append(qo + 1)
            b.append(qo)
            c.append(qo)
    return CFTerms(tuple(a[:n])), CFTerms(tuple(b[:n])), CFTerms(tuple(c[:n]))


def required_prec(depth: int) -> int:
    return 4 * q_sequence(depth)[-1].bit_length() + 64


def _internal_depth(depth: int, prec: int) -> int:
    # deep enough that every bracket is narrower than 2^-(prec + guard)
    d = max(depth + 1, 3)
    while True:
        q = q_sequence(d)
        if (q[-1] * q[-2]).bit_length() > prec + GUARD_BITS:
            return d
        d += 1


def _as_height(h) -> Fraction:
    try:
        h = Fraction(h)
    except (TypeError, ValueError) as exc:
        raise ConstructionError(f"invalid height {h!r}") from exc
    if h <= 0:
        raise ConstructionError("height must be positive")
    return h


@dataclass(frozen=True, eq=False)
class ConstructionResult:
    depth: int
    h: Fraction
    prec: int
    terms_depth: int
    a: CFTerms
    b: CFTerms
    c: CFTerms
    alpha: RealBall
    beta: RealBall
    gamma: RealBall
    u: ComplexBall
    v: ComplexBall
    xi: ComplexBall
    eta: ComplexBall
    allow_deep: bool = field(default=False, repr=False)

    @cached_property
    def q(self) -> list[int]:
        return q_sequence(self.terms_depth)

    @cached_property
    def alpha_convergents(self) -> list[Convergent]:
        return convergents(self.a)

    @cached_property
    def beta_convergents(self) -> list[Convergent]:
        return convergents(self.b)

    @cached_property
    def gamma_convergents(self) -> list[Convergent]:
        return convergents(self.c)

    def p(self, n: int) -> int:
        return self.alpha_convergents[n - 1].p

    def r(self, n: int) -> int:
        return self.beta_convergents[n - 1].p

    def s(self, n: int) -> int:
        return self.gamma_convergents[n - 1].p

    def near_unit_rows(self) -> list[tuple[int, int, int]]:
        """Triples (r_n, s_n, q_n + 1) for odd 3 <= n <= depth - 1."""
        return [(self.r(n), self.s(n), self.q[n - 1] + 1) for n in range(3, self.depth, 2)]

    def refine(self, prec: int) -> "ConstructionResult":
        """Same group, rebuilt at a different working precision."""
        return build_generators(self.depth, self.h, prec, allow_deep=self.allow_deep)

    def to_json(self) -> dict:
        q, qb, qc = schedules(self.depth)
        return {
            "format": FORMAT,
            "depth": self.depth,
            "terms_depth": self.terms_depth,
            "h": f"{self.h.numerator}/{self.h.denominator}",
            "prec": self.prec,
            "q": [str(x) for x in q],
            "q_beta": [str(x) for x in qb],
            "q_gamma": [str(x) for x in qc],
            "terms": {"a": self.a.to_json(), "b": self.b.to_json(), "c": self.c.to_json()},
            "alpha": self.alpha.to_json(),
            "beta": self.beta.to_json(),
            "gamma": self.gamma.to_json(),
            "u": self.u.to_json(),
            "v": self.v.to_json(),
            "xi": self.xi.to_json(),
            "eta": self.eta.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ConstructionResult":
        if data.get("format") != FORMAT:
            raise ConstructionError(f"unsupported construction format {data.get('format')!r}")
        prec = int(data["prec"])
        terms = data["terms"]
        return cls(
            depth=int(data["depth"]),
            h=Fraction(data["h"]),
            prec=prec,
            terms_depth=int(data["terms_depth"]),
            a=CFTerms.from_json(terms["a"]),
            b=CFTerms.from_json(terms["b"]),
            c=CFTerms.from_json(terms["c"]),
            alpha=RealBall.from_json(data["alpha"], prec),
            beta=RealBall.from_json(data["beta"], prec),
            gamma=RealBall.from_json(data["gamma"], prec),
            u=ComplexBall.from_json(data["u"], prec),
            v=ComplexBall.from_json(data["v"], prec),
            xi=ComplexBall.from_json(data["xi"], prec),
            eta=ComplexBall.from_json(data["eta"], prec),
            allow_deep=int(data["depth"]) > DEPTH_CAP,
        )


def build_generators(depth: int = DEFAULT_DEPTH, h=DEFAULT_H, prec: int = DEFAULT_PREC, *, allow_deep: bool = False) -> ConstructionResult:
    """Assemble alpha, beta, gamma, u, v, xi, eta for schedule depth ``depth``.

    The continued fractions are expanded internally until their brackets are
    narrower than 2^-(prec + 32), so the enclosures of u and v are far below
    2^-(prec/2) even though only ``depth`` convergents are exposed.
    """
    h = _as_height(h)
    if depth < 4:
        raise ConstructionError("depth must be at least 4")
    if depth > DEPTH_CAP and not allow_deep:
        raise ConstructionError(f"depth {depth} exceeds cap {DEPTH_CAP}; pass allow_deep=True")
    if prec < required_prec(depth):
        raise ConstructionError(
            f"precision insufficient for schedule depth: {prec} < {required_prec(depth)}"
        )
    d = _internal_depth(depth, prec)
    a, b, c = abc_terms(d)
    alpha = value_enclosure(a, d, prec)
    beta = value_enclosure(b, d, prec)
    gamma = value_enclosure(c, d, prec)
    hb = RealBall.exact_value(h, prec)
    u = ComplexBall(alpha, hb) / beta
    v = ComplexBall(1 - alpha, -hb) / gamma
    return ConstructionResult(
        depth=depth,
        h=h,
        prec=prec,
        terms_depth=d,
        a=a,
        b=b,
        c=c,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        u=u,
        v=v,
        xi=exp_2pi_i(u, prec),
        eta=exp_2pi_i(v, prec),
        allow_deep=allow_deep,
    )


@dataclass(frozen=True)
class ResidualReport:
    n: int
    q_n: int
    p_n: int
    r_n: int
    s_n: int
    lattice_residual: RealBall
    frac_residual: RealBall
    eps: RealBall
    lattice_bound: RealBall
    frac_bound: RealBall
    coarse_lattice_bound: RealBall

    @property
    def certified(self) -> bool:
        return (
            self.lattice_residual.certainly_lt(self.lattice_bound)
            and self.lattice_residual.certainly_lt(self.coarse_lattice_bound)
            and self.frac_residual.certainly_lt(self.frac_bound)
        )

    def row(self) -> dict:
        return {
            "n": self.n,
            "q_n": str(self.q_n),
            "r_n": str(self.r_n),
            "s_n": str(self.s_n),
            "lattice_residual_hi": _hi(self.lattice_residual),
            "frac_residual_hi": _hi(self.frac_residual),
        }


def _hi(b: RealBall) -> str:
    return format(float(b.upper()), ".6e") if b.upper() > 1e-300 else str(b.upper())


def residual_report(res: ConstructionResult, n: int) -> ResidualReport:
    """Residuals of the odd-index triple (r_n, s_n, q_n + 1) against their bounds.

    lattice_residual = |(q_n + 1) - (r_n u + s_n v)| <= eps (|u| + |v|),
    frac_residual = |{r_n Re u} - alpha| <= eps (|u| + 1),
    where eps is the largest of the three convergent errors at index n.
    """
    if n % 2 == 0 or not 3 <= n <= res.depth - 1:
        raise ConstructionError(f"report defined for odd n only, 3 <= n <= {res.depth - 1}; got {n}")
    from .numerics import frac

    qn = res.q[n - 1]
    pn, rn, sn = res.p(n), res.r(n), res.s(n)
    lattice = abs((qn + 1) - (res.u * rn + res.v * sn))
    fr = abs(frac(res.u.re * rn) - res.alpha)
    eps_a = abs(res.alpha * qn - pn)
    eps_b = abs(res.beta * (qn + 1) - rn)
    eps_c = abs(res.gamma * (qn + 1) - sn)
    eps = max((eps_a, eps_b, eps_c), key=lambda b: b.upper())
    mod_u, mod_v = abs(res.u), abs(res.v)
    return ResidualReport(
        n=n,
        q_n=qn,
        p_n=pn,
        r_n=rn,
        s_n=sn,
        lattice_residual=lattice,
        frac_residual=fr,
        eps=eps,
        lattice_bound=eps * (mod_u + mod_v),
        frac_bound=eps * (mod_u + 1),
        coarse_lattice_bound=(mod_u + mod_v) / (qn + 1),
    )


@dataclass(frozen=True, eq=False)
class Generators:
    """A bare pair u, v (xi = e^{2 pi i u}, eta = e^{2 pi i v}) with no construction data."""

    u: ComplexBall
    v: ComplexBall
    depth: int = 0

    @property
    def prec(self) -> int:
        return min(self.u.prec, self.v.prec)

    def near_unit_rows(self) -> list[tuple[int, int, int]]:
        return []

    def refine(self, prec: int) -> "Generators":
        return Generators(self.u.with_prec(prec), self.v.with_prec(prec))
