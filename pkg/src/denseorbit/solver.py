"""Find group elements xi^n eta^m close to a target with a prescribed direction.

Everything is done in the additive picture: xi^n eta^m = e^{2 pi i (n u + m v)},
so a pair (n, m) is good when n u + m v - w is close to an integer, where
lambda = e^{2 pi i w}.  The direction of xi^n is e^{2 pi i n Re(u)}, whose angle
is steered by adding multiples of near-unit triples (n', m', k'): these move
n u + m v by almost nothing while turning {n Re(u)} by their psi-angle.

Angles (theta, delta, arg_dev) are in radians.  ``budget`` caps the number of
(n, m) pairs in the exhaustive box |n|, |m| <= B, (2B + 1)^2 <= budget.
When the box holds no pair within eps, lattice rounding (LLL + Babai) tries
at most CVP_PAIRS further pairs; the steering pass evaluates at most
``steer_range`` shifts per base and per near-unit element.  Both are
counted in ``budget_used`` on top of the box.
No certificate found within budget is reported as incomplete; this does not
distinguish an infeasible tolerance from an unlucky search.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .classify import near_unit_elements
from .construction import ConstructionResult
from .lll import babai_nearest_plane, lll_reduce
from .numerics import (
    ComplexBall,
    IndeterminateError,
    RealBall,
    arg_principal,
    circle_distance,
    complex_log,
    exp_2pi_i,
    frac,
    pi_ball,
)

STEER_RANGE = 2000
CVP_PAIRS = 27 * 14
CERTIFY_TOP = 8
BASES = 4
_SLACK = 1e-9


class SolverError(ValueError):
    pass


@dataclass(frozen=True)
class ApproxCertificate:
    n: int
    m: int
    err: RealBall
    arg_dev: RealBall
    budget_used: int
    incomplete: bool = False
    eps: float | None = None
    delta: float | None = None

    @property
    def meets(self) -> bool:
        return _meets(self.err, self.arg_dev, self.eps, self.delta)

    def to_json(self) -> dict:
        return {
            "n": str(self.n),
            "m": str(self.m),
            "err": self.err.to_json(),
            "err_hi": float(self.err.upper()),
            "arg_dev": self.arg_dev.to_json(),
            "arg_dev_hi": float(self.arg_dev.upper()),
            "eps": self.eps,
            "delta": self.delta,
            "budget_used": self.budget_used,
            "incomplete": self.incomplete,
        }


@dataclass(frozen=True)
class Verification:
    ok: bool
    err: RealBall
    arg_dev: RealBall
    prec: int
    diagnostics: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _meets(err: RealBall, arg_dev: RealBall, eps, delta) -> bool:
    if eps is not None and not err.upper() < eps:
        return False
    if delta is not None and not arg_dev.upper() < delta:
        return False
    return True


def as_complex_ball(x, prec: int) -> ComplexBall:
    if isinstance(x, ComplexBall):
        return x if x.prec >= prec else x.with_prec(prec)
    if isinstance(x, tuple):
        return ComplexBall.exact_value(Fraction(x[0]), Fraction(x[1]), prec)
    if isinstance(x, complex):
        return ComplexBall.exact_value(Fraction(x.real), Fraction(x.imag), prec)
    return ComplexBall.exact_value(Fraction(x), 0, prec)


def as_real_ball(x, prec: int) -> RealBall:
    if isinstance(x, RealBall):
        return x if x.prec >= prec else x.with_prec(prec)
    return RealBall.exact_value(Fraction(x), prec)


def box_half_width(budget: int) -> int:
    """Largest B with (2B + 1)^2 <= budget (0 for budgets below 9)."""
    if budget < 1:
        return 0
    return max(0, (math.isqrt(budget) - 1) // 2)


# ---------------------------------------------------------------------------
# certified evaluation
# ---------------------------------------------------------------------------

def _exponent(G: ConstructionResult, n: int, m: int) -> ComplexBall:
    if n == 0 and m == 0:
        return ComplexBall.exact_value(0, 0, G.prec)
    return G.u * n + G.v * m


def _angle(G: ConstructionResult, n: int) -> RealBall:
    return RealBall.zero(G.prec) if n == 0 else frac(G.u.re * n)


def evaluate(G: ConstructionResult, n: int, m: int, lam: ComplexBall, theta_turns: RealBall) -> tuple[RealBall, RealBall]:
    """Certified (|xi^n eta^m - lambda|, circle distance of arg xi^n from theta in radians)."""
    val = exp_2pi_i(_exponent(G, n, m), G.prec)
    err = abs(val - lam)
    dev = circle_distance(_angle(G, n), theta_turns) * (pi_ball(G.prec) * 2)
    return err, dev


def _key(err: RealBall, n: int, m: int):
    return (err.upper(), abs(n) + abs(m), n, m)


# ---------------------------------------------------------------------------
# float search
# ---------------------------------------------------------------------------

@dataclass
class _Problem:
    G: ConstructionResult
    lam: ComplexBall
    theta_turns: RealBall
    eps: float
    delta: float
    u: complex = 0j
    v: complex = 0j
    w: complex = 0j
    lam_abs: float = 0.0
    theta_f: float = 0.0
    exact_u: tuple = ()
    exact_w: tuple = ()

    def __post_init__(self):
        G = self.G
        self.u = complex(float(G.u.re.mid), float(G.u.im.mid))
        self.v = complex(float(G.v.re.mid), float(G.v.im.mid))
        two_pi = pi_ball(G.prec) * 2
        logl = complex_log(self.lam)
        # w = log(lambda) / (2 pi i)
        w_re, w_im = logl.im / two_pi, -(logl.re / two_pi)
        self.w = complex(float(w_re.mid), float(w_im.mid))
        self.lam_abs = abs(complex(float(self.lam.re.mid), float(self.lam.im.mid)))
        self.theta_f = float(self.theta_turns.mid)
        mid = lambda b: Fraction(*map(int, b.mid.as_integer_ratio()))
        self.exact_u = (mid(G.u.re), mid(G.u.im), mid(G.v.re), mid(G.v.im))
        self.exact_w = (mid(w_re), mid(w_im))

    def float_err(self, r):
        with np.errstate(over="ignore", invalid="ignore"):
            return self.lam_abs * np.abs(np.exp(2j * np.pi * r) - 1)

    def float_dev(self, a):
        d = np.mod(a - self.theta_f + 0.5, 1.0) - 0.5
        return 2 * np.pi * np.abs(d)


def _scan_rows(P: _Problem, ns: np.ndarray, B: int):
    ms = np.arange(-B, B + 1, dtype=np.float64)
    N, M = np.meshgrid(ns, ms, indexing="ij")
    d = N * P.u + M * P.v - P.w
    r = d - np.rint(d.real)
    err = P.float_err(r)
    dev = P.float_dev(N * P.u.real)
    return N.ravel(), M.ravel(), err.ravel(), dev.ravel()


def _top(N, M, err, mask, k):
    idx = np.nonzero(mask)[0]
    if idx.size == 0:
        return []
    e, n, m = err[idx], N[idx], M[idx]
    order = np.lexsort((m, n, np.abs(n) + np.abs(m), e))[:k]
    return [(float(e[i]), int(n[i]), int(m[i])) for i in order]


def _box_scan(P: _Problem, B: int, threads: int = 1):
    """Best pairs in the box by float error: those meeting both tolerances, and those meeting eps."""
    chunks = [np.arange(lo, min(lo + 64, B + 1), dtype=np.float64) for lo in range(-B, B + 1, 64)]

    def work(ns):
        N, M, err, dev = _scan_rows(P, ns, B)
        ok_eps = err < P.eps + _SLACK
        both = _top(N, M, err, ok_eps & (dev < P.delta + _SLACK), CERTIFY_TOP)
        near = _top(N, M, err, ok_eps, BASES)
        best = _top(N, M, err, np.ones_like(ok_eps), 1)
        return both, near, best

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    merge = lambda lists, k: sorted(
        (x for l in lists for x in l), key=lambda t: (t[0], abs(t[1]) + abs(t[2]), t[1], t[2])
    )[:k]
    return (
        merge([p[0] for p in parts], CERTIFY_TOP),
        merge([p[1] for p in parts], BASES),
        merge([p[2] for p in parts], 1),
    )


def _cvp_bases(P: _Problem, allowance: int) -> tuple[list[tuple[float, int, int]], int]:
    """Pairs (n, m) with n u + m v close to w mod 1, from Babai rounding at growing scales."""
    ur, ui, vr, vi = P.exact_u
    wr, wi = P.exact_w
    used = 0
    found: dict[tuple[int, int], float] = {}
    for s in range(6, 62, 4):
        if used + 27 > allowance:
            break
        S = 1 << s
        basis = lll_reduce([
            [1, 0, round(S * ur), round(S * ui)],
            [0, 1, round(S * vr), round(S * vi)],
            [0, 0, S, 0],
        ])
        c = babai_nearest_plane(basis, [0, 0, round(S * wr), round(S * wi)])
        pairs = {
            (c[0] + a * basis[0][0] + b * basis[1][0] + e * basis[2][0],
             c[1] + a * basis[0][1] + b * basis[1][1] + e * basis[2][1])
            for a in (-1, 0, 1) for b in (-1, 0, 1) for e in (-1, 0, 1)
        }
        used += len(pairs)
        for n, m in pairs:
            r = _float_residual(P, n, m)
            found[(n, m)] = float(P.float_err(r))
        if any(e < P.eps / 2 for e in found.values()):
            break
    ranked = sorted(((e, n, m) for (n, m), e in found.items() if e < P.eps),
                    key=lambda t: (t[0], abs(t[1]) + abs(t[2]), t[1], t[2]))
    return ranked[:BASES], used


def _float_residual(P: _Problem, n: int, m: int) -> complex:
    """n u + m v - w reduced mod 1, accurate for big n, m (exact rational arithmetic on the midpoints)."""
    ur, ui, vr, vi = P.exact_u
    wr, wi = P.exact_w
    re = n * ur + m * vr - wr
    re -= round(re)
    return complex(float(re), float(n * ui + m * vi - wi))


def _steer(P: _Problem, base: tuple[int, int], elems, J: int) -> tuple[list[tuple[int, int]], int]:
    """Shifts base + j * e (|j| <= J) predicted to meet both tolerances, smallest |j| per element."""
    n0, m0 = base
    r0 = _float_residual(P, n0, m0)
    a0 = float(_angle(P.G, n0).mid)
    js = np.arange(-J, J + 1, dtype=np.float64)
    js = js[np.argsort(np.abs(js) * 2 + (js < 0), kind="stable")]
    out, used = [], 0
    for e in elems:
        d = complex(float(e[3].re.mid), float(e[3].im.mid))
        a = float(e[4].mid)
        err = P.float_err(r0 + js * d)
        dev = P.float_dev(a0 + js * a)
        used += js.size
        ok = np.nonzero((err < P.eps - _SLACK) & (dev < P.delta - _SLACK))[0]
        for i in ok[:2]:
            j = int(js[i])
            out.append((n0 + j * e[0], m0 + j * e[1]))
    return out, used


def _steering_elements(G: ConstructionResult):
    elems = []
    for e in near_unit_elements(G, 0.2, 40):
        if e.n <= 0 and not (e.n == 0 and e.m > 0):
            continue  # j runs over both signs already
        d = G.u * e.n + G.v * e.m - e.k
        elems.append((e.n, e.m, e.k, d, e.psi_angle))
    return elems


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def approximate_lambda(G: ConstructionResult, lam, theta, eps, delta, budget: int, *,
                       threads: int = 1, steer_range: int = STEER_RANGE) -> ApproxCertificate:
    """(n, m) with certified |xi^n eta^m - lambda| < eps and arg(xi^n) within delta of theta.

    Candidates from the exhaustive box and from steering the best bases are
    certified with ball arithmetic; the winner minimizes
    (err upper bound, |n| + |m|, n, m).
    """
    eps, delta = float(eps), float(delta)
    if not (eps > 0 and delta > 0):
        raise SolverError("eps and delta must be positive")
    if budget < 1:
        raise SolverError("budget must be positive")
    prec = G.prec
    lam = as_complex_ball(lam, prec)
    if lam.contains_zero():
        raise SolverError("target enclosure contains 0")
    theta_turns = as_real_ball(theta, prec) / (pi_ball(prec) * 2)
    P = _Problem(G, lam, theta_turns, eps, delta)

    B = box_half_width(budget)
    used = (2 * B + 1) ** 2
    both, near, best = _box_scan(P, B, threads)
    bases = [(n, m) for _, n, m in near]
    if not bases:
        cvp, extra = _cvp_bases(P, CVP_PAIRS)
        used += extra
        bases = [(n, m) for _, n, m in cvp]

    pool = {(n, m) for _, n, m in both}
    if bases:
        elems = _steering_elements(G)
        for base in bases:
            shifted, extra = _steer(P, base, elems, steer_range)
            used += extra
            pool.update(shifted)

    certified = []
    for n, m in sorted(pool):
        err, dev = evaluate(G, n, m, lam, theta_turns)
        if _meets(err, dev, eps, delta):
            certified.append((n, m, err, dev))
    if certified:
        n, m, err, dev = min(certified, key=lambda c: _key(c[2], c[0], c[1]))
        return ApproxCertificate(n, m, err, dev, used, False, eps, delta)

    # best so far: the closest certified value, ignoring the angle
    fallback = set(bases) | {(n, m) for _, n, m in best} | {(0, 0)}
    scored = []
    for n, m in fallback:
        err, dev = evaluate(G, n, m, lam, theta_turns)
        scored.append((n, m, err, dev))
    n, m, err, dev = min(scored, key=lambda c: _key(c[2], c[0], c[1]))
    return ApproxCertificate(n, m, err, dev, used, True, eps, delta)


def verify_certificate(G: ConstructionResult, cert: ApproxCertificate, lam, theta,
                       eps=None, delta=None, prec: int | None = None) -> Verification:
    """Recompute the certificate's bounds from scratch at ``prec`` (default: twice G's).

    The tolerances default to the ones stored in the certificate.
    """
    eps = cert.eps if eps is None else float(eps)
    delta = cert.delta if delta is None else float(delta)
    prec = 2 * G.prec if prec is None else prec
    H = G.refine(prec) if prec > G.prec else G
    lam_b = as_complex_ball(lam, H.prec)
    theta_turns = as_real_ball(theta, H.prec) / (pi_ball(H.prec) * 2)
    try:
        err, dev = evaluate(H, cert.n, cert.m, lam_b, theta_turns)
    except IndeterminateError as exc:
        z = RealBall.zero(H.prec)
        return Verification(False, z, z, H.prec, f"evaluation failed: {exc}")
    notes = []
    if eps is not None and not err.upper() < eps:
        notes.append(f"err {float(err.upper()):.3e} not below eps {eps:g}")
    if delta is not None and not dev.upper() < delta:
        notes.append(f"arg_dev {float(dev.upper()):.3e} not below delta {delta:g}")
    return Verification(not notes, err, dev, H.prec, "; ".join(notes))


@dataclass(frozen=True)
class RatioStep:
    """One term of the sequence: z1 xi^n / (z2 eta^m) is close to 1."""

    n: int
    m: int
    eps: float
    delta: float
    cert: ApproxCertificate
    ratio_err: RealBall  # |z1 xi^n / (z2 eta^m) - 1|
    eta_angle_dev: RealBall  # circle distance of arg(eta^m) from -arg(z2), radians
    eta_angle_bound: RealBall  # arg_dev + asin(|z1/z2| err)
    verified: bool

    def to_json(self) -> dict:
        return {
            "n": str(self.n),
            "m": str(self.m),
            "eps": self.eps,
            "delta": self.delta,
            "err_hi": float(self.cert.err.upper()),
            "arg_dev_hi": float(self.cert.arg_dev.upper()),
            "ratio_err_hi": float(self.ratio_err.upper()),
            "eta_angle_dev_hi": float(self.eta_angle_dev.upper()),
            "eta_angle_bound_hi": float(self.eta_angle_bound.upper()),
            "verified": self.verified,
        }


@dataclass
class RatioCertificateSequence:
    z1: ComplexBall
    z2: ComplexBall
    steps: list[RatioStep] = field(default_factory=list)
    truncated: bool = False
    report: str = ""

    def to_json(self) -> dict:
        return {
            "z1": self.z1.to_json(),
            "z2": self.z2.to_json(),
            "steps": [s.to_json() for s in self.steps],
            "truncated": self.truncated,
            "report": self.report,
        }


def ratio_sequence(G: ConstructionResult, z1, z2, K: int, budget: int, eps0: float = 0.2,
                   delta0: float = 0.3, *, threads: int = 1) -> RatioCertificateSequence:
    """K pairs (n_k, m_k) with z1 xi^n / (z2 eta^m) -> 1 and arg(xi^n) -> -arg(z1).

    Solved as xi^n eta^{-m} ~ z2/z1 with tolerances eps0 2^-k, delta0 2^-k.
    The eta-angle is a derived field: arg(eta^m) differs from -arg(z2) by at
    most arg_dev + asin(|z1/z2| err), which is checked for every step.
    """
    prec = G.prec
    z1, z2 = as_complex_ball(z1, prec), as_complex_ball(z2, prec)
    if z1.contains_zero() or z2.contains_zero():
        raise SolverError("z1 and z2 must be nonzero")
    lam = z2 / z1
    theta = -arg_principal(z1)
    two_pi = pi_ball(prec) * 2
    eta_target = -(arg_principal(z2) / two_pi)
    scale = abs(z1 / z2)
    seq = RatioCertificateSequence(z1, z2)
    for k in range(K):
        eps_k, delta_k = eps0 / 2 ** k, delta0 / 2 ** k
        cert = approximate_lambda(G, lam, theta, eps_k, delta_k, budget, threads=threads)
        if cert.incomplete:
            seq.truncated = True
            seq.report = f"step {k}: budget {budget} exhausted at eps={eps_k:g}, delta={delta_k:g}"
            break
        ver = verify_certificate(G, cert, lam, theta)
        n, m = cert.n, -cert.m
        eta_angle = RealBall.zero(prec) if m == 0 else frac(G.v.re * m)
        eta_dev = circle_distance(eta_angle, eta_target) * two_pi
        x = scale * cert.err
        bound = cert.arg_dev + (x.asin() if x.upper() < 1 else pi_ball(prec))
        ratio_err = cert.err * scale
        ok = bool(ver) and eta_dev.upper() <= bound.upper()
        seq.steps.append(RatioStep(n, m, eps_k, delta_k, cert, ratio_err, eta_dev, bound, ok))
        if not ok:
            seq.truncated = True
            seq.report = f"step {k}: verification failed ({ver.diagnostics or 'eta-angle bound'})"
            break
    return seq
