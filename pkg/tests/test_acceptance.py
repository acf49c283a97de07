"""Acceptance criteria, one test each.  Every test prints a single PASS/FAIL
line (also collected into the terminal summary) before asserting."""
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from denseorbit.classify import (
    FirstTypeByRatio,
    NoRationalUpTo,
    first_type_ratio_test,
    near_unit_elements,
    sample_HG,
)
from denseorbit.construction import abc_terms, q_sequence, residual_report, schedules
from denseorbit.contfrac import convergents
from denseorbit.lattice import (
    IndependentUpTo,
    RelationFound,
    approximate_additive,
    check_condition_star,
)
from denseorbit.numerics import ComplexBall, RealBall, Surd, circle_distance, pi_ball
from denseorbit.solver import approximate_lambda, verify_certificate
from oracles import box_oracle, q_oracle


def report(k: int, ok: bool, elapsed: float, limit: float, detail: str = ""):
    ok = ok and elapsed < limit
    line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail} ({elapsed:.2f}s, limit {limit:g}s)"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_1_q_schedule():
    t0 = time.perf_counter()
    q = q_sequence(5)
    ok = tuple(q[:4]) == (1, 2, 31, 994) and q[4] == q_oracle(5)[4] == 986062941
    report(1, ok, time.perf_counter() - t0, 1, f"q_1..q_5 = {q}")


def test_criterion_2_term_lists():
    t0 = time.perf_counter()
    a, b, c = abc_terms(5)
    ok = (a.terms == (1, 1, 15, 32, 995 * 997) and b.terms == (2, 1, 10, 31, 994 * 997)
          and c.terms == (2, 2, 6, 31, 994 * 995))
    for n in range(2, 9):
        scheds = schedules(n)
        ok = ok and all([cv.q for cv in convergents(t)] == s for t, s in zip(abc_terms(n), scheds))
        q = scheds[0]
        ok = ok and scheds[1] == [x + 1 for x in q]
        ok = ok and scheds[2] == [x + 2 + (-1) ** (j + 1) for j, x in enumerate(q)]
    report(2, ok, time.perf_counter() - t0, 1, "a, b, c terms and denominator schedules for n <= 8")


def test_criterion_3_determinant_identities():
    t0 = time.perf_counter()
    _, b, c = abc_terms(11)
    q = q_sequence(11)
    r = [cv.p for cv in convergents(b)]
    s = [cv.p for cv in convergents(c)]
    ok = True
    for n in range(1, 10, 2):
        i = n - 1  # list index of q_n
        ok = ok and r[i] * (q[i + 1] + 1) - r[i + 1] * (q[i] + 1) == 1
        ok = ok and s[i] * (q[i + 1] + 3) - s[i + 1] * (q[i] + 1) == 1
    report(3, ok, time.perf_counter() - t0, 1, "both identities for odd n <= 9")


def test_criterion_4_residuals(G8):
    t0 = time.perf_counter()
    reps = [residual_report(G8, n) for n in (3, 5, 7)]
    ok = all(r.certified for r in reps)
    ok = ok and all(b.lattice_residual.certainly_lt(a.lattice_residual)
                    and b.frac_residual.certainly_lt(a.frac_residual) for a, b in zip(reps, reps[1:]))
    his = ", ".join(f"n={r.n}: {float(r.lattice_residual.upper()):.3e}/{float(r.frac_residual.upper()):.3e}"
                    for r in reps)
    report(4, ok, time.perf_counter() - t0, 10, f"N=8 prec={G8.prec}, residuals {his}")


def test_criterion_5_condition_star(G6):
    t0 = time.perf_counter()
    v = check_condition_star(G6.beta, G6.gamma, 50)
    ok = isinstance(v, IndependentUpTo) and v.bound == 50 and v.margin_lower > 0
    w = check_condition_star(Fraction(1, 2), Fraction(1, 3), 50)
    ok = ok and isinstance(w, RelationFound) and (w.cert.k, w.cert.l, w.cert.m) == (2, 0, -1) and w.cert.is_exact
    margin = float(v.margin_lower) if isinstance(v, IndependentUpTo) else None
    report(5, ok, time.perf_counter() - t0, 30, f"beta, gamma independent up to 50 (margin {margin:.3e})")


def test_criterion_6_first_type(G6):
    t0 = time.perf_counter()
    v = first_type_ratio_test(ComplexBall.exact_value(1, 2), ComplexBall.exact_value(3, 4))
    ok = v == FirstTypeByRatio(2, 3)
    w = first_type_ratio_test(G6.u, G6.v, 10 ** 6)
    ok = ok and isinstance(w, NoRationalUpTo) and w.bound == 10 ** 6
    report(6, ok, time.perf_counter() - t0, 5, f"{v}; construction: {w}")


def test_criterion_7_alpha_direction_sampled(G6):
    t0 = time.perf_counter()
    angles = sample_HG(G6, 0.2, 200)
    hit_sample = any(circle_distance(a, G6.alpha).upper() < 1e-2 for a in angles)
    rows = [e for e in near_unit_elements(G6, 0.2, 200)
            if e.source.startswith("construction:") and int(e.source.split("=")[1]) >= 5
            and circle_distance(e.psi_angle, G6.alpha).upper() < 1e-2]
    ok = hit_sample and bool(rows)
    dev = float(circle_distance(rows[0].psi_angle, G6.alpha).upper()) if rows else None
    report(7, ok, time.perf_counter() - t0, 30, f"{len(angles)} angles; {rows[0].source if rows else '-'} deviation {dev}")


# coarse grid in the annulus 1/2 <= |lambda| <= 4; theta cycles through 0, pi/3, pi
LAMBDAS = [(2, 0), (Fraction(1, 2), 0), (-1, 0), (0, 4), (1, 1),
           (-3, 2), (Fraction(3, 5), Fraction(-2, 5)), (-2, -2), (3, 0), (0, Fraction(-1, 2))]
THETAS = [Fraction(0), Fraction(1, 3), Fraction(1)]  # multiples of pi
EPS, DELTA, BOX = 0.2, 0.3, 300


def test_criterion_8_oracle_dominance(G6):
    t0 = time.perf_counter()
    budget = (2 * BOX + 1) ** 2
    u = complex(float(G6.u.re.mid), float(G6.u.im.mid))
    v = complex(float(G6.v.re.mid), float(G6.v.im.mid))
    prec2 = 2 * G6.prec
    pi2 = pi_ball(prec2)
    failures, solved, met = [], 0, 0
    for i, (re, im) in enumerate(LAMBDAS):
        t = THETAS[i % 3]
        lam = ComplexBall.exact_value(re, im, prec2)
        theta = pi2 * RealBall.exact_value(t, prec2)
        oracle = box_oracle(u, v, complex(float(re), float(im)), float(t) * np.pi, EPS, DELTA, BOX)
        cert = approximate_lambda(G6, lam, theta, EPS, DELTA, budget)
        if oracle is not None and not (cert.meets and not cert.incomplete):
            failures.append(f"lambda={re}+{im}i misses although the oracle found {oracle}")
        if oracle is not None and cert.err.upper() > oracle[0] + 1e-9:
            failures.append(f"lambda={re}+{im}i err worse than oracle")
        if not cert.incomplete and not verify_certificate(G6, cert, lam, theta):
            failures.append(f"lambda={re}+{im}i certificate does not verify at doubled precision")
        solved += oracle is not None
        met += cert.meets and not cert.incomplete
    report(8, not failures, time.perf_counter() - t0, 300,
           "; ".join(failures) or f"10 instances, oracle solved {solved}, solver certified {met}, all verified")


def _additive_oracle(x, y, z, eps, M):
    """Float brute force: minimal |m|+|k|+|l| over |m| <= M with |m tau + k + l i - z| < eps."""
    best = None
    for m in range(-M, M + 1):
        for k in range(round(z.real - m * x) - 1, round(z.real - m * x) + 2):
            for l in range(round(z.imag - m * y) - 1, round(z.imag - m * y) + 2):
                if abs(complex(m * x + k, m * y + l) - z) < eps - 1e-9:
                    key = (abs(m) + abs(k) + abs(l), m, k, l)
                    best = key if best is None or key < best else best
    return best


def test_criterion_9_epsilon_net():
    t0 = time.perf_counter()
    prec = 256
    tau = ComplexBall(RealBall.exact_value(Surd.sqrt(2) - 1, prec),
                      RealBall.exact_value(Surd(Fraction(1, 2)) + Surd.sqrt(3) / 4, prec))
    x, y = float(tau.re.mid), float(tau.im.mid)
    rng = np.random.default_rng(20240917)
    eps, budget = Fraction(1, 50), 20000
    bad = []
    for zr, zi in rng.random((100, 2)):
        z = ComplexBall.exact_value(Fraction(zr), Fraction(zi), prec)
        t = approximate_additive(tau, z, eps, budget)
        err = abs(t.value(tau) - z)
        if not err.upper() < eps:
            bad.append((zr, zi))
        elif t.m % 25 == 0:  # spot-check minimality against the brute force
            o = _additive_oracle(x, y, complex(zr, zi), float(eps), budget)
            if o is not None and o[0] < abs(t.m) + abs(t.k) + abs(t.l):
                bad.append((zr, zi))
    report(9, not bad, time.perf_counter() - t0, 60, f"100 targets within eps=1/50, failures {len(bad)}")
