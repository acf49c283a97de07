"""Independent reference computations used to freeze expected values.

Nothing here imports the package: the oracles recompute from the defining
recurrences with plain integers, Fractions, mpmath and numpy.
"""
from fractions import Fraction

import mpmath
import numpy as np


def q_oracle(n):
    # q_1 = 1, q_2 = 2; odd positions use (q+1)(q+3), even ones q(q+1)
    q = {1: 1, 2: 2}
    for k in range(3, n + 1):
        prev = q[k - 1]
        step = prev * (prev + 1) * (prev + 3) if k % 2 else prev * (prev + 1)
        q[k] = q[k - 2] + step
    return [q[k] for k in range(1, n + 1)]


def cf_from_denominators(qs):
    # a_k = (Q_k - Q_{k-2}) / Q_{k-1}, Q_0 = 1, Q_{-1} = 0
    Q = [0, 1] + list(qs)
    out = []
    for k in range(2, len(Q)):
        a, r = divmod(Q[k] - Q[k - 2], Q[k - 1])
        assert r == 0
        out.append(a)
    return out


def cf_value(terms):
    x = Fraction(0)
    for a in reversed(terms):
        x = 1 / (a + x)
    return x


def convergents_oracle(terms):
    out = []
    for k in range(1, len(terms) + 1):
        v = cf_value(terms[:k])
        out.append((v.numerator, v.denominator))
    return out


def generators_oracle(depth=12, h=Fraction(1, 2), dps=400):
    """u, v from CF values truncated at a deep index, in mpmath."""
    q = q_oracle(depth)
    qb = [x + 1 for x in q]
    qc = [x + 2 + (-1) ** k for k, x in enumerate(q, start=1)]
    with mpmath.workdps(dps):
        al, be, ga = (mpmath.mpf(cf_value(cf_from_denominators(s)).numerator) /
                      cf_value(cf_from_denominators(s)).denominator for s in (q, qb, qc))
        hh = mpmath.mpf(h.numerator) / h.denominator
        u = (al + 1j * hh) / be
        v = (1 - al - 1j * hh) / ga
        return al, be, ga, u, v


def box_oracle(u, v, lam, theta, eps, delta, B):
    """Exhaustive float64 scan of |n|, |m| <= B; best (err, n, m, dev) meeting (eps, delta) or None.

    err = |e^{2 pi i (n u + m v)} - lam|, dev = circle distance of n Re u from
    theta / 2 pi, in radians.
    """
    best = None
    n = np.arange(-B, B + 1)
    for m in range(-B, B + 1):
        z = n * u + m * v
        with np.errstate(over="ignore"):  # huge moduli just fail the err test
            phase = np.exp(2j * np.pi * (z.real - np.round(z.real))) * np.exp(-2 * np.pi * z.imag)
        err = np.abs(phase - lam)
        t = n * u.real - theta / (2 * np.pi)
        dev = 2 * np.pi * np.abs(t - np.round(t))
        ok = np.nonzero((err < eps) & (dev < delta))[0]
        if ok.size:
            i = ok[np.argmin(err[ok])]
            cand = (float(err[i]), int(n[i]), m, float(dev[i]))
            if best is None or cand[0] < best[0]:
                best = cand
    return best
