"""Command-line front end: construct, check, classify, approximate.

Exit codes: 0 success, 2 usage error, 3 degenerate input, 4 budget exhausted.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from datetime import datetime, timezone
from fractions import Fraction

from . import classify as cl
from .construction import (
    DEFAULT_DEPTH,
    DEFAULT_PREC,
    ConstructionError,
    ConstructionResult,
    Generators,
    build_generators,
    residual_report,
)
from .lattice import DEFAULT_STAR_BOUND, LatticeError, multiplicative_density_check
from .numerics import ComplexBall, IndeterminateError, RealBall, pi_ball
from .solver import SolverError, approximate_lambda, ratio_sequence, verify_certificate

EXIT_OK, EXIT_USAGE, EXIT_DEGENERATE, EXIT_BUDGET = 0, 2, 3, 4


class UsageError(ValueError):
    pass


class DegenerateInput(ValueError):
    pass


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_ANGLE = re.compile(r"^(?P<coef>[+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\*?pi(?:/(?P<den>\d+))?$")


def _fraction(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a number: {s!r}") from exc


def parse_complex(s: str) -> tuple[Fraction, Fraction]:
    """'1+2i', '-3/4i', '0.5', 'i', '1e-3-2j' or 're,im' as exact rationals."""
    text = s.replace(" ", "")
    if "," in text:
        a, b = text.split(",", 1)
        return _fraction(a), _fraction(b)
    if not text:
        raise UsageError("malformed complex number: ''")
    if text[-1] not in "ij":
        return _fraction(text), Fraction(0)
    body = text[:-1]
    # split before the last sign that is neither leading nor an exponent sign
    cut = max((i for i, ch in enumerate(body) if ch in "+-" and i > 0 and body[i - 1] not in "eE"), default=0)
    re_text, im_text = body[:cut], body[cut:]
    if im_text in ("", "+", "-"):
        im_text += "1"
    if any(ch in "ij" for ch in body):
        raise UsageError(f"malformed complex number: {s!r}")
    return (_fraction(re_text) if re_text else Fraction(0)), _fraction(im_text)


def parse_angle(s: str, prec: int) -> RealBall:
    """Radians: a rational/decimal, or a multiple of pi such as 'pi/3', '-2pi/3', '0.5*pi'."""
    text = s.replace(" ", "")
    mt = _ANGLE.match(text)
    if mt is None:
        return RealBall.exact_value(_fraction(text), prec)
    coef = mt.group("coef")
    c = Fraction(1) if coef in ("", "+") else Fraction(-1) if coef == "-" else _fraction(coef)
    if mt.group("den"):
        c /= int(mt.group("den"))
    return pi_ball(prec) * c


def _positive(kind):
    def conv(s):
        try:
            v = kind(s)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"invalid value {s!r}") from exc
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive: {s!r}")
        return v
    return conv


def _count(s: str) -> int:
    """Positive integer, also accepting '1e6'."""
    try:
        v = int(s) if s.lstrip("+-").isdigit() else int(float(s))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid count {s!r}") from exc
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {s!r}")
    return v


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # accepted before or after the subcommand; the subcommand copy must not
    # overwrite values given before it, hence SUPPRESS defaults there
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--prec", type=_positive(int), default=d(None), help="working precision in bits")
    g.add_argument("--output", "-o", default=d("-"), help="output path ('-' for stdout)")
    g.add_argument("--format", choices=("json", "csv"), default=d("json"))
    g.add_argument("--threads", type=_positive(int), default=d(1))
    g.add_argument("--no-timestamp", action="store_true", default=d(False), help="omit the generated_at field")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(suppress=True)
    p = argparse.ArgumentParser(prog="denseorbit", parents=[_global_flags(suppress=False)],
                                description="Dense two-generator groups in C*: construction, checks, approximation.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", parents=[common], help="build the explicit generators")
    c.add_argument("--depth", "-N", type=int, default=DEFAULT_DEPTH)
    c.add_argument("--h", default="1/2", help="imaginary height h > 0 (rational or decimal)")
    c.add_argument("--allow-deep", action="store_true")
    c.add_argument("--residual-csv", default=None, help="also write the residual table here")

    def generator_source(sp):
        sp.add_argument("--construction", "-c", default=None, help="construction JSON file")
        sp.add_argument("--u", default=None, help="inline generator exponent, e.g. 1+2i")
        sp.add_argument("--v", default=None)

    k = sub.add_parser("check", parents=[common], help="density and first-type tests")
    generator_source(k)
    k.add_argument("--M", type=_positive(int), default=DEFAULT_STAR_BOUND)
    k.add_argument("--ratio-bound", "-D", type=_count, default=10 ** 6)
    k.add_argument("--eps", type=_positive(float), default=0.2)
    k.add_argument("--budget", type=_count, default=200)

    s = sub.add_parser("classify", parents=[common], help="sample H_G and classify")
    generator_source(s)
    s.add_argument("--eps", type=_positive(float), default=0.2)
    s.add_argument("--budget", type=_count, default=200)
    s.add_argument("--order-bound", "-D", type=_positive(int), default=cl.DEFAULT_ORDER_BOUND)
    s.add_argument("--tol", type=_positive(float), default=cl.DEFAULT_TOLERANCE)

    a = sub.add_parser("approximate", parents=[common], help="certified approximation of a target")
    generator_source(a)
    a.add_argument("--lambda", dest="lam", default=None, help="target in C \\ {0}, e.g. 2 or 1+i")
    a.add_argument("--theta", default="0", help="direction target for xi^n in radians, e.g. pi/3")
    a.add_argument("--eps", type=_positive(float), default=0.2)
    a.add_argument("--delta", type=_positive(float), default=0.3)
    a.add_argument("--budget", type=_count, default=10 ** 5)
    a.add_argument("--z1", default=None, help="two-orbit mode: first point")
    a.add_argument("--z2", default=None, help="two-orbit mode: second point")
    a.add_argument("--K", type=_positive(int), default=3, help="two-orbit mode: sequence length")
    return p


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _height(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"invalid height {s!r}") from exc


def cmd_construct(args) -> tuple[dict, list[dict], int]:
    prec = args.prec or DEFAULT_PREC
    try:
        G = build_generators(args.depth, _height(args.h), prec, allow_deep=args.allow_deep)
    except ConstructionError as exc:
        raise UsageError(str(exc)) from exc
    rows = [residual_report(G, n).row() for n in range(3, G.depth, 2)]
    return {"command": "construct", "construction": G.to_json(), "residuals": rows}, rows, EXIT_OK


def load_construction(path: str) -> ConstructionResult:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read construction file {path!r}: {exc}") from exc
    if "construction" in data:
        data = data["construction"]
    try:
        return ConstructionResult.from_json(data)
    except (ConstructionError, KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"bad construction file {path!r}: {exc}") from exc


def _generators(args, default_build: bool = False):
    if args.construction:
        G = load_construction(args.construction)
        if args.prec and args.prec != G.prec:
            G = G.refine(args.prec)
        return G
    prec = args.prec or DEFAULT_PREC
    if args.u is not None and args.v is not None:
        u = ComplexBall.exact_value(*parse_complex(args.u), prec)
        v = ComplexBall.exact_value(*parse_complex(args.v), prec)
        return Generators(u, v)
    if args.u is not None or args.v is not None:
        raise UsageError("--u and --v must be given together")
    if default_build:
        return build_generators(DEFAULT_DEPTH, Fraction(1, 2), prec)
    raise UsageError("give --construction FILE or both --u and --v")


def _sample(G, eps: float, budget: int):
    if eps >= 0.25:
        raise UsageError("--eps must be below 1/4")
    elems = cl.near_unit_elements(G, eps, budget)
    angles = cl.dedupe_angles([RealBall.zero(G.prec)] + [e.psi_angle for e in elems])
    return elems, angles


def cmd_check(args) -> tuple[dict, list[dict], int]:
    G = _generators(args)
    out = {"command": "check", "prec": G.prec}
    try:
        out["density"] = multiplicative_density_check(G.u, G.v, args.M).to_json()
        out["first_type_ratio"] = cl.verdict_to_json(cl.first_type_ratio_test(G.u, G.v, args.ratio_bound))
    except (LatticeError, cl.DegenerateGeneratorsError, IndeterminateError) as exc:
        raise DegenerateInput(str(exc)) from exc
    elems, angles = _sample(G, args.eps, args.budget)
    out["hg_samples"] = {
        "eps": args.eps,
        "budget": args.budget,
        "elements": len(elems),
        "count": len(angles),
        "closest_to_identity": [e.to_json() for e in elems[:5]],
    }
    return out, [{"angle": float(a.mid)} for a in angles], EXIT_OK


def cmd_classify(args) -> tuple[dict, list[dict], int]:
    G = _generators(args)
    elems, angles = _sample(G, args.eps, args.budget)
    verdict = cl.classify_type(angles, args.order_bound, args.tol)
    out = {
        "command": "classify",
        "prec": G.prec,
        "verdict": cl.verdict_to_json(verdict),
        "samples": [float(a.mid) for a in angles],
        "elements": len(elems),
        "eps": args.eps,
        "budget": args.budget,
        "order_bound": args.order_bound,
        "tolerance": args.tol,
    }
    return out, [{"index": i, "angle": float(a.mid), "rad": float(a.rad)} for i, a in enumerate(angles)], EXIT_OK


def cmd_approximate(args) -> tuple[dict, list[dict], int]:
    G = _generators(args, default_build=True)
    prec = G.prec
    try:
        if args.z1 is not None or args.z2 is not None:
            if args.z1 is None or args.z2 is None:
                raise UsageError("--z1 and --z2 must be given together")
            z1 = ComplexBall.exact_value(*parse_complex(args.z1), prec)
            z2 = ComplexBall.exact_value(*parse_complex(args.z2), prec)
            seq = ratio_sequence(G, z1, z2, args.K, args.budget, args.eps, args.delta, threads=args.threads)
            code = EXIT_OK if len(seq.steps) == args.K and all(s.verified for s in seq.steps) else EXIT_BUDGET
            rows = [s.to_json() for s in seq.steps]
            return {"command": "approximate", "mode": "two-orbit", "prec": prec, "K": args.K,
                    "budget": args.budget, "sequence": seq.to_json()}, rows, code
        if args.lam is None:
            raise UsageError("--lambda is required (or --z1/--z2)")
        lam = ComplexBall.exact_value(*parse_complex(args.lam), prec)
        theta = parse_angle(args.theta, prec)
        cert = approximate_lambda(G, lam, theta, args.eps, args.delta, args.budget, threads=args.threads)
    except SolverError as exc:
        raise DegenerateInput(str(exc)) from exc
    ver = verify_certificate(G, cert, lam, theta)
    out = {
        "command": "approximate",
        "mode": "single",
        "prec": prec,
        "lambda": args.lam,
        "theta": args.theta,
        "certificate": cert.to_json(),
        "verification": {"ok": ver.ok, "prec": ver.prec, "err_hi": float(ver.err.upper()),
                         "arg_dev_hi": float(ver.arg_dev.upper()), "diagnostics": ver.diagnostics},
    }
    code = EXIT_OK if ver.ok and not cert.incomplete else EXIT_BUDGET
    row = {"n": str(cert.n), "m": str(cert.m), "err_hi": float(cert.err.upper()),
           "arg_dev_hi": float(cert.arg_dev.upper()), "budget_used": cert.budget_used,
           "incomplete": cert.incomplete, "verified": ver.ok}
    return out, [row], code


COMMANDS = {
    "construct": cmd_construct,
    "check": cmd_check,
    "classify": cmd_classify,
    "approximate": cmd_approximate,
}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _csv_text(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload, rows, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateInput as exc:
        print(f"{parser.prog}: degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    if not args.no_timestamp:
        payload["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    if args.command == "construct" and args.residual_csv:
        _write(args.residual_csv, _csv_text(rows))
    if args.format == "csv":
        _write(args.output, _csv_text(rows))
    else:
        _write(args.output, json.dumps(payload, indent=2) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
