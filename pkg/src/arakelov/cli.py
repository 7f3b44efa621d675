"""Command-line front end.

Every subcommand prints JSON (or CSV where tabular) on stdout.  Exit codes:
0 success, 2 invalid input or violated precondition, 3 internal invariant
failure.  ``--ledger PATH`` (or $ARAKELOV_LEDGER) selects the constant
ledger; without one the built-in defaults are used and the placeholder
constants a command relies on are listed on stderr.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import fiber as fb
from . import heights, modsym, theta
from .encoding import dumps, frac_str, parse_frac
from .errors import ArakelovError, InternalInvariantError
from .ledger import resolve_ledger


def _frac(s: str) -> Fraction:
    try:
        return parse_frac(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _complex_list(s: str) -> list[complex]:
    try:
        return [complex(x.replace(" ", "")) for x in s.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of complex numbers: {s!r}") from None


def _target(s: str) -> fb.Component:
    if s in ("inf", "zero"):
        return fb.Component(s)
    try:
        n, m = (int(x) for x in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"target must be 'inf', 'zero' or 'n,m', got {s!r}") from None
    return fb.interior(n, m)


def _fiber(args) -> fb.SpecialFiber:
    return fb.build_special_fiber(fb.FiberParams(args.p, args.e, args.f))


def _notice(ledger_path, ledger, used):
    if ledger_path is None:
        ph = [k for k in used if k in ledger.placeholders()]
        if ph:
            print("note: no ledger given, using built-in defaults; placeholder constants used: " + ", ".join(ph), file=sys.stderr)


# subcommands -----------------------------------------------------------------

def cmd_fiber(args, ledger, out):
    F = _fiber(args)
    out.write(dumps({
        "p": F.p,
        "e": F.e,
        "f": F.params.f,
        "s": F.s,
        "g": F.g,
        "eichler_mass": frac_str(F.eichler_mass()),
        "branches": [{"n": b.n, "w": b.w, "interior_length": b.interior_length} for b in F.branches],
        "basis": [c.to_json() for c in F.basis],
    }))


def cmd_phi(args, ledger, out):
    F = _fiber(args)
    solve = fb.closed_form_phi if args.closed_form else fb.solve_vertical_divisor
    out.write(dumps(solve(F, args.target).to_json()))


def cmd_omega(args, ledger, out):
    out.write(dumps(fb.phi_omega(_fiber(args)).to_json()))


def cmd_cusp(args, ledger, out):
    out.write(dumps(fb.cuspidal_divisor_class(_fiber(args)).to_json()))


def cmd_matrix(args, ledger, out):
    out.write(dumps(fb.intersection_matrix(_fiber(args)).to_json()))


def cmd_bound(args, ledger, out):
    trace = heights.assemble_b(args.p, ledger, args.err_mode)
    out.write(dumps(trace.to_json()))


def cmd_bezout(args, ledger, out):
    terms = heights.bezout_terms(args.p, args.dV, args.dW, args.degV, args.degW, args.hV, args.hW, ledger, args.err_mode)
    out.write(dumps({
        "p": args.p,
        "err_mode": args.err_mode,
        "main": terms.main.report(args.p),
        "error": terms.error.report(args.p),
        "bound": terms.total.report(args.p),
    }))


def cmd_winding(args, ledger, out):
    rep = modsym.winding_report(args.p)
    out.write(dumps(rep.to_json()))


def cmd_brumer_scan(args, ledger, out):
    reports = modsym.brumer_scan(args.p_from, args.p_to, jobs=args.jobs, exclude=args.exclude or ())
    fmt = args.out or args.format
    text = modsym.reports_to_csv(reports) if fmt == "csv" else dumps(modsym.reports_to_json(reports))
    if args.write:
        with open(args.write, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)


def cmd_theta(args, ledger, out):
    t = args.tau
    if len(t) == 1:
        tau = [[t[0]]]
    elif len(t) == 4:
        tau = [[t[0], t[1]], [t[2], t[3]]]
    else:
        raise ArakelovError("--tau takes 1 (genus 1) or 4 (genus 2, row-major) entries")
    v = theta.theta_eval(tau, args.z, args.tol)
    out.write(dumps(v.to_json()))


def _ledger_keys(args) -> tuple[str, ...]:
    """Ledger constants a command reads."""
    if args.command not in ("bound", "bezout"):
        return ()
    err = "c_bezout_err3" if args.err_mode == "p3" else "c_bezout_err1"
    if args.command == "bezout":
        return (err,)
    return ("c_MU", "c_mumford", "gamma1", err)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="arakelov", description="Exact Arakelov computations on X0(p).")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--ledger", help="constant ledger file (default: $ARAKELOV_LEDGER or built-ins)")
        sp.set_defaults(func=func)
        return sp

    def fiber_args(sp):
        sp.add_argument("--p", type=int, required=True)
        sp.add_argument("--e", type=int, default=1, help="ramification index e_v")
        sp.add_argument("--f", type=int, default=1, help="residual degree f_v")

    fiber_args(add("fiber", cmd_fiber, "dual graph of the special fibre"))
    sp = add("phi", cmd_phi, "vertical divisor Phi_P for a target component")
    fiber_args(sp)
    sp.add_argument("--target", type=_target, required=True, help="'inf', 'zero' or 'n,m'")
    sp.add_argument("--closed-form", action="store_true", help="use the closed formulas instead of solving")
    fiber_args(add("omega", cmd_omega, "vertical part of the relative dualizing sheaf"))
    fiber_args(add("cusp", cmd_cusp, "Fricke-antisymmetric cuspidal divisor class"))
    fiber_args(add("matrix", cmd_matrix, "intersection matrix of the fibre"))

    sp = add("bound", cmd_bound, "assemble b(p) with a full trace")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--err-mode", choices=heights.ERR_MODES, default="p3")

    sp = add("bezout", cmd_bezout, "arithmetic Bezout bound")
    sp.add_argument("--p", type=int, required=True)
    for k in ("dV", "dW"):
        sp.add_argument(f"--{k}", type=int, required=True)
    for k in ("degV", "degW", "hV", "hW"):
        sp.add_argument(f"--{k}", type=_frac, required=True)
    sp.add_argument("--err-mode", choices=heights.ERR_MODES, default="p3")

    sp = add("winding", cmd_winding, "Atkin-Lehner and winding-quotient dimensions")
    sp.add_argument("--p", type=int, required=True)

    sp = add("brumer-scan", cmd_brumer_scan, "winding reports over a range of primes")
    sp.add_argument("--from", dest="p_from", type=int, required=True)
    sp.add_argument("--to", dest="p_to", type=int, required=True)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out", choices=("json", "csv"), help="same as --format")
    sp.add_argument("--write", metavar="PATH", help="write to PATH instead of stdout")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--exclude", type=int, nargs="*", help="primes to skip")

    sp = add("theta", cmd_theta, "Riemann theta value and analytic norm (genus 1 or 2)")
    sp.add_argument("--tau", type=_complex_list, required=True, help="'1j' or 'a,b,b,d' (row-major)")
    sp.add_argument("--z", type=_complex_list, required=True)
    sp.add_argument("--tol", type=float, default=1e-12)
    return ap


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        ledger, path = resolve_ledger(args.ledger)
        _notice(path, ledger, _ledger_keys(args))
        args.func(args, ledger, out)
    except InternalInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    except (ArakelovError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
