"""Command line entry point: ``qint gen | verify | integrate | stokes | limit``.

Exit codes: 0 all checks pass, 1 an identity failed, 2 usage error,
3 internal inconsistency (confluence/termination failure or a structure
exception).  Output is JSON with sorted keys, so reports are byte-stable
for a fixed seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .coeff import PoleError, HalfPowerError, QScalar, eval_numeric, expand_at_one
from .forms import FormError
from .invint import InvariantError, max_degree
from .ncalg import RewriteError
from .parse import LoweringError, ParseError, parse_poly, parse_scalar
from .soq import StructureError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONSISTENT = 0, 1, 2, 3
TENSORS = ("rhat", "g", "pplus", "pminus", "pzero", "d", "eps")


class UsageError(Exception):
    pass


def _emit(obj, out):
    out.write(json.dumps(obj, sort_keys=True, indent=1))
    out.write("\n")


def _check_n(N):
    if N < 3:
        raise UsageError("N must be >= 3 (for N = 1, 2 the space is undeformed)")
    # the rank of the largest tensor built from N letters grows like N^degree
    if N > 12:
        raise UsageError("N > 12 is outside the supported range")


def _max_degree():
    try:
        return max_degree()
    except ValueError as e:
        raise UsageError(str(e)) from None


# ---------------------------------------------------------------------------
# gen


def _tensor(name, N):
    from .soq import build

    s = build(N)
    simple = {"rhat": s.rhat, "g": s.g_lower, "pplus": s.p_plus, "pminus": s.p_minus,
              "pzero": s.p_zero, "d": s.d_matrix}
    if name in simple:
        return simple[name]
    from .ncalg import rules_for

    rs = rules_for(N)
    if name == "eps":
        from .forms import epsilon

        return epsilon(s, rs).tensor
    if name.startswith("I") and name[1:].isdigit():
        from .invint import invariant_tensor

        n = int(name[1:])
        if n % 2 or n > _max_degree():
            raise UsageError(f"I{n}: rank must be even and at most QINT_MAX_DEGREE={_max_degree()}")
        return invariant_tensor(s, rs, n).tensor
    raise UsageError(f"unknown tensor {name!r}")


def cmd_gen(args, out):
    _check_n(args.n)
    if args.tensor == "all":
        names = list(TENSORS) + ["I2", "I4"]
        _emit({k: _tensor(k, args.n).to_json() for k in names}, out)
    else:
        _emit(_tensor(args.tensor, args.n).to_json(), out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def run_verify(Ns, suites, seed=0, corrupt=False):
    """Run suites over each N; returns (exit code, report)."""
    from .suites import SUITES, is_inconsistency, run_suite

    unknown = [x for x in suites if x not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s): {', '.join(unknown)}")
    report = []
    code = EXIT_OK
    for N in Ns:
        _check_n(N)
        for name in suites:
            checks = run_suite(name, N, corrupt=corrupt, seed=seed)
            failed = [c.name for c in checks if not c.passed]
            report.append({"N": N, "suite": name, "passed": not failed,
                           "failed": failed, "checks": [c.to_json() for c in checks]})
            if any(is_inconsistency(c) for c in checks if not c.passed):
                code = EXIT_INCONSISTENT
            elif failed and code == EXIT_OK:
                code = EXIT_FAIL
    return code, {"seed": seed, "corrupt": corrupt, "exit": code, "results": report}


def cmd_verify(args, out):
    from .suites import SUITES

    suites = list(SUITES) if not args.suite or "all" in args.suite else args.suite
    code, report = run_verify(args.n, suites, seed=args.seed, corrupt=args.corrupt)
    _emit(report, out)
    return code


# ---------------------------------------------------------------------------
# integrate


def _parse_radial(spec):
    """delta:r0 | delta:<rational> | window:k:l -> (functional, profile, r0 value)."""
    from .radial import RadialFunctional, RadialProfile

    parts = spec.split(":")
    if parts[0] == "delta" and len(parts) == 2:
        r0 = None
        if parts[1] != "r0":
            try:
                r0 = Fraction(parts[1])
            except ValueError:
                raise UsageError(f"bad delta base {parts[1]!r}") from None
            if r0 <= 0:
                raise UsageError("the radial base r0 must be positive")
        # indicator of the lattice point r = r0; the symbolic r0 is kept
        return RadialFunctional.jackson_delta(), RadialProfile.lattice({0: 1}), r0
    if parts[0] == "window" and len(parts) == 3:
        try:
            k, l = int(parts[1]), int(parts[2])
        except ValueError:
            raise UsageError(f"bad window {spec!r}") from None
        if k >= l:
            raise UsageError("window:k:l needs k < l")
        return RadialFunctional.finite_window(k, l), RadialProfile.one(), None
    raise UsageError(f"bad --radial {spec!r}; expected delta:r0 or window:k:l")


def _r0_json(val, r0):
    out = {"text": str(val), "r0_poly": val.to_json()}
    if r0 is not None:
        tot = QScalar(0)
        for m, c in val.terms.items():
            tot = tot + c * QScalar(r0**m)
        out["at_r0"] = {"r0": str(r0), "value": tot.to_json(), "text": str(tot)}
    return out


def cmd_integrate(args, out):
    from .forms import integrate_form_over_space
    from .invint import euclid_integrate
    from .ncalg import rules_for
    from .radial import Form
    from .soq import build

    _check_n(args.n)
    s = build(args.n)
    rs = rules_for(args.n)
    F, h, r0 = _parse_radial(args.radial)
    p = parse_poly(args.expr, args.n, s, _max_degree())
    try:
        a = Form.from_poly(p, rs, h)
    except ValueError as e:
        raise UsageError(str(e)) from None
    degs = a.degrees()
    if degs in ([], [0]):
        val = euclid_integrate(a, s, rs, F)
        kind = "function"
    elif degs == [args.n]:
        val = integrate_form_over_space(a, F)
        kind = f"{args.n}-form"
    else:
        raise UsageError(f"can integrate functions or {args.n}-forms, got form degrees {degs}")
    _emit({"N": args.n, "expr": args.expr, "radial": args.radial, "kind": kind,
           "integral": _r0_json(val, r0)}, out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# stokes


def _parse_variant(spec):
    if spec in ("space", "sphere"):
        return spec, None
    parts = spec.split(":")
    if parts[0] == "annulus" and len(parts) == 3:
        try:
            k, l = int(parts[1]), int(parts[2])
        except ValueError:
            raise UsageError(f"bad annulus window {spec!r}") from None
        if k >= l:
            raise UsageError("annulus:k:l needs k < l")
        return "annulus", (k, l)
    raise UsageError(f"bad --variant {spec!r}; expected space, sphere or annulus:k:l")


def cmd_stokes(args, out):
    import random

    from .forms import exterior_d, integrate_annulus, random_form, stokes_annulus, stokes_space, stokes_sphere
    from .ncalg import rules_for

    _check_n(args.n)
    variant, window = _parse_variant(args.variant)
    rs = rules_for(args.n)
    rng = random.Random(args.seed)
    N = args.n
    rows = []
    ok = True
    for k in range(args.samples):
        if variant == "space":
            alpha = random_form(rs, N - 1, rng, tdeg=3)
            res = stokes_space(alpha)
        elif variant == "sphere":
            alpha = random_form(rs, N - 2, rng, tdeg=3, sphere=True)
            res = stokes_sphere(alpha)
        else:
            alpha = random_form(rs, N - 1, rng, tdeg=3, profile="mixed")
            res = stokes_annulus(alpha, *window)
        row = {"sample": k, "passed": res.passed}
        if res.witness:
            row["witness"] = res.witness
        if variant == "annulus":
            row["integral"] = str(integrate_annulus(exterior_d(alpha), *window))
        rows.append(row)
        ok = ok and res.passed
    _emit({"N": N, "variant": args.variant, "seed": args.seed, "passed": ok, "samples": rows}, out)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# limit


def cmd_limit(args, out):
    a = parse_scalar(args.expr)
    res = {"expr": args.expr, "value": a.to_json(), "text": str(a)}
    if args.at is not None:
        try:
            q0 = Fraction(args.at)
        except ValueError:
            raise UsageError(f"bad --at value {args.at!r}") from None
        try:
            v = eval_numeric(a, q0)
        except PoleError:
            res["at"] = {"q0": str(q0), "pole": True}
            _emit(res, out)
            return EXIT_FAIL
        res["at"] = {"q0": str(q0), "value": str(v)}
    else:
        if args.expand < 0:
            raise UsageError("--expand needs k >= 0")
        e = expand_at_one(a, args.expand)
        res["expansion"] = {
            "variable": "q-1",
            "valuation": e.valuation,
            "coeffs": [str(c) for c in e.coeffs],
            "principal": [str(c) for c in e.principal],
        }
    _emit(res, out)
    return EXIT_OK


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="qint", description="Exact q-deformed Euclidean integration toolkit.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="emit a structure tensor as JSON")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--tensor", required=True,
                   help="rhat, g, pplus, pminus, pzero, d, eps, I<n> (e.g. I4) or all")

    v = sub.add_parser("verify", help="run identity suites")
    v.add_argument("--n", type=int, nargs="+", default=[3])
    v.add_argument("--suite", nargs="+", default=None,
                   help="structure rewrite invariants theorem1 theorem2 forms stokes (default: all)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--corrupt", action="store_true", help="inject a single-entry corruption (negative control)")

    i = sub.add_parser("integrate", help="Euclidean integral of an expression")
    i.add_argument("--n", type=int, required=True)
    i.add_argument("--expr", required=True)
    i.add_argument("--radial", default="delta:r0", help="delta:r0, delta:<rational> or window:k:l")

    st = sub.add_parser("stokes", help="Stokes theorem on seeded random forms")
    st.add_argument("--n", type=int, required=True)
    st.add_argument("--variant", required=True, help="space, sphere or annulus:k:l")
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--samples", type=int, default=10)

    lm = sub.add_parser("limit", help="evaluate or expand a scalar near q = 1")
    lm.add_argument("--expr", required=True)
    grp = lm.add_mutually_exclusive_group(required=True)
    grp.add_argument("--at")
    grp.add_argument("--expand", type=int)
    return p


COMMANDS = {"gen": cmd_gen, "verify": cmd_verify, "integrate": cmd_integrate,
            "stokes": cmd_stokes, "limit": cmd_limit}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.cmd](args, out)
    except (UsageError, ParseError, LoweringError, HalfPowerError) as e:
        err.write(f"qint: error: {e}\n")
        return EXIT_USAGE
    except (StructureError, RewriteError, InvariantError, FormError) as e:
        err.write(f"qint: internal inconsistency: {e}\n")
        return EXIT_INCONSISTENT
    except SystemExit as e:  # --help
        return EXIT_OK if not e.code else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
