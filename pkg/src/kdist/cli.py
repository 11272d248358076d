"""kdist command line: adeg, build, verify, reproduce, dump-lp.

Exit codes: 0 all claims pass, 1 verification failure, 2 usage error,
3 resource cap hit.
"""
from __future__ import annotations

import argparse
import csv
import sys
from fractions import Fraction
from pathlib import Path

from kdist import __version__
from kdist.boolfn import SpecError, parse_spec
from kdist.certificate import Certificate, CertificateError, verify
from kdist.exact import CapError, fmt, frac

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

BUILD_KINDS = ("omega", "psi", "phi", "theta", "gamma", "final-w", "upper")

# config keys accepted by `build`, with their parsers
CONFIG_KEYS = {
    "k": int, "t": int, "n": int, "r": int, "m": int, "d": int, "eta": int, "ell": int,
    "outer_arity": int, "phi_arity": int, "theta_phd": int, "arity": int, "phd": int,
    "corr": frac, "c": frac, "c1": frac, "c2": frac,
}


class UsageError(ValueError):
    pass


def read_config(path: str) -> dict:
    """key=value lines; '#' starts a comment; values may be exact rationals."""
    out = {}
    for no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_").lower()
        if not sep or key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{no}: expected key=value with key in {sorted(CONFIG_KEYS)}")
        try:
            out[key] = CONFIG_KEYS[key](value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise UsageError(f"{path}:{no}: bad value for {key}: {e}") from e
    return out


def _write(cert: Certificate, out: str | None, default: str) -> str:
    path = out or default
    if path == "-":
        sys.stdout.write(cert.dumps())
    else:
        cert.save(path)
    return path


def _print_report(cert: Certificate) -> None:
    for line in cert.report.lines():
        print("  " + line)


def _status(ok: bool) -> int:
    return EXIT_OK if ok else EXIT_FAIL


# ------------------------------------------------------------------ adeg

def cmd_adeg(args) -> int:
    from kdist.pipeline import adeg_certificate

    res, cert = adeg_certificate(args.spec, args.eps, args.max_d, args.method)
    print(f"function {cert.spec or args.spec}  method {res.method}")
    print("  d  E(f, d)")
    for d, e in sorted(res.errors.items()):
        print(f"{d:>3}  {fmt(e)}  (~{float(e):.6g})")
    print(f"adeg_{fmt(res.eps)} = {res.degree}")
    if args.emit_poly:
        cert.info += [f"poly {s} {fmt(v)}" for s, v in sorted(res.poly.coeffs.items(), key=lambda t: repr(t[0]))]
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["d", "error", "error_float"])
            for d, e in sorted(res.errors.items()):
                w.writerow([d, fmt(e), float(e)])
    path = _write(cert, args.out, "adeg.cert")
    if path != "-":
        print(f"certificate written to {path}")
    _print_report(cert)
    return _status(cert.ok)


# ------------------------------------------------------------------ build

def _merged(args) -> dict:
    vals = read_config(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            vals[key] = v
    return vals


def _need(vals: dict, kind: str, *keys):
    missing = [k for k in keys if vals.get(k) is None]
    if missing:
        raise UsageError(f"build {kind} needs " + ", ".join("--" + k.replace("_", "-") for k in missing))


def _gamma_overrides(v: dict) -> dict:
    over = {}
    for key, name in (("outer_arity", "n"), ("phi_arity", "M"), ("t", "T"), ("n", "N"), ("eta", "eta"),
                      ("ell", "ell"), ("theta_phd", "theta_phd")):
        if v.get(key) is not None:
            over[name] = v[key]
    for key in ("c", "c1", "c2"):
        if v.get(key) is not None:
            over[key] = v[key]
    return over


def build_certificate(kind: str, v: dict, emit_poly: bool = False) -> Certificate:
    from kdist import pipeline as pl

    if kind == "omega":
        _need(v, kind, "k", "t", "n")
        return pl.omega_certificate(v["k"], v["t"], v["n"], v.get("ell"))
    if kind == "psi":
        _need(v, kind, "k", "t", "n")
        return pl.psi_certificate(v["k"], v["t"], v["n"], v.get("ell"), v.get("c2", Fraction(1, 21)))
    if kind == "phi":
        _need(v, kind, "arity")
        return pl.phi_certificate(v["arity"])
    if kind == "theta":
        _need(v, kind, "arity", "phd")
        return pl.theta_certificate(v["arity"], v["phd"], v.get("corr", Fraction(3, 5)))
    if kind in ("gamma", "final-w"):
        _need(v, kind, "r", "k")
        try:
            gb = pl.gamma_build(v["r"], v["k"], **_gamma_overrides(v))
        except TypeError as e:
            raise UsageError(str(e)) from e
        if kind == "gamma":
            return pl.gamma_certificate(gb)
        from kdist.constructions import build_final
        return pl.final_certificate(build_final(gb, v.get("d")))
    if kind == "upper":
        _need(v, kind, "k", "n", "r")
        _, cert = pl.upper_certificate(v["k"], v["n"], v["r"], v.get("m"), v.get("d"), emit_poly)
        return cert
    raise UsageError(f"unknown build kind {kind!r}")


def cmd_build(args) -> int:
    cert = build_certificate(args.kind, _merged(args), args.emit_poly)
    path = _write(cert, args.out, f"{args.kind}.cert")
    for name, value, prov in cert.params:
        print(f"  param {name} = {value if value is None else fmt(value)} [{prov}]")
    if path != "-":
        print(f"certificate written to {path}")
    _print_report(cert)
    return _status(cert.ok)


# ------------------------------------------------------------------ verify

def cmd_verify(args) -> int:
    cert = Certificate.load(args.certificate)
    res = verify(cert)
    print(f"{cert.kind} certificate, written by {cert.tool}")
    for line in res.fresh.lines():
        print("  " + line)
    if res.mismatches:
        print("verdict mismatches (stored -> recomputed):")
        for name, old, new in res.mismatches:
            print(f"  {name}: {old} -> {new}")
    print("verify: " + ("all verdicts reproduced" if res.ok else "FAILED"))
    return _status(res.ok)


# ------------------------------------------------------------------ reproduce

def cmd_reproduce(args) -> int:
    from kdist.reproduce import format_outcome, run_suite

    outcomes = run_suite(args.suite, args.seed, args.jobs)
    for o in outcomes:
        for line in format_outcome(o, verbose=not args.quiet):
            print(line)
    ok = all(o.passed for o in outcomes)
    print(f"{sum(o.passed for o in outcomes)}/{len(outcomes)} criteria passed")
    return _status(ok)


# ------------------------------------------------------------------ dump-lp

def cmd_dump_lp(args) -> int:
    from kdist.lp.adeg import minimax_lp, system_for, witness_lp
    from kdist.lp.simplex import solve

    f = parse_spec(args.spec)
    if args.form == "witness":
        lp = witness_lp(system_for(f, args.method), args.d)[0]
    else:
        bound = frac(args.outside_bound) if args.outside_bound is not None else None
        lp = minimax_lp(f, args.d, args.basis, bound)
    text = lp.dumps()
    if args.solve:
        text += solve(lp).dumps()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"LP written to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def _fraction_arg(s: str) -> Fraction:
    try:
        return frac(s)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"not an exact rational: {s!r}") from e


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kdist", description="Exact dual witnesses and approximants for k-distinctness.")
    p.add_argument("--version", action="version", version=f"kdist {__version__}")
    p.add_argument("--seed", type=int, default=None, help="seed for randomised checks")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("adeg", help="exact approximate degree by LP, with a dual witness certificate")
    a.add_argument("spec", help='function spec, e.g. "OR:4" or "OR:2 o THR:2:2 <=2"')
    a.add_argument("--eps", type=_fraction_arg, default=Fraction(1, 3))
    a.add_argument("--max-d", type=int, default=None)
    a.add_argument("--method", choices=("auto", "dense", "symmetric", "orbit"), default="auto")
    a.add_argument("--out", help="certificate path ('-' for stdout; default adeg.cert)")
    a.add_argument("--csv", help="also write the degree/error sweep as CSV")
    a.add_argument("--emit-poly", action="store_true", help="record the optimal polynomial in the certificate")
    a.set_defaults(func=cmd_adeg)

    b = sub.add_parser("build", help="build a witness or approximant and certify it")
    b.add_argument("kind", choices=BUILD_KINDS)
    b.add_argument("--config", help="key=value parameter file (flags override it)")
    for key, parser in CONFIG_KEYS.items():
        b.add_argument("--" + key.replace("_", "-"), dest=key, type=parser if parser is int else _fraction_arg,
                       default=None)
    b.add_argument("--out", help="certificate path ('-' for stdout; default <kind>.cert)")
    b.add_argument("--emit-poly", action="store_true", help="dump the full structured polynomial (upper)")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="recompute every claim of a certificate")
    v.add_argument("certificate")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("reproduce", help="run an acceptance suite")
    r.add_argument("suite", choices=("identities", "appendix", "composition", "upperbound", "all"))
    r.add_argument("--quiet", action="store_true", help="only the pass/fail line per criterion")
    r.set_defaults(func=cmd_reproduce)

    d = sub.add_parser("dump-lp", help="print the LP behind E(f, d)")
    d.add_argument("spec")
    d.add_argument("--d", type=int, required=True)
    d.add_argument("--form", choices=("witness", "minimax"), default="witness")
    d.add_argument("--method", choices=("auto", "dense", "symmetric", "orbit"), default="auto")
    d.add_argument("--basis", choices=("auto", "power", "fourier"), default="auto")
    d.add_argument("--outside-bound", help="minimax form only: |p| <= bound off the promise")
    d.add_argument("--solve", action="store_true", help="append the exact solution")
    d.add_argument("--out")
    d.set_defaults(func=cmd_dump_lp)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    if args.seed is None:
        from kdist.reproduce import DEFAULT_SEED
        args.seed = DEFAULT_SEED
    try:
        return args.func(args)
    except CapError as e:
        print(f"kdist: resource cap: {e}", file=sys.stderr)
        return EXIT_CAP
    except (SpecError, UsageError, CertificateError) as e:
        print(f"kdist: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"kdist: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        # invalid parameter combinations surface as ValueError from the builders
        print(f"kdist: invalid parameters: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
