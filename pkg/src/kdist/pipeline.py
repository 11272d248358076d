"""Builders behind `kdist build`/`kdist adeg` and the matching certificate evaluators.

Each builder produces a Certificate whose claims come from the evaluator of
its kind, run on the serialised payload. `verify` runs the same evaluator on
a loaded file, so a freshly written certificate always re-verifies.
"""
from __future__ import annotations

from fractions import Fraction

from mpmath import iv

from kdist.boolfn import make_or, make_thr, parse_spec
from kdist.certificate import Certificate, CertificateError, recompute
from kdist.constructions import (
    FinalBuild, ParamBlock, SymmetricWitness, assemble_gamma, build_gamma, build_omega, build_phi,
    build_psi, build_theta, final_report, gamma_report, omega_report, verify_witness,
)
from kdist.exact import frac, ivq, log2_iv
from kdist.lp.adeg import adeg
from kdist.upperbound import build_approximant
from kdist.verdicts import CERTIFIED, FAILED, ClaimResult, Report, check
from kdist.witness import LevelWitness, PatchedWitness, correlation, error_rates

# ------------------------------------------------------------------ witness claims


def _claims_from_asserts(asserts) -> list:
    out = []
    for a in asserts:
        kind, args = a[0], a[1:]
        if kind == "normalized":
            out.append(("normalized",))
        elif kind == "phd_at_least":
            out.append(("phd_at_least", int(args[0])))
        elif kind == "corr_above":
            out.append(("corr_above", frac(args[0])))
        elif kind == "zero_above":
            out.append(("zero_above", int(args[0])))
        elif kind == "decay_thr":
            out.append(("decay", _thr_decay_bound(*(int(v) for v in args[:3]), frac(args[3])), False))
        elif kind == "thr_rates":
            continue  # handled by the evaluator
        else:
            raise CertificateError(f"unknown assertion {kind!r}")
    return out


def _thr_decay_bound(k: int, T: int, N: int, c2: Fraction):
    scale = iv.sqrt(ivq(4 ** k * k * T) * iv.power(ivq(N), iv.mpf(1) / (2 * k)) * log2_iv(N))
    sigma = (2 * k) ** k
    return lambda t: sigma * iv.exp(-ivq(c2) * t / scale) / (t * t)


def _eval_witness(cert: Certificate) -> Report:
    f = parse_spec(cert.spec) if cert.spec else None
    psi = cert.witnesses.get("psi")
    if psi is None:
        return Report(cert.spec, [])
    rep = verify_witness(psi, f, _claims_from_asserts(cert.asserts))
    for a in cert.asserts:
        if a[0] == "thr_rates":
            k, N = int(a[1]), int(a[2])
            r = error_rates(make_thr(k, N), psi)
            rep.add(check("false-negative mass <= 1/2 - 2/4^k", r.delta_minus, "<=", Fraction(1, 2) - Fraction(2, 4 ** k)))
            bound = 1 / (48 * 4 ** k * iv.sqrt(ivq(N)) * log2_iv(N))
            rep.add(check("false-positive mass <= 1/(48 4^k sqrt(N) log N)", r.delta_plus, "<=", bound, regime=True))
    return rep


def witness_cert(kind: str, f, psi, asserts, params=(), info=()) -> Certificate:
    cert = Certificate(kind, f.spec if f is not None else "", list(params), {"psi": psi} if psi is not None else {},
                       [tuple(str(t) for t in a) for a in asserts], list(info))
    cert.claims = recompute(cert).claims
    return cert


# ------------------------------------------------------------------ adeg

def adeg_certificate(spec: str, eps, max_d: int | None = None, method: str = "auto", jobs: int = 1):
    f = parse_spec(spec)
    eps = frac(eps)
    res = adeg(f, eps, max_d, method)
    info = [f"E d={d} {v}" for d, v in sorted(res.errors.items())]
    info.append(f"adeg {res.degree} eps={eps} method={res.method}")
    params = [("eps", eps, "CONFIG"), ("degree", res.degree, "MEASURED")]
    if res.witness is None:
        return res, witness_cert("adeg", f, None, [], params, info)
    asserts = [("normalized",), ("phd_at_least", res.degree), ("corr_above", eps)]
    return res, witness_cert("adeg", f, res.witness, asserts, params, info)


# ------------------------------------------------------------------ single witnesses

def omega_certificate(k: int, T: int, N: int, ell: int | None = None) -> Certificate:
    om = build_omega(k, T, N, ell)
    params = [("k", k, "CONFIG"), ("T", T, "CONFIG"), ("N", N, "CONFIG"),
              ("ell", om.ell, "CONFIG" if ell is not None else "PAPER"), ("m", om.m, "PAPER")]
    cert = Certificate("omega", "", params, {"omega": LevelWitness(T, om.values)})
    cert.claims = recompute(cert).claims
    return cert


def _eval_omega(cert: Certificate) -> Report:
    k, T, N, ell = (cert.param_int(x) for x in ("k", "T", "N", "ell"))
    fresh = build_omega(k, T, N, ell)
    stored = cert.witnesses["omega"]
    om = SymmetricWitness(k, T, N, fresh.ell, fresh.m, fresh.S, tuple(stored.levels), fresh.raw)
    rep = omega_report(om)
    same = tuple(stored.levels) == fresh.values
    rep.claims.insert(0, ClaimResult("values match the closed form", CERTIFIED if same else FAILED))
    return rep


def psi_certificate(k: int, T: int, N: int, ell: int | None = None, c2=Fraction(1, 21)) -> Certificate:
    om = build_omega(k, T, N, ell)
    psi = build_psi(om, N)
    asserts = [("normalized",), ("phd_at_least", om.vanishing_order()), ("zero_above", T),
               ("decay_thr", k, T, N, frac(c2)), ("thr_rates", k, N)]
    params = [("k", k, "CONFIG"), ("T", T, "CONFIG"), ("N", N, "CONFIG"), ("ell", om.ell, "PAPER")]
    return witness_cert("psi", make_thr(k, N), psi, asserts, params)


def phi_certificate(n: int) -> Certificate:
    asserts = [("normalized",), ("phd_at_least", 1), ("corr_above", Fraction(1, 3))]
    return witness_cert("phi", make_or(n), build_phi(n), asserts, [("n", n, "CONFIG")])


def theta_certificate(n: int, target_phd: int, target_corr=Fraction(3, 5)) -> Certificate:
    theta = build_theta(n, target_phd, target_corr)
    corr = correlation(make_or(n), theta)
    asserts = [("normalized",), ("phd_at_least", target_phd), ("corr_above", Fraction(1, 3))]
    params = [("n", n, "CONFIG"), ("target_phd", target_phd, "CONFIG"), ("target_corr", frac(target_corr), "CONFIG"),
              ("achieved_corr", corr, "MEASURED")]
    return witness_cert("theta", make_or(n), theta, asserts, params)


# ------------------------------------------------------------------ gamma and W

_PARAM_KEYS = ("R", "k", "T", "N", "eta", "n", "M", "c1", "c2", "ell", "theta_phd")


def _param_rows(p: ParamBlock) -> list:
    d = p.as_dict()
    rows = []
    for key in _PARAM_KEYS:
        default = "CONFIG" if key in ("R", "k", "ell", "theta_phd") else "PAPER"
        prov = p.provenance.get(key, default)
        if key == "ell" and d[key] is None:
            prov = "PAPER"
        rows.append((key, d[key], prov))
    rows.append(("sigma", p.sigma, "PAPER"))
    return rows


def _params_from(cert: Certificate) -> ParamBlock:
    g = cert.param_int
    return ParamBlock(g("R"), g("k"), g("T"), g("N"), g("eta"), g("n"), g("M"), None, cert.param("c1"),
                      cert.param("c2"), g("ell"), g("theta_phd"))


def gamma_build(R: int, k: int, **over):
    p = ParamBlock.build(R, k, **over)
    return build_gamma(p)


def gamma_certificate(gb) -> Certificate:
    p = gb.params
    info = list(p.notes) + [f"c_measured ~{float(gb.c_measured.mid.a):.6g}", f"A = {gb.A()}"]
    cert = Certificate("gamma", gb.fn.spec, _param_rows(p),
                       {"theta": gb.theta, "phi": gb.phi, "psi": gb.psi}, [], info)
    cert.claims = recompute(cert).claims
    return cert


def _gamma_from(cert: Certificate):
    p = _params_from(cert)
    w = cert.witnesses
    return assemble_gamma(p, w["theta"], w["phi"], w["psi"], p.theta_phd)


def _eval_gamma(cert: Certificate) -> Report:
    return gamma_report(_gamma_from(cert))


def final_certificate(fb: FinalBuild) -> Certificate:
    gb = fb.gb
    p = gb.params
    cert = Certificate("final-w", gb.promise_fn.spec, _param_rows(p),
                       {"theta": gb.theta, "phi": gb.phi, "psi": gb.psi, "nu_low": fb.nu.low, "W": fb.W}, [],
                       list(p.notes) + [f"nu norm {fb.nu_norm}", f"gap {fb.gap()}"])
    cert.claims = recompute(cert).claims
    return cert


def _eval_final(cert: Certificate) -> Report:
    gb = _gamma_from(cert)
    N = gb.params.N
    nu = PatchedWitness(gb.gamma, N, cert.witnesses["nu_low"])
    fb = FinalBuild(gb, nu, cert.witnesses["W"])
    return final_report(fb)


# ------------------------------------------------------------------ upper bound

def upper_certificate(k: int, N: int, R: int, m: int | None = None, d: int | None = None,
                      emit_poly: bool = False) -> tuple:
    rep = build_approximant(k, N, R, m, d)
    params = [("k", k, "CONFIG"), ("N", N, "CONFIG"), ("R", R, "CONFIG"),
              ("m", rep.m, "CONFIG" if m is not None else "PAPER"), ("d", rep.d, "CONFIG" if d is not None else "PAPER")]
    info = rep.rows() if emit_poly else []
    cert = Certificate("upper", rep.target().spec, params, {}, [], info)
    cert.claims = recompute(cert).claims
    return rep, cert


def upper_report(rep) -> Report:
    out = Report(f"approximant k={rep.k} N={rep.N} R={rep.R} m={rep.m} d={rep.d}")
    out.add(check("outer value 1 on the all-ones block pattern", rep.outer.at_weight(0), "==", 1))
    out.add(check("outer error <= 2/(1 + m^2/R)", rep.outer.measured_error(), "<=", rep.outer.error_bound()))
    out.add(check("outer error on the promise", rep.outer_error, "<=", rep.outer.measured_error()))
    out.add(check("rho: coefficient l1 <= tracked bound", rep.rho_l1, "<=", rep.rho_tracked))
    out.add(check("rho: tracked bound <= 2 3^m (1 + 2k C(N,k))^m", rep.rho_tracked, "<=", rep.rho_chain))
    out.add(check("triangle chain: measured <= outer + rho max conj error", rep.measured_error, "<=", rep.error_bound()))
    out.add(check("chain with the Chebyshev bound", rep.measured_error, "<=", rep.composed_chain_bound()))
    out.add(check("final degree <= d", rep.degree, "<=", rep.d))
    out.add(check("measured error <= 1/3", rep.measured_error, "<=", Fraction(1, 3), regime=True))
    out.data.update(measured=rep.measured_error, degree=rep.degree, rho=rep.rho_l1)
    return out


def _eval_upper(cert: Certificate) -> Report:
    g = cert.param_int
    rep = build_approximant(g("k"), g("N"), g("R"), g("m"), g("d"))
    out = upper_report(rep)
    if cert.info:
        same = cert.info == rep.rows()
        out.add(ClaimResult("stored polynomial matches the rebuild", CERTIFIED if same else FAILED))
    return out


EVALUATORS = {
    "adeg": _eval_witness,
    "witness": _eval_witness,
    "phi": _eval_witness,
    "psi": _eval_witness,
    "theta": _eval_witness,
    "omega": _eval_omega,
    "gamma": _eval_gamma,
    "final-w": _eval_final,
    "upper": _eval_upper,
}
