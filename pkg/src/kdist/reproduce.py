"""Desk-scale reproduction suites: one Criterion per acceptance criterion.

Every criterion returns a Report. Exact claims are checked against the
brute-force `reference` module wherever the instance is small enough, so a
bug shared by the engine and its own self-checks still shows up.
"""
from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable

from kdist import reference as ref
from kdist.boolfn import DenseFn, make_dist, make_or, make_thr, point_of
from kdist.constructions import (
    a_bound, amplification_report, build_final, build_omega, build_phi, build_psi, build_theta, best_theta_phd,
    composition_report, gamma_report, omega_report, verify_witness,
)
from kdist.exact import binom, fmt
from kdist.lp.adeg import best_error, solve_system, symmetric_system
from kdist.lp.simplex import verify_certificate
from kdist.pipeline import adeg_certificate, gamma_build, upper_report
from kdist.poly import (
    MultilinearPoly, UnivariatePoly, alternating_binomial_sum, build_p_eta, chebyshev, expand_symmetric,
    level_char_sum,
)
from kdist.upperbound import build_approximant, build_outer, dist_lift
from kdist import orbits as orb
from kdist.verdicts import CERTIFIED, FAILED, ClaimResult, Report, check
from kdist.witness import (
    INFINITE, DenseWitness, LevelWitness, alpha_classify, composed_moments, correlation, dbc, error_rates,
    modified_compose,
)

DEFAULT_SEED = 20240601


# ------------------------------------------------------------------ random instances

def rand_rational(rng: random.Random, lo: int = -6, hi: int = 6) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, 4))


def rand_fn(rng: random.Random, m: int) -> DenseFn:
    return DenseFn(m, tuple(rng.choice((1, -1)) for _ in range(1 << m)))


def rand_dense(rng: random.Random, m: int, balanced: bool = True) -> DenseWitness:
    """Random l1-normalised table; balanced means total 0 (phd >= 1)."""
    while True:
        v = [rand_rational(rng) for _ in range(1 << m)]
        if balanced:
            v[rng.randrange(1 << m)] -= sum(v)
        l1 = sum(abs(a) for a in v)
        if l1:
            return DenseWitness(m, tuple(a / l1 for a in v))


def rand_level(rng: random.Random, m: int, balanced: bool = True) -> LevelWitness:
    while True:
        lv = [rand_rational(rng) for _ in range(m + 1)]
        if balanced:
            lv[rng.randrange(m + 1)] -= sum(lv)  # entries are level masses
        l1 = sum(abs(v) for v in lv)
        if l1:
            return LevelWitness(m, tuple(v / l1 for v in lv))


def rand_witness(rng, m, balanced=True):
    return rand_level(rng, m, balanced) if rng.random() < 0.5 else rand_dense(rng, m, balanced)


def agreeing_fn(rng: random.Random, psi, flip: float) -> DenseFn:
    """f = sgn(psi) with each point flipped independently with probability `flip`."""
    tab = []
    for v in psi.dense_values():
        s = -1 if v < 0 else 1
        tab.append(-s if rng.random() < flip else s)
    return DenseFn(psi.n, tuple(tab))


def _tally(name: str, failures: list, total: int, detail: str = "") -> ClaimResult:
    ok = not failures
    shown = detail if ok else f"first failure: {failures[0]}"
    return ClaimResult(name, CERTIFIED if ok else FAILED, f"{total - len(failures)}/{total} instances", "all", shown)


def _compose_table(outer_fn, n: int, inner_vals: list, m: int) -> list:
    out = []
    for _, x in ref.points(n * m):
        z = tuple(inner_vals[ref.index(b)] for b in ref.split(x, n))
        out.append(outer_fn(z))
    return out


# ------------------------------------------------------------------ criterion 1

def crit_identities(seed: int = DEFAULT_SEED, instances: int = 20) -> Report:
    rng = random.Random(seed)
    rep = Report("exact identities")

    bad = []
    for i in range(instances):
        m = rng.randint(1, 4)
        f, psi = rand_fn(rng, m), rand_witness(rng, m)
        r = error_rates(f, psi)
        rr = ref.rates(psi.dense_values(), ref.table(f, m))
        if not (r.eps_plus == 2 * r.delta_plus == rr["eps_plus"] and r.eps_minus == 2 * r.delta_minus == rr["eps_minus"]
                and rr["eps_plus"] == 2 * rr["delta_plus"] and rr["eps_minus"] == 2 * rr["delta_minus"]):
            bad.append(f"instance {i}: engine {r}, reference {rr}")
    rep.add(_tally("eps = 2 delta for both error kinds", bad, instances))

    bad, i = [], 0
    while i < instances:
        m = rng.randint(1, 3)
        f, psi = rand_fn(rng, m), rand_witness(rng, m)
        vals, fvals = psi.dense_values(), ref.table(f, m)
        if ref.rates(vals, fvals)["eps_minus"] == 1:
            continue  # a- divides by 1 - eps-; the claim needs eps- < 1
        i += 1
        _, stats = alpha_classify(f, psi)
        al = ref.alpha_table(vals, fvals)
        target = 1 - 2 * ref.rates(vals, fvals)["eps_plus"]
        # per block, and for coordinate i of a two-block product distribution
        for z in (1, -1):
            one = sum((2 * abs(v) * a for v, a in zip(vals, al) if v and ref.sign(v) == z), Fraction(0))
            if one != target or stats.expected_alpha(z) != target:
                bad.append(f"instance {i}, z={z}: reference {one}, engine {stats.expected_alpha(z)}, want {target}")
        for z in ((1, -1), (-1, 1), (-1, -1)):
            tot = [Fraction(0), Fraction(0)]
            for x1, v1 in enumerate(vals):
                if not v1 or ref.sign(v1) != z[0]:
                    continue
                for x2, v2 in enumerate(vals):
                    if not v2 or ref.sign(v2) != z[1]:
                        continue
                    p = 4 * abs(v1) * abs(v2)
                    tot[0] += p * al[x1]
                    tot[1] += p * al[x2]
            if tot != [target, target]:
                bad.append(f"instance {i}, z={z}: two-block expectations {tot}, want {target}")
    rep.add(_tally("E_mu_z[alpha(x_i)] = 1 - 2 eps+", bad, instances))

    bad, done = [], 0
    while done < instances:
        n = rng.choice((2, 3))
        m = rng.choice((2, 3))
        eta = rng.choice((0, 2)) if n >= 3 else 0
        zeta, xi = rand_dense(rng, n, balanced=False), rand_witness(rng, m)
        f = agreeing_fn(rng, xi, rng.choice((Fraction(1, 8), Fraction(1, 3))))
        try:
            g = modified_compose(zeta, xi, f, eta)
        except ValueError:
            continue  # outside the claim's hypotheses; draw again
        done += 1
        tbl, P0 = ref.modified(zeta.dense_values(), n, xi.dense_values(), m, ref.table(f, m), eta)
        pointwise = all(g.value(x) * P0 == tbl[idx] for idx, x in ref.points(n * m))
        if not (ref.l1(tbl) == P0 == g.normalizer and g.l1() == 1 and pointwise):
            bad.append(f"n={n} m={m} eta={eta}: reference l1 {ref.l1(tbl)}, normaliser {P0}, engine {g.normalizer}")
    rep.add(_tally("||(zeta*xi)(p_eta o alpha)||_1 = p_eta(1-2eps+, ...)", bad, instances))

    bad = []
    for i in range(instances):
        n, m = rng.choice((1, 2, 3)), rng.choice((2, 3))
        theta, phi = rand_witness(rng, n, balanced=rng.random() < 0.5), rand_witness(rng, m)
        tv, pv = theta.dense_values(), phi.dense_values()
        table = ref.dbc(tv, n, pv, m)
        eng = dbc(theta, phi)
        if ref.l1(table) != 1 or eng.l1() != 1 or eng.dense_values() != table:
            bad.append(f"instance {i}: l1 {ref.l1(table)} / {eng.l1()}")
            continue
        dt, dp, dc = ref.phd(tv, n), ref.phd(pv, m), ref.phd(table, n * m)
        if dt is not None and dp is not None and dc is not None and dc < dt * dp:
            bad.append(f"instance {i}: phd {dc} < {dt} * {dp}")
        n1, n2, n3 = rng.choice(((1, 2, 2), (2, 2, 2), (2, 2, 3), (3, 2, 2), (2, 3, 2), (1, 3, 3)))
        a, b, c = rand_dense(rng, n1, False), rand_dense(rng, n2), rand_dense(rng, n3)
        av, bv, cv = a.dense_values(), b.dense_values(), c.dense_values()
        left = ref.dbc(ref.dbc(av, n1, bv, n2), n1 * n2, cv, n3)
        right = ref.dbc(av, n1, ref.dbc(bv, n2, cv, n3), n2 * n3)
        if left != right:
            bad.append(f"instance {i}: associativity fails for arities {(n1, n2, n3)}")
    rep.add(_tally("dual block composition: l1, phd multiplicativity, associativity", bad, instances))

    bad = []
    for i in range(instances):
        n = rng.randint(1, 6)
        coeffs = {}
        for _ in range(rng.randint(1, 8)):
            S = frozenset(j for j in range(n) if rng.random() < 0.5)
            coeffs[S] = rand_rational(rng)
        p = MultilinearPoly(n, coeffs)
        taus = [Fraction(rng.randint(0, 8), 8) for _ in range(n)]
        lhs = ref.product_expectation(p, taus)
        rhs = p([1 - 2 * t for t in taus])
        if lhs != rhs:
            bad.append(f"instance {i}: {lhs} != {rhs}")
    rep.add(_tally("E_Pi(tau)[p] = p(1 - 2 tau) for multilinear p", bad, instances))

    bad = []
    for i in range(instances):
        N = rng.randint(1, 20)
        deg = rng.randint(0, N - 1)
        q = UnivariatePoly(tuple(rand_rational(rng) for _ in range(deg + 1)))
        vals = [q(t) for t in range(N + 1)]
        # control: a degree-N term contributes (-1)^N N! times its coefficient
        lead = rand_rational(rng, 1, 6)
        top = [v + lead * Fraction(t) ** N for t, v in zip(range(N + 1), vals)]
        if ref.combid(vals) != 0 or alternating_binomial_sum(vals) != 0 or \
                ref.combid(top) != (-1) ** N * factorial(N) * lead:
            bad.append(f"instance {i}: N={N}, deg={deg}")
    rep.add(_tally("sum_i (-1)^i C(N,i) p(i) = 0 for deg p < N (N <= 20)", bad, instances))
    return rep


# ------------------------------------------------------------------ criterion 2

def _fourier_l1_krawtchouk(profile, n: int) -> Fraction:
    total = Fraction(0)
    for s in range(n + 1):
        c = sum((v * level_char_sum(s, t, n) for t, v in enumerate(profile)), Fraction(0)) / (1 << n)
        total += binom(n, s) * abs(c)
    return total


def crit_p_eta(seed: int = DEFAULT_SEED, max_n: int = 12, fourier_n: int = 10) -> Report:
    rep = Report("p_eta properties")
    rows = [(n, eta) for n in range(1, max_n + 1) for eta in range(0, n, 2)]
    bad_top, bad_zero, bad_nonneg, bad_l1, bad_exp = [], [], [], [], []
    worst_l1 = Fraction(0)
    for n, eta in rows:
        p = build_p_eta(eta, n)
        if p.profile[0] != factorial(eta) or ref.p_eta_value(eta, 0) != factorial(eta):
            bad_top.append((n, eta))
        if any(p.profile[w] != 0 for w in range(1, eta + 1)):
            bad_zero.append((n, eta))
        if any(v < 0 for v in p.profile) or any(ref.p_eta_value(eta, w) < 0 for w in range(n + 1)):
            bad_nonneg.append((n, eta))
        if n <= fourier_n:
            l1_a = _fourier_l1_krawtchouk(p.profile, n)
            l1_b = sum((abs(v) for v in ref.fourier(ref.table(p, n), n).values()), Fraction(0))
            l1_c = expand_symmetric(p).l1()
            bound = factorial(eta) * binom(n + eta, eta)
            worst_l1 = max(worst_l1, l1_a / bound)
            if not (l1_a == l1_b == l1_c) or l1_a > bound:
                bad_l1.append(f"n={n} eta={eta}: {l1_a}, {l1_b}, {l1_c} vs {bound}")
            for tau in (Fraction(1, 10), Fraction(1, 4)):
                A = binom(n, eta + 1) * tau ** (eta + 1) / (1 - tau) ** n
                # uniform tau by weight classes; a mixed product with max tau by brute force
                uni = sum((binom(n, t) * tau ** t * (1 - tau) ** (n - t) * abs(v) for t, v in enumerate(p.profile)),
                          Fraction(0))
                taus = [tau if i % 2 == 0 else tau / (i + 1) for i in range(n)]
                mixed = ref.product_expectation(lambda x: abs(p(x)), taus)
                nu1 = Fraction(1)
                for t in taus:
                    nu1 *= 1 - t
                if uni > factorial(eta) * (1 - tau) ** n * (1 + A) or mixed > factorial(eta) * nu1 * (1 + A):
                    bad_exp.append(f"n={n} eta={eta} tau={tau}")
    total, tot_f = len(rows), len([r for r in rows if r[0] <= fourier_n])
    rep.add(_tally("p_eta(1^n) = eta!", bad_top, total))
    rep.add(_tally("p_eta vanishes on weights 1..eta", bad_zero, total))
    rep.add(_tally("p_eta >= 0 on the cube (even eta, n <= 12)", bad_nonneg, total))
    rep.add(_tally("||hat p_eta||_1 <= eta! C(n+eta, eta) (three routes agree, n <= 10)", bad_l1, tot_f,
                   f"largest ratio to the bound {fmt(worst_l1)}"))
    rep.add(_tally("E_nu|p_eta| <= p_eta(1^n) nu(1^n)(1 + A), tau in {1/10, 1/4}", bad_exp, 2 * tot_f))
    return rep


# ------------------------------------------------------------------ criterion 3

OMEGA_INSTANCES = ((2, 4, 16), (2, 9, 64), (3, 9, 64))


def crit_appendix(seed: int = DEFAULT_SEED) -> Report:
    rep = Report("appendix omega properties")
    for k, T, N in OMEGA_INSTANCES:
        sub = omega_report(build_omega(k, T, N))
        for c in sub.claims:
            rep.add(ClaimResult(f"(k={k}, T={T}, N={N}) {c.name}", c.verdict, c.measured, c.bound, c.detail,
                                c.expected))
    return rep


# ------------------------------------------------------------------ criterion 4

def crit_amplification(seed: int = DEFAULT_SEED, instances: int = 20) -> Report:
    rng = random.Random(seed + 4)
    rep = Report("half-half amplification")
    bad_eng, bad_ref = [], []
    for i in range(instances):
        M = 2 if i % 2 == 0 else 3
        m = rng.randint(1, 4) if M == 2 else rng.randint(1, 3)
        psi = rand_witness(rng, m)
        f = agreeing_fn(rng, psi, Fraction(rng.randint(0, 4), 8))
        phi = build_phi(M)
        sub = amplification_report(phi, psi, f)
        if not sub.ok:
            bad_eng.append(f"M={M} m={m}: " + "; ".join(sub.lines()))
        pv = ref.dbc(phi.dense_values(), M, psi.dense_values(), m)
        inner = ref.rates(psi.dense_values(), ref.table(f, m))
        outer = ref.rates(pv, _compose_table(make_or(M), M, ref.table(f, m), m))
        if outer["delta_plus"] > M * inner["delta_plus"] or \
                outer["delta_minus"] > (2 * inner["delta_minus"]) ** M / 2:
            bad_ref.append(f"M={M} m={m}: reference rates {outer} vs {inner}")
    rep.add(_tally("delta+ and delta- amplification (engine)", bad_eng, instances))
    rep.add(_tally("delta+ and delta- amplification (reference enumeration)", bad_ref, instances))
    return rep


# ------------------------------------------------------------------ criterion 5

def composition_instances(seed: int, count: int = 12, max_tries: int = 4000) -> list:
    """(zeta, xi, f, eta) with A < 1, outer arity 2..4, inner 2..3, n m <= 12."""
    rng = random.Random(seed + 5)
    out, tries = [], 0
    shapes = [(n, m) for n in (2, 3, 4) for m in (2, 3) if n * m <= 12]
    while len(out) < count and tries < max_tries:
        tries += 1
        n, m = shapes[len(out) % len(shapes)]
        eta = (0, 2)[len(out) % 2] if n >= 3 else 0
        zeta = rand_witness(rng, n, balanced=False)
        xi = rand_witness(rng, m)
        f = agreeing_fn(rng, xi, Fraction(1, 10))
        try:
            g = modified_compose(zeta, xi, f, eta)
        except ValueError:
            continue
        ep = g.inner_rates.eps_plus
        if ep == 1 or a_bound(n, eta, ep) >= 1:
            continue
        out.append((zeta, xi, f, eta))
    return out


def crit_correlation(seed: int = DEFAULT_SEED, count: int = 12) -> Report:
    rep = Report("correlation pieces of the modified composition")
    cases = composition_instances(seed, count)
    shapes = sorted({(z.n, x.n, e) for z, x, _, e in cases})
    rep.add(check("instances with A < 1", len(cases), ">=", 10, detail=f"(n, m, eta) covered: {shapes}"))
    fails = {"a": [], "b": [], "final": [], "routes": [], "ref": [], "l1": []}
    etas = set()
    for zeta, xi, f, eta in cases:
        etas.add(eta)
        n, m = zeta.n, xi.n
        sub = composition_report(zeta, xi, f, eta)
        tag = f"n={n} m={m} eta={eta}"
        for c in sub.claims:
            key = {"piece (a)": "a", "piece (b)": "b", "final": "final", "two ro": "routes", "||Gamma": "l1"}
            for prefix, k in key.items():
                if c.name.startswith(prefix) and (c.verdict == FAILED or (c.verdict != CERTIFIED and k != "final")):
                    fails[k].append(f"{tag}: {c.measured} {c.bound}")
            if c.name.startswith("final") and c.verdict != CERTIFIED:
                fails["final"].append(f"{tag}: {c.verdict}")
        # reference route: split the unnormalised correlation by the outer sign pattern
        tbl, P0 = ref.modified(zeta.dense_values(), n, xi.dense_values(), m, ref.table(f, m), eta)
        F = _compose_table(make_or(n), n, ref.table(f, m), m)
        xi_vals = xi.dense_values()
        pa = pb = Fraction(0)
        for (idx, x), v, fv in zip(ref.points(n * m), tbl, F):
            if not v:
                continue
            z = [ref.sign(xi_vals[ref.index(b)]) for b in ref.split(x, n)]
            if all(s == 1 for s in z):
                pa += v * fv
            else:
                pb += v * fv
        d = sub.data
        if (pa, pb, P0) != (d["piece_a"], d["piece_b"], d["normalizer"]):
            fails["ref"].append(f"{tag}: reference ({pa}, {pb}, {P0}) vs engine ({d['piece_a']}, {d['piece_b']}, "
                                f"{d['normalizer']})")
    total = len(cases)
    rep.add(_tally("||Gamma||_1 = 1", fails["l1"], total))
    rep.add(_tally("piece (a) lower bound", fails["a"], total))
    rep.add(_tally("piece (b) lower bound", fails["b"], total))
    rep.add(_tally("final correlation lower bound", fails["final"], total))
    rep.add(_tally("block-expectation route = direct correlation", fails["routes"], total))
    rep.add(_tally("pieces match dense reference enumeration", fails["ref"], total))
    rep.add(check("both eta values covered", len(etas), "==", 2))
    return rep


# ------------------------------------------------------------------ criterion 6

ADEG_EPS = Fraction(1, 3)


def adeg_table_text(max_n: int = 8, eps=ADEG_EPS) -> str:
    """Concatenated adeg certificates for OR_1..OR_max_n: the stored ground truth."""
    parts = []
    for n in range(1, max_n + 1):
        _, cert = adeg_certificate(f"OR:{n}", eps)
        parts.append(cert.dumps())
    return "".join(parts)


def adeg_or_table(max_n: int = 8, eps=ADEG_EPS) -> dict:
    """n -> (degree, {d: E(OR_n, d)}) with every LP solve checked for a zero duality gap."""
    out = {}
    for n in range(1, max_n + 1):
        system = symmetric_system(make_or(n))
        errs, deg = {}, None
        for d in range(n + 1):
            be = solve_system(system, d)
            errs[d] = (be.error, be)
            if be.error <= eps:
                deg = d
                break
        out[n] = (deg, errs)
    return out


def crit_adeg(seed: int = DEFAULT_SEED, max_n: int = 8, dense_n: int = 5, frozen: str | None = None) -> Report:
    rep = Report("adeg(OR_n) ground truth")
    table = adeg_or_table(max_n)
    gaps, cert_fail, dual_fail, ref_fail, dense_fail = [], [], [], [], []
    solves = 0
    for n, (deg, errs) in table.items():
        for d, (E, be) in errs.items():
            solves += 1
            lp, sol = be.lp, be.solution
            primal = sum((v * sol.x[j] for j, v in lp.objective.items()), Fraction(0))
            dual = sum((rhs * y for (_, _, rhs), y in zip(lp.rows, sol.duals)), Fraction(0))
            if primal != dual or primal != E:
                gaps.append(f"n={n} d={d}: primal {primal}, dual {dual}")
            if not verify_certificate(lp, sol):
                cert_fail.append(f"n={n} d={d}")
            if be.witness is not None:
                w = be.witness
                r = verify_witness(w, make_or(n), [("normalized",), ("phd_at_least", d + 1), ("corr_above", E)])
                # corr_above is strict; the optimum is attained, so equality is expected
                claims = {c.name: c for c in r.claims}
                if claims["l1 norm"].verdict != CERTIFIED or claims[f"phd >= {d + 1}"].verdict != CERTIFIED \
                        or correlation(make_or(n), w) != E:
                    dual_fail.append(f"n={n} d={d}: " + "; ".join(r.lines()))
                vals = w.dense_values()
                ph = ref.phd(vals, n)
                if ref.l1(vals) != 1 or (ph is not None and ph <= d) or \
                        ref.correlation(vals, ref.table(make_or(n), n)) != E:
                    ref_fail.append(f"n={n} d={d}")
            if n <= dense_n:
                dE = best_error(make_or(n), d, "dense").error
                if dE != E:
                    dense_fail.append(f"n={n} d={d}: dense {dE} vs symmetric {E}")
    degs = {n: deg for n, (deg, _) in table.items()}
    rep.add(ClaimResult("adeg_1/3(OR_n), n = 1..%d" % max_n, CERTIFIED,
                        " ".join(f"{n}:{d}" for n, d in degs.items()), "", "degrees by n"))
    rep.add(_tally("strong duality gap exactly zero", gaps, solves))
    rep.add(_tally("primal/dual pair verified exactly", cert_fail, solves))
    rep.add(_tally("dual witnesses re-verified (l1, phd, correlation)", dual_fail, solves))
    rep.add(_tally("dual witnesses re-verified by reference enumeration", ref_fail, solves))
    rep.add(_tally(f"dense LP agrees with the symmetric LP (n <= {dense_n})", dense_fail,
                   sum(len(e) for n, (_, e) in table.items() if n <= dense_n)))
    first, second = adeg_table_text(max_n), adeg_table_text(max_n)
    rep.add(check("certificate table byte-identical across runs", int(first == second), "==", 1))
    if frozen is not None:
        rep.add(check("certificate table matches the stored table", int(first == frozen), "==", 1))
    rep.data.update(degrees=degs, table_text=first)
    return rep


# ------------------------------------------------------------------ criterion 7

def weak_duality_instances(include_toy: bool = True) -> list:
    """(label, witness, target function) for every constructed witness."""
    out = []
    for M in (2, 3, 4):
        out.append((f"phi M={M}", build_phi(M), make_or(M)))
    om = build_omega(2, 4, 16)
    out.append(("psi_T THR^2_16 T=4", build_psi(om, 16), make_thr(2, 16)))
    for n in (2, 4, 6, 8):
        tp = best_theta_phd(n)
        out.append((f"theta OR_{n} phd={tp}", build_theta(n, tp), make_or(n)))
    builds = [("synthetic", dict(n=2, M=2, N=3, T=3))]
    if include_toy:
        builds.insert(0, ("toy", dict(N=4)))
    for label, over in builds:
        gb = gamma_build(16, 2, **over)
        out.append((f"Gamma {label}", gb.gamma, gb.fn))
        fb = build_final(gb)
        out.append((f"W {label}", fb.W, gb.promise_fn))
    return out


def crit_weak_duality(seed: int = DEFAULT_SEED, include_toy: bool = True) -> Report:
    rep = Report("weak duality against the LP oracle")
    for label, w, f in weak_duality_instances(include_toy):
        corr = correlation(f, w)
        d = w.phd()
        if d == INFINITE or d == 0:
            rep.add(ClaimResult(f"{label}: phd <= adeg at error below {fmt(corr)}", CERTIFIED, f"phd {d}",
                                "", "nothing to compare"))
            continue
        E = best_error(f, d - 1).error
        rep.add(check(f"{label}: E(f, phd - 1) >= correlation", E, ">=", corr, detail=f"phd {d}"))
    return rep


# ------------------------------------------------------------------ criterion 8

GAMMA_TOY = dict(N=4)
GAMMA_SYNTHETIC = dict(n=2, M=2, N=3, T=3)
GAMMA_DENSE = (dict(n=2, M=2, N=3, T=3), dict(n=1, M=3, N=4, T=4))


def crit_gamma(seed: int = DEFAULT_SEED) -> Report:
    rep = Report("Gamma pipeline at toy scale")
    for label, over in (("toy", GAMMA_TOY), ("synthetic", GAMMA_SYNTHETIC)):
        gb = gamma_build(16, 2, **over)
        g = gamma_report(gb)
        for c in g.claims:
            if c.name.startswith("||Gamma||_1") or c.name.startswith("phd(Gamma)"):
                rep.add(ClaimResult(f"{label} {gb.shape}: {c.name}", c.verdict, c.measured, c.bound, c.detail,
                                    c.expected))
        fb = build_final(gb)
        shape = fb.W.shape
        above = [o for o in orb.orbits(shape) if orb.weight(shape, o) > gb.params.N]
        nz = [o for o in above if fb.W.value(orb.representative(shape, o)) != 0]
        rep.add(check(f"{label}: W vanishes on every orbit above N ({len(above)} orbits)", len(nz), "==", 0))
        rep.add(check(f"{label}: ||W||_1 = 1", fb.W.l1(), "==", 1))
        rep.add(check(f"{label}: nu agrees with Gamma above N", fb.nu.high_mass(), "==", gb.gamma.mass_above(gb.params.N)))
    for over in GAMMA_DENSE:
        gb = gamma_build(16, 2, **over)
        G = gb.gamma
        bits = G.n
        vals = [G.value(point_of(i, bits)) for i in range(1 << bits)]
        D = DenseWitness(bits, tuple(vals))
        N = gb.params.N
        targets = ["l1", "total", ("corr", gb.fn), ("mass_above", N)]
        a, b = composed_moments(G, targets), composed_moments(D, targets)
        cm_same = G.category_masses(gb.fn) == D.category_masses(gb.fn)
        phd_same = G.phd() == ref.phd(vals, bits)
        same = a == b and cm_same and phd_same
        rep.add(ClaimResult(f"{gb.shape} ({bits} bits): composed statistics = dense enumeration",
                            CERTIFIED if same else FAILED, f"l1 {fmt(a['l1'])}, corr {fmt(a[('corr', gb.fn.spec)])}",
                            "", f"structured {a} vs dense {b}" if not same else f"phd {G.phd()}"))
        fb = build_final(gb)
        wv = [fb.W.value(point_of(i, bits)) for i in range(1 << bits)]
        above = ref.mass_above(wv, bits, N)
        rep.add(check(f"{gb.shape}: W mass above N by exhaustive enumeration", above, "==", 0))
        rep.add(check(f"{gb.shape}: ||W||_1 by enumeration", ref.l1(wv), "==", 1))
    return rep


# ------------------------------------------------------------------ criterion 9

UPPER_INSTANCES = ((2, 4, 2), (2, 4, 4))
LIFT_INSTANCE = (2, 3, 2)


def crit_upper(seed: int = DEFAULT_SEED) -> Report:
    rep = Report("upper-bound pipeline")
    for k, N, R in UPPER_INSTANCES:
        a = build_approximant(k, N, R)
        sub = upper_report(a)
        for c in sub.claims:
            name = f"(k={k}, N={N}, R={R}, m={a.m}, d={a.d}) {c.name}"
            expected = CERTIFIED if c.name.startswith("measured error <= 1/3") else c.expected
            rep.add(ClaimResult(name, c.verdict, c.measured, c.bound, c.detail, expected))
    k, N, R = LIFT_INSTANCE
    base = build_approximant(k, N, R)
    lift = dist_lift(base)
    dist = make_dist(k, N, R)
    target = base.target()
    bad_sem, bad_err = [], []
    for idx in range(1 << lift.arity):
        x = point_of(idx, lift.arity)
        y = lift.substitute(x)
        if target(y) != dist(x) or sum(1 for v in y if v == -1) > N:
            bad_sem.append(f"x={x}")
        if abs(lift(x) - dist(x)) > base.measured_error:
            bad_err.append(f"x={x}")
    total = 1 << lift.arity
    rep.add(_tally(f"DIST^{k}_{{{N},{R}}}: substituted input lands in the promise and OR o THR reproduces DIST",
                   bad_sem, total))
    rep.add(_tally("lifted error <= base error pointwise", bad_err, total,
                   f"lifted max error {fmt(lift.measured_error())}"))
    rep.add(check("lifted error <= 1/3", lift.measured_error(), "<=", Fraction(1, 3)))
    return rep


# ------------------------------------------------------------------ criterion 10

def _cheb_recurrence(d: int, x: Fraction) -> Fraction:
    a, b = Fraction(1), x
    if d == 0:
        return a
    for _ in range(d - 1):
        a, b = b, 2 * x * b - a
    return b


def crit_chebyshev(seed: int = DEFAULT_SEED, max_d: int = 25) -> Report:
    rng = random.Random(seed + 10)
    rep = Report("Chebyshev facts")
    samples = [Fraction(rng.randint(-64, 64), 64) for _ in range(12)] + [Fraction(-1), Fraction(0), Fraction(1)]
    bad_rec, bad_l1, bad_in, bad_out, bad_comp = [], [], [], [], []
    for d in range(max_d + 1):
        T = chebyshev(d)
        if any(T(x) != _cheb_recurrence(d, x) for x in samples + [Fraction(5, 4), Fraction(-3, 2)]):
            bad_rec.append(d)
        if T.coeff_l1() > 3 ** d:
            bad_l1.append(d)
        if any(abs(T(x)) > 1 for x in samples):
            bad_in.append(d)
        for eps in (Fraction(0), Fraction(1, 100), Fraction(1, 7), Fraction(1, 2), Fraction(3)):
            if T(1 + eps) < 1 + d * d * eps:
                bad_out.append((d, eps))
    for a in range(1, 6):
        for b in range(1, 6):
            Ta, Tb = chebyshev(a), chebyshev(b)
            comp = UnivariatePoly((0,))
            for c in reversed(Ta.coeffs):
                comp = comp * Tb + UnivariatePoly((c,))
            if comp != chebyshev(a * b):
                bad_comp.append((a, b))
    rep.add(_tally("T_d from the recurrence (d <= 25)", bad_rec, max_d + 1))
    rep.add(_tally("T_a(T_b(x)) = T_ab(x) as polynomials (a, b <= 5)", bad_comp, 25))
    rep.add(_tally("coefficient l1 <= 3^d (d <= 25)", bad_l1, max_d + 1))
    rep.add(_tally("|T_d(x)| <= 1 on [-1, 1] samples", bad_in, max_d + 1))
    rep.add(_tally("T_d(1 + eps) >= 1 + d^2 eps", bad_out, 5 * (max_d + 1)))
    bad_one, bad_err, cases = [], [], 0
    for R in range(1, 5):
        for m in range(1, 9):
            cases += 1
            outer = build_outer(m, R)
            T = chebyshev(m)
            worst = Fraction(0)
            for _, x in ref.points(R):
                s = sum(x)
                val = 2 * T(Fraction(s, R) + Fraction(1, R)) / T(1 + Fraction(1, R)) - 1
                want = 1 if all(v == 1 for v in x) else -1
                if all(v == 1 for v in x) and val != 1:
                    bad_one.append((R, m))
                worst = max(worst, abs(val - want))
            if worst > outer.error_bound() or worst != outer.measured_error():
                bad_err.append(f"R={R} m={m}: {worst} vs {outer.error_bound()}")
    rep.add(_tally("OR approximant equals 1 at |x| = 0 (R <= 4)", bad_one, cases))
    rep.add(_tally("OR approximant error <= 2/(1 + m^2/R), measured exactly (R <= 4)", bad_err, cases))
    return rep


# ------------------------------------------------------------------ registry

@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    suite: str
    run: Callable[..., Report]
    budget: float  # seconds
    anchor: str = ""


CRITERIA = (
    Criterion(1, "exact identities", "identities", crit_identities, 60, "epsilon/delta, alpha, l1, dbc, combid"),
    Criterion(2, "p_eta suite", "identities", crit_p_eta, 600, "p_eta properties"),
    Criterion(3, "appendix omega suite", "appendix", crit_appendix, 60, "omega construction"),
    Criterion(4, "composition amplification", "composition", crit_amplification, 600, "half-half amplification"),
    Criterion(5, "correlation machinery", "composition", crit_correlation, 600, "pieces (a), (b), final"),
    Criterion(6, "LP oracle ground truth", "identities", crit_adeg, 300, "adeg(OR_n)"),
    Criterion(7, "weak-duality cross-check", "composition", crit_weak_duality, 600, "dual witnesses vs LP"),
    Criterion(8, "Gamma pipeline at toy scale", "composition", crit_gamma, 600, "Gamma, nu, W"),
    Criterion(9, "upper-bound pipeline", "upperbound", crit_upper, 600, "Chebyshev-of-conjunctions approximant"),
    Criterion(10, "Chebyshev suite", "upperbound", crit_chebyshev, 600, "Chebyshev facts"),
)

SUITES = ("identities", "appendix", "composition", "upperbound", "all")


def strict_ok(rep: Report) -> bool:
    """No FAILED claim, and every claim expected CERTIFIED actually is."""
    return all(c.ok and (c.verdict == CERTIFIED or c.expected != CERTIFIED) for c in rep.claims)


@dataclass
class Outcome:
    criterion: Criterion
    report: Report
    seconds: float

    @property
    def within_budget(self) -> bool:
        return self.seconds <= self.criterion.budget

    @property
    def passed(self) -> bool:
        return strict_ok(self.report) and self.within_budget

    def line(self) -> str:
        c = self.criterion
        return (f"criterion {c.number:>2} {'PASS' if self.passed else 'FAIL'}  {c.title} "
                f"({self.seconds:.1f}s, budget {c.budget:.0f}s)")


def run_criterion(c: Criterion, seed: int = DEFAULT_SEED, **kw) -> Outcome:
    t0 = time.perf_counter()
    rep = c.run(seed=seed, **kw)
    return Outcome(c, rep, time.perf_counter() - t0)


def _run_number(args) -> Outcome:
    number, seed = args
    return run_criterion(CRITERIA[number - 1], seed)


def run_suite(suite: str, seed: int = DEFAULT_SEED, jobs: int = 1) -> list[Outcome]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    chosen = [c for c in CRITERIA if suite == "all" or c.suite == suite]
    if jobs > 1 and len(chosen) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_run_number, [(c.number, seed) for c in chosen]))
    return [run_criterion(c, seed) for c in chosen]


def format_outcome(o: Outcome, verbose: bool = True) -> list[str]:
    lines = [o.line()]
    if verbose or not o.passed:
        lines += ["    " + ln for ln in o.report.lines()]
    return lines
