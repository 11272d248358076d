"""Explicit witness factory: the threshold witness omega/psi, the half-half
witness phi, an LP-derived OR witness theta, the composed witness Gamma, its
mass correction nu and the final witness W.

Logarithms written `log` in the parameter formulas are base 2; `ln` is natural.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

from mpmath import iv

from kdist import orbits as orb
from kdist.boolfn import BoolFn, compose, make_or, make_thr, restrict_weight
from kdist.exact import binom, fmt, frac, iv_ceil, iv_floor, ivq, log2_iv
from kdist.lp.adeg import best_error
from kdist.lp.rs import RSResult, rs_lp
from kdist.poly import p_eta_l1_bound
from kdist.verdicts import CERTIFIED, FAILED, REGIME_ONLY, ClaimResult, Report, check
from kdist.witness import (
    INFINITE, PatchedWitness, ComposedWitness, ErrorRates, LevelWitness, OrbitWitness, Witness, correlation, dbc,
    error_rates, modified_compose, orbit_masses,
)

log = logging.getLogger(__name__)


# ------------------------------------------------------------------ omega

@dataclass(frozen=True)
class SymmetricWitness:
    """Level profile omega(0..T) of the threshold witness, normalised to l1 = 1."""

    k: int
    T: int
    N: int
    ell: int
    m: int
    S: tuple
    values: tuple
    raw: tuple  # before normalisation

    @property
    def support(self) -> tuple:
        return tuple(t for t, v in enumerate(self.values) if v != 0)

    def l1(self) -> Fraction:
        return sum((abs(v) for v in self.values), Fraction(0))

    def moment(self, j: int) -> Fraction:
        return sum((v * t ** j for t, v in enumerate(self.values)), Fraction(0))

    def vanishing_order(self) -> int:
        """Least j with a nonzero power moment (the univariate pure high degree)."""
        j = 0
        while j <= self.T and self.moment(j) == 0:
            j += 1
        return j

    def false_positive_mass(self) -> Fraction:
        return sum((abs(v) for t, v in enumerate(self.values) if v > 0 and t >= self.k), Fraction(0))

    def false_negative_mass(self) -> Fraction:
        return sum((abs(v) for t, v in enumerate(self.values) if v < 0 and t < self.k), Fraction(0))


def default_ell(k: int, N: int) -> int:
    """100 k ceil(N^(1/(2k)) 4^k log N)."""
    inner = iv.power(ivq(N), iv.mpf(1) / (2 * k)) * 4 ** k * log2_iv(N)
    return 100 * k * iv_ceil(inner)


def build_omega(k: int, T: int, N: int, ell: int | None = None) -> SymmetricWitness:
    if k < 2 or k > T:
        raise ValueError(f"need 2 <= k <= T, got k={k}, T={T}")
    if T > N:
        raise ValueError(f"need T <= N, got T={T}, N={N}")
    ell = default_ell(k, N) if ell is None else ell
    if ell < 1:
        raise ValueError("ell must be positive")
    m = isqrt(T // ell) if ell <= T else 0
    while ell * (m + 1) ** 2 <= T:  # isqrt of the floor can undershoot
        m += 1
    S = sorted(set(range(1, k + 1)) | {ell * i * i for i in range(m + 1)})
    outside = [r for r in range(T + 1) if r not in S]
    fact_T = 1
    for i in range(2, T + 1):
        fact_T *= i
    raw = []
    for t in range(T + 1):
        prod = 1
        for r in outside:
            prod *= t - r
        raw.append(Fraction((-1) ** ((T - t - m + 1) % 2) * binom(T, t) * prod, fact_T))
    l1 = sum(abs(v) for v in raw)
    vals = tuple(v / l1 for v in raw)
    return SymmetricWitness(k, T, N, ell, m, tuple(S), vals, tuple(raw))


def build_psi(omega: SymmetricWitness, N: int | None = None) -> LevelWitness:
    """psi_T(x) = omega(|x|) / C(N, |x|) on weights <= T, zero above."""
    N = omega.N if N is None else N
    if omega.T > N:
        raise ValueError(f"T={omega.T} exceeds N={N}")
    return LevelWitness(N, omega.values + (Fraction(0),) * (N - omega.T))


def build_phi(n: int) -> LevelWitness:
    """+1/2 on the all-(+1) input, -1/2 on the all-(-1) input."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return LevelWitness(1, (Fraction(1, 2), Fraction(-1, 2)))
    return LevelWitness(n, (Fraction(1, 2),) + (Fraction(0),) * (n - 1) + (Fraction(-1, 2),))


def build_theta(n: int, target_phd: int, target_corr=None) -> LevelWitness:
    """Symmetric witness for OR_n with phd >= target_phd and maximal correlation."""
    if target_phd > n:
        raise ValueError(f"no nonzero witness on {n} bits has phd {target_phd}")
    if target_phd < 0:
        raise ValueError("target phd must be non-negative")
    f = make_or(n)
    if target_phd == 0:
        # no moment constraint: the normalised function itself
        return LevelWitness(n, tuple(Fraction(f.values[t] * binom(n, t), 1 << n) for t in range(n + 1)))
    res = best_error(f, target_phd - 1, method="symmetric")
    if res.witness is None:
        raise ValueError(f"OR_{n} has no witness of phd {target_phd}")
    if target_corr is not None and res.error < frac(target_corr):
        log.warning("theta for OR_%d at phd %d reaches correlation %s < %s", n, target_phd, res.error, target_corr)
    return res.witness


def best_theta_phd(n: int, min_corr=Fraction(3, 5)) -> int:
    """Largest phd an OR_n witness can have while keeping correlation >= min_corr."""
    best = 0
    for d in range(n):
        if best_error(make_or(n), d, method="symmetric").error >= min_corr:
            best = d + 1
        else:
            break
    return best


# ------------------------------------------------------------------ params

@dataclass
class ParamBlock:
    """Parameters of the composed construction.

    R, k drive the formulas: T = floor(sqrt R), sigma = (2k)^k,
    N = ceil(20 sqrt(sigma) R), eta = (c/2) sqrt(R/4^k) - 1 rounded down to
    an even number. Overrides (outer arity, phi arity M, N, T, eta, ell) give
    desk-scale toys; every adjustment is recorded in notes.
    """

    R: int
    k: int
    T: int
    N: int
    eta: int
    n_outer: int
    M: int
    c: Fraction | None = None  # None: derived from the LP-built theta
    c1: Fraction = Fraction(1, 10)
    c2: Fraction = Fraction(1, 21)
    ell: int | None = None
    theta_phd: int | None = None
    notes: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    @property
    def sigma(self) -> int:
        return (2 * self.k) ** self.k

    def beta(self):
        return ivq(self.c2) / iv.sqrt(ivq(4 ** self.k * self.k * self.T) * iv.power(ivq(self.N), iv.mpf(1) / (2 * self.k))
                                      * log2_iv(self.N))

    def Delta(self):
        return self.beta() * iv.sqrt(ivq(self.sigma)) * self.R / (4 * iv.log(ivq(self.R)) ** 2)

    @classmethod
    def build(cls, R: int, k: int, c=None, c1=Fraction(1, 10), c2=Fraction(1, 21), **over) -> "ParamBlock":
        if k < 2:
            raise ValueError("k must be >= 2")
        notes, prov = [], {}
        n_outer = over.pop("n", None)
        if n_outer is None:
            if R % (4 ** k):
                raise ValueError(f"4^k = {4 ** k} must divide R = {R}")
            n_outer = R // 4 ** k
            prov["n"] = "PAPER"
        else:
            prov["n"] = "CONFIG"
        M = over.pop("M", None)
        prov["M"] = "CONFIG" if M is not None else "PAPER"
        M = 4 ** k if M is None else M
        sigma = (2 * k) ** k
        T = over.pop("T", None)
        prov["T"] = "CONFIG" if T is not None else "PAPER"
        T = isqrt(R) if T is None else T
        N = over.pop("N", None)
        prov["N"] = "CONFIG" if N is not None else "PAPER"
        N = iv_ceil(20 * iv.sqrt(ivq(sigma)) * R) if N is None else N
        eta = over.pop("eta", None)
        ell = over.pop("ell", None)
        theta_phd = over.pop("theta_phd", None)
        if over:
            raise ValueError(f"unknown overrides {sorted(over)}")
        p = cls(R, k, T, N, 0, n_outer, M, None if c is None else frac(c), frac(c1), frac(c2), ell, theta_phd, notes, prov)
        if eta is not None:
            prov["eta"] = "CONFIG"
            p.eta = p._even_eta(eta)
        return p

    def _even_eta(self, eta: int) -> int:
        if eta % 2:
            self.notes.append(f"eta {eta} rounded down to {eta - 1} (must be even)")
            eta -= 1
        eta = max(eta, 0)
        if eta >= self.n_outer:
            top = self.n_outer - 1
            top -= top % 2
            self.notes.append(f"eta {eta} lowered to {top} (must be below the outer arity {self.n_outer})")
            eta = top
        return eta

    def eta_from_c(self, c) -> int:
        raw = iv_floor(ivq(c) / 2 * iv.sqrt(ivq(Fraction(self.R, 4 ** self.k)))) - 1
        return self._even_eta(raw)

    def as_dict(self) -> dict:
        return {"R": self.R, "k": self.k, "T": self.T, "N": self.N, "eta": self.eta, "n": self.n_outer,
                "M": self.M, "c1": self.c1, "c2": self.c2, "ell": self.ell, "theta_phd": self.theta_phd,
                "c": self.c}


# ------------------------------------------------------------------ gamma

@dataclass
class GammaBuild:
    params: ParamBlock
    omega: SymmetricWitness | None
    psi: Witness
    phi: Witness
    theta: LevelWitness
    xi: ComposedWitness
    inner_fn: BoolFn  # OR_M o THR^k_N
    fn: BoolFn  # OR_n o inner_fn (no promise)
    promise_fn: BoolFn  # fn restricted to weight <= N
    gamma: ComposedWitness
    theta_phd: int
    c_measured: object  # interval, phd(theta)/sqrt(n)

    @property
    def shape(self) -> tuple:
        return (self.params.n_outer, self.params.M, self.params.N)

    @property
    def rates(self) -> ErrorRates:
        return self.gamma.inner_rates

    @property
    def normalizer(self) -> Fraction:
        return self.gamma.normalizer

    def A(self) -> Fraction:
        n, eta, ep = self.params.n_outer, self.params.eta, self.rates.eps_plus
        return binom(n, eta + 1) * ep ** (eta + 1) / (1 - ep) ** n


def build_gamma(p: ParamBlock) -> GammaBuild:
    n = p.n_outer
    if p.theta_phd is not None:
        tphd = p.theta_phd
        p.provenance["theta_phd"] = "CONFIG"
    else:
        tphd = best_theta_phd(n)
        p.provenance["theta_phd"] = "MEASURED"
    theta = build_theta(n, tphd, Fraction(3, 5))
    if "eta" not in p.provenance:
        if p.c is None:
            # with c = phd/sqrt(n) the formula reduces to phd/2 - 1
            p.eta = p._even_eta(tphd // 2 - 1 if tphd >= 2 else 0)
            p.provenance["eta"] = "MEASURED"
        else:
            p.eta = p.eta_from_c(p.c)
            p.provenance["eta"] = "PAPER"
    omega = build_omega(p.k, p.T, p.N, p.ell)
    gb = assemble_gamma(p, theta, build_phi(p.M), build_psi(omega, p.N), tphd)
    gb.omega = omega
    return gb


def assemble_gamma(p: ParamBlock, theta: LevelWitness, phi: Witness, psi: Witness, theta_phd: int | None = None
                   ) -> GammaBuild:
    """Gamma from its three component witnesses (also used to re-verify certificates)."""
    xi = dbc(phi, psi)
    inner_fn = compose(make_or(p.M), make_thr(p.k, p.N))
    fn = compose(make_or(p.n_outer), inner_fn)
    gamma = modified_compose(theta, xi, inner_fn, p.eta)
    tphd = theta.phd() if theta_phd is None else theta_phd
    c_meas = ivq(tphd) / iv.sqrt(ivq(p.n_outer))
    return GammaBuild(p, None, psi, phi, theta, xi, inner_fn, fn, restrict_weight(fn, p.N), gamma, tphd, c_meas)


def rs_correct(gamma: Witness, N: int, D: int | None = None) -> RSResult:
    """nu equal to gamma above weight N, phd(nu) > D, l1 minimal (default D = phd(gamma) - 1)."""
    if D is None:
        d = gamma.phd()
        D = (gamma.n if d == INFINITE else d) - 1
    if gamma.mass_above(N) == 0:
        D = max(D, 0)
    return rs_lp(gamma, N, D)


def build_final_W(gamma: Witness, nu) -> OrbitWitness:
    """W = (gamma - nu) / ||gamma - nu||_1, carried on the orbits of weight <= N."""
    low = orbit_masses(gamma, nu.low.shape, nu.N)
    diff = {}
    for o in set(low.masses) | set(nu.low.masses):
        v = low.masses.get(o, Fraction(0)) - nu.low.masses.get(o, Fraction(0))
        if v:
            diff[o] = v
    norm = sum((abs(v) for v in diff.values()), Fraction(0))
    if norm == 0:
        raise ValueError("gamma equals nu: W is undefined")
    return OrbitWitness(nu.low.shape, {o: v / norm for o, v in diff.items()})


# ------------------------------------------------------------------ verification

def verify_witness(psi: Witness, f: BoolFn | None, claims) -> Report:
    """Claims: ('normalized',), ('phd_at_least', d), ('corr_above', eps),
    ('zero_above', j), ('decay', bound_fn) with bound_fn(t) an upper bound on level mass t."""
    rep = Report(getattr(f, "spec", "") or psi.tag)
    for cl in claims:
        kind = cl[0]
        if kind == "normalized":
            rep.add(check("l1 norm", psi.l1(), "==", Fraction(1)))
        elif kind == "phd_at_least":
            d = cl[1]
            bad = psi.first_nonzero_moment(d)
            if bad is None:
                rep.add(ClaimResult(f"phd >= {d}", CERTIFIED, "all moments below vanish", f">= {d}"))
            else:
                sig, v = bad
                T = psi.signature_set(sig)
                rep.add(ClaimResult(f"phd >= {d}", FAILED, f"<psi, chi_{list(T)}> = {v}", f">= {d}",
                                    f"violating monomial of degree {len(T)}"))
        elif kind == "corr_above":
            rep.add(check(f"correlation > {cl[1]}", correlation(f, psi), ">", frac(cl[1])))
        elif kind == "zero_above":
            rep.add(check(f"zero mass above weight {cl[1]}", psi.mass_above(cl[1]), "==", Fraction(0)))
        elif kind == "decay":
            bound_fn, regime = cl[1], (cl[2] if len(cl) > 2 else True)
            levels = _level_masses(psi)
            worst = None
            for t, mass in enumerate(levels):
                if t == 0 or mass == 0:
                    continue
                r = check(f"decay at level {t}", mass, "<=", bound_fn(t), regime)
                if r.verdict != CERTIFIED:
                    worst = r
                    break
            rep.add(worst or ClaimResult("decay profile", CERTIFIED, "all levels within bound"))
        else:
            raise ValueError(f"unknown claim {kind!r}")
    return rep


def _level_masses(psi: Witness) -> list:
    if isinstance(psi, LevelWitness):
        return [abs(v) for v in psi.levels]
    out = [Fraction(0)] * (psi.n + 1)
    if isinstance(psi, OrbitWitness):
        for o, v in psi.masses.items():
            out[orb.weight(psi.shape, o)] += abs(v)
        return out
    for i, v in enumerate(psi.dense_values()):
        out[bin(i).count("1")] += abs(v)
    return out


def omega_report(om: SymmetricWitness, c1=Fraction(1, 10), c2=Fraction(1, 21)) -> Report:
    """The appendix properties of omega.

    The tail estimates need ell at least the default formula; with a smaller
    override those claims can only be REGIME-ONLY.
    """
    rep = Report(f"omega k={om.k} T={om.T} N={om.N} ell={om.ell}")
    hyp = om.ell >= default_ell(om.k, om.N)
    note = "" if hyp else "ell below the appendix choice"
    rep.add(ClaimResult("support = S", CERTIFIED if om.support == tuple(s for s in om.S if s <= om.T) else FAILED,
                        str(list(om.support)), f"== {list(om.S)}"))
    raw_ok = all(abs(om.raw[t]) == _inverse_gaps(om.S, t) for t in om.S if t <= om.T)
    rep.add(ClaimResult("|omega(t)| = prod 1/|t - r| on S before normalisation", CERTIFIED if raw_ok else FAILED))
    rep.add(check("omega(k) < 0", om.values[om.k], "<", 0))
    rep.add(check("l1 norm", om.l1(), "==", 1))
    order = om.vanishing_order()
    rep.add(check("moments vanish below |S| - 1", order, ">=", len(om.S) - 1))
    head = max(abs(om.values[t]) / abs(om.values[om.k]) / binom(om.k, t) for t in range(om.k + 1))
    rep.add(check("head bound |omega(t)|/|omega(k)| <= C(k,t)", head, "<=", 1))
    logN = log2_iv(om.N)
    bound_pos = 1 / (48 * 4 ** om.k * iv.sqrt(ivq(om.N)) * logN)
    rep.add(check("false-positive mass bound", om.false_positive_mass(), "<=", bound_pos, regime=not hyp,
                  detail=note))
    rep.add(check("false-negative mass bound", om.false_negative_mass(), "<=", Fraction(1, 2) - Fraction(2, 4 ** om.k)))
    ratio = om.l1() / abs(om.values[om.k])
    rep.add(check("mass on k: ||omega||/|omega(k)| < 4^k/2", ratio, "<", Fraction(4 ** om.k, 2), regime=not hyp,
                  detail=note))
    scale = iv.sqrt(ivq(4 ** om.k * om.k * om.T) * iv.power(ivq(om.N), iv.mpf(1) / (2 * om.k)) * logN)
    rep.add(check("vanishing order >= c1 sqrt(T / (4^k k N^(1/2k) log N))", order, ">=",
                  ivq(c1) * om.T / scale, regime=not hyp, detail=note))
    sigma = (2 * om.k) ** om.k
    worst = None
    for t in range(1, om.T + 1):
        if om.values[t] == 0:
            continue
        r = check(f"decay at t={t}", abs(om.values[t]), "<=", sigma * iv.exp(-ivq(c2) * t / scale) / (t * t),
                  regime=not hyp, detail=note)
        if r.verdict != CERTIFIED:
            worst = r
            break
    rep.add(worst or ClaimResult("decay |omega(t)| <= (2k)^k exp(-c2 t/...)/t^2", CERTIFIED, "all t"))
    return rep


def _inverse_gaps(S, t) -> Fraction:
    out = Fraction(1)
    for r in S:
        if r != t:
            out /= abs(t - r)
    return out


def gamma_report(gb: GammaBuild, phd_scan: int | None = None) -> Report:
    """Exact identities and regime bounds for a built Gamma."""
    g = gb.gamma
    p = gb.params
    rep = Report(f"gamma R={p.R} k={p.k} n={p.n_outer} M={p.M} N={p.N} eta={p.eta}")
    rep.add(check("||Gamma||_1 = 1", g.l1(), "==", 1))
    r = gb.rates
    rep.add(check("normaliser p_eta(1-2eps+) > 1", gb.normalizer, ">", 1, regime=True))
    ep_bound = 1 / (24 * iv.sqrt(ivq(p.R)) * log2_iv(p.R))
    rep.add(check("eps+ of phi*psi bound", r.eps_plus, "<=", ep_bound, regime=True))
    rep.add(check("eps- of phi*psi <= e^-4", r.eps_minus, "<=", iv.exp(iv.mpf(-4)), regime=True))
    phd_theta = gb.theta.phd()
    phd_xi = gb.xi.phd()
    target = (phd_theta - p.eta) * phd_xi
    scan = target if phd_scan is None else max(phd_scan, target)
    got = g.phd(limit=scan)
    rep.add(check("phd(Gamma) >= (phd(theta) - eta) phd(phi*psi)", got, ">=", target,
                  detail=f"phd(theta)={phd_theta}, phd(phi*psi)={phd_xi}"))
    corr = correlation(gb.fn, g)
    rep.add(check("<Gamma, OR o THR> > 1/3", corr, ">", Fraction(1, 3), regime=True))
    A = gb.A()
    rep.add(check("A < 1", A, "<", 1, regime=True))
    return rep


# ------------------------------------------------------------------ composition claims

def _outer_sums(w: ComposedWitness) -> tuple:
    """(zeta(1^n), sum over z != 1^n of zeta(z), of |zeta(z)|, and per-level signed totals)."""
    levels = {t: pos - neg for t, (pos, neg) in w._outer_weights().items()}
    absl = {t: pos + neg for t, (pos, neg) in w._outer_weights().items()}
    top = levels.get(0, Fraction(0))
    rest = sum((v for t, v in levels.items() if t), Fraction(0))
    rest_abs = sum((v for t, v in absl.items() if t), Fraction(0))
    return top, rest, rest_abs, levels


def a_bound(n: int, eta: int, eps_plus) -> Fraction:
    """A = C(n, eta+1) eps+^(eta+1) / (1 - eps+)^n."""
    if eps_plus == 1:
        raise ValueError("A is undefined at eps+ = 1")
    return binom(n, eta + 1) * eps_plus ** (eta + 1) / (1 - eps_plus) ** n


def composition_report(zeta: Witness, xi: Witness, f: BoolFn, eta: int) -> Report:
    """Correlation and norm identities of the modified composition (zeta * xi)(p_eta o alpha).

    Every left-hand side is an exact expectation over the block distributions;
    the final correlation is cross-checked against the composed witness itself.
    """
    g = modified_compose(zeta, xi, f, eta)
    n = zeta.n
    r = g.inner_rates
    P0 = g.normalizer
    A = a_bound(n, eta, r.eps_plus)
    ratio = (1 - r.eps_plus - r.eps_minus) / (1 - r.eps_plus)
    outer_or = make_or(n)
    rep = Report(f"modified composition n={n} m={xi.n} eta={eta}")
    top, rest, rest_abs, levels = _outer_sums(g)
    ce = {t: g.conditional_expectation(t, outer_or) for t in levels}

    rep.add(check("||Gamma||_1 = 1 (unnormalised l1 = p_eta(1-2eps+))", g.l1() * P0, "==", P0))
    lhs_a = top * ce.get(0, Fraction(0))
    rep.add(check("piece (a): outer all-ones term", lhs_a, ">=", P0 * (top - 2 * abs(top) * A)))
    lhs_b = sum((levels[t] * ce[t] for t in levels if t), Fraction(0))
    rhs_b = P0 * (-rest - (2 - 2 * ratio * (1 - A)) * rest_abs)
    rep.add(check("piece (b): remaining outer terms", lhs_b, ">=", rhs_b))
    total = lhs_a + lhs_b
    rep.data.update(piece_a=lhs_a, piece_b=lhs_b, total=total, normalizer=P0, A=A, ratio=ratio)
    direct = correlation(compose(outer_or, f), g) * P0
    rep.add(check("two routes to the final correlation agree", total, "==", direct))
    delta = correlation(outer_or, zeta)
    if A < 1:
        rep.add(check("final correlation", total, ">=", P0 * (delta - (2 - 2 * ratio * (1 - A)))))
    else:
        rep.add(ClaimResult("final correlation", REGIME_ONLY, fmt(total), f"A = {fmt(A)} >= 1",
                            "needs A < 1", REGIME_ONLY))
    pz, px = zeta.phd(), xi.phd()
    target = (pz - eta) * px if pz != INFINITE and px != INFINITE else None
    if target is not None:
        got = g.phd(limit=target + 1)
        rep.add(check("phd >= (phd(zeta) - eta) phd(xi)", got, ">=", target,
                      detail=f"strict form {'holds' if got > target else 'fails'}"))
    return rep


def amplification_report(phi: Witness, psi: Witness, f: BoolFn) -> Report:
    """delta+(OR_M o f, phi*psi) <= M delta+(f, psi) and delta- <= (2 delta-)^M / 2."""
    M = phi.n
    inner = error_rates(f, psi)
    outer = error_rates(compose(make_or(M), f), dbc(phi, psi))
    rep = Report(f"half-half amplification M={M} m={psi.n}")
    rep.add(check("false-positive amplification", outer.delta_plus, "<=", M * inner.delta_plus))
    rep.add(check("false-negative amplification", outer.delta_minus, "<=", (2 * inner.delta_minus) ** M / 2))
    return rep


# ------------------------------------------------------------------ gamma, nu, W reports

@dataclass
class FinalBuild:
    gb: GammaBuild
    nu: PatchedWitness
    W: OrbitWitness
    rs: RSResult | None = None

    @property
    def nu_norm(self) -> Fraction:
        return self.nu.l1()

    def gap(self) -> Fraction:
        """||Gamma - nu||_1 (the two agree above N)."""
        low = orbit_masses(self.gb.gamma, self.nu.low.shape, self.nu.N)
        keys = set(low.masses) | set(self.nu.low.masses)
        return sum((abs(low.masses.get(o, 0) - self.nu.low.masses.get(o, 0)) for o in keys), Fraction(0))


def build_final(gb: GammaBuild, D: int | None = None) -> FinalBuild:
    rs = rs_correct(gb.gamma, gb.params.N, D)
    return FinalBuild(gb, rs.nu, build_final_W(gb.gamma, rs.nu), rs)


def final_report(fb: FinalBuild, phd_limit: int = 8) -> Report:
    gb, nu, W = fb.gb, fb.nu, fb.W
    p = gb.params
    rep = Report(f"final witness R={p.R} k={p.k} n={p.n_outer} M={p.M} N={p.N}")
    norm = fb.nu_norm
    rep.add(check("||nu||_1 <= 1/10", norm, "<=", Fraction(1, 10), regime=True))
    rep.add(check("nu agrees with Gamma above N", nu.mass_above(p.N), "==", gb.gamma.mass_above(p.N)))
    rep.add(check("||W||_1 = 1", W.l1(), "==", 1))
    rep.add(check("W vanishes above weight N", W.mass_above(p.N), "==", 0))
    pg = gb.gamma.phd(limit=phd_limit)
    pn = nu.phd(limit=phd_limit)
    pw = W.phd(limit=phd_limit)
    rep.add(check("phd(W) >= min(phd(Gamma), phd(nu))", pw, ">=", min(pg, pn)))
    F = gb.fn
    cg = correlation(F, gb.gamma)
    cw = correlation(gb.promise_fn, W)
    rep.add(check("correlation chain <W,F> >= (<Gamma,F> - ||nu||_1)/||Gamma - nu||_1", cw, ">=",
                  (cg - norm) / fb.gap()))
    rep.add(check("<W, F> > 1/3", cw, ">", Fraction(1, 3), regime=True))
    try:
        exponent = p.Delta()
        bound_xi = iv.power(ivq(2 * p.N * p.R), -2 * exponent)
        rep.add(check("mass of phi*psi above N <= (2NR)^(-2 Delta)", gb.xi.mass_above(p.N), "<=", bound_xi,
                      regime=True))
        bound_g = iv.power(ivq(2 * p.N * p.R), -2 * (exponent - iv.sqrt(ivq(p.R))))
        rep.add(check("mass of Gamma above N <= (2NR)^(-2(Delta - sqrt R))", gb.gamma.mass_above(p.N), "<=",
                      bound_g, regime=True,
                      detail=f"p_eta amplification factor {p_eta_factor(p.eta, p.n_outer)}"))
    except (ValueError, ZeroDivisionError) as e:  # R too small for ln^2 R
        rep.add(ClaimResult("strong decay", REGIME_ONLY, "", "", str(e), REGIME_ONLY))
    return rep


def p_eta_factor(eta: int, n: int) -> int:
    return p_eta_l1_bound(eta, n)
