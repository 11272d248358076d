"""Constructive approximant for (OR_R o THR^k_N) on the weight-<=N promise and its lift to k-distinctness.

The approximant is an outer Chebyshev polynomial of the averaged block
thresholds, expanded into conjunctions, with every conjunction replaced by
its LP-optimal degree-d approximant on the promise.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import ceil, isqrt, log2

from kdist import orbits as orb
from kdist.boolfn import compose, exact_conjunctions, make_dist, make_or, make_thr, point_of, restrict_weight
from kdist.exact import CapError, binom
from kdist.lp.adeg import ConjApprox, best_error, conj_best_error
from kdist.poly import ConjunctionComb, UnivariatePoly, chebyshev, walsh_hadamard

log = logging.getLogger(__name__)

CONJ_TERM_CAP = 100_000  # conjunctions in one THR expansion
EXPANSION_CAP = 200_000  # conjunctions in the expanded outer polynomial
ENUM_CAP = 1 << 22  # promise points enumerated for the measured error


# ------------------------------------------------------------------ outer Chebyshev

@dataclass(frozen=True)
class OuterCheb:
    """p(y) = 2 T_m((sum y)/R + 1/R) / T_m(1 + 1/R) - 1 on R block outputs."""

    m: int
    R: int

    @property
    def cheb(self) -> UnivariatePoly:
        return chebyshev(self.m)

    @property
    def scale(self) -> Fraction:
        return 2 / self.cheb(1 + Fraction(1, self.R))

    def at_weight(self, w: int) -> Fraction:
        """Value on block outputs with w entries equal to -1."""
        s = Fraction(self.R - 2 * w, self.R) + Fraction(1, self.R)
        return self.scale * self.cheb(s) - 1

    def __call__(self, y) -> Fraction:
        return self.at_weight(sum(1 for v in y if v == -1))

    def error_bound(self) -> Fraction:
        return Fraction(2) / (1 + Fraction(self.m * self.m, self.R))

    def measured_error(self) -> Fraction:
        return max(abs(self.at_weight(w) - (1 if w == 0 else -1)) for w in range(self.R + 1))


def build_outer(m: int, R: int) -> OuterCheb:
    if m < 1 or R < 1:
        raise ValueError(f"need m >= 1 and R >= 1, got m={m}, R={R}")
    return OuterCheb(m, R)


def default_m(R: int) -> int:
    """ceil(sqrt(6R))."""
    r = isqrt(6 * R)
    return r if r * r == 6 * R else r + 1


# ------------------------------------------------------------------ THR as conjunctions

def expand_thr_conjunctions(k: int, N: int) -> ConjunctionComb:
    """THR^k_N = 2 sum_{i<k} EXACT^i_N - 1, each EXACT term a sum of full-block conjunctions."""
    if not 1 <= k <= N:
        raise ValueError(f"THR needs 1 <= k <= N, got k={k}, N={N}")
    if 2 * k > N:
        log.info("k=%d exceeds N/2=%s: outside the upper-bound hypothesis", k, Fraction(N, 2))
    count = sum(binom(N, i) for i in range(k))
    if count > CONJ_TERM_CAP:
        raise CapError(f"THR^{k}_{N} expands into {count} conjunctions (cap {CONJ_TERM_CAP})")
    terms = {(frozenset(), frozenset()): Fraction(-1)}
    for i in range(k):
        for A, B in exact_conjunctions(i, N):
            terms[(A, B)] = Fraction(2)
    return ConjunctionComb(N, terms)


def thr_rho_bound(k: int, N: int) -> Fraction:
    """Tracked bound 1 + 2 k C(N, k) from the upper-bound chain."""
    return 1 + 2 * k * binom(N, k)


# ------------------------------------------------------------------ approximant

@dataclass
class ApproximantReport:
    k: int
    N: int
    R: int
    m: int
    d: int
    outer: OuterCheb
    expansion: ConjunctionComb = field(repr=False)  # outer polynomial as conjunctions over R*N bits
    replacements: dict = field(repr=False)  # (|A|, |B|) -> ConjApprox
    rho_l1: Fraction  # l1 of the expansion coefficients, an upper bound on rho
    rho_tracked: Fraction  # bound carried through the construction
    rho_chain: Fraction  # 2 * 3^m * (1 + 2k C(N,k))^m
    max_conj_error: Fraction
    outer_error: Fraction  # measured on the promise
    measured_error: Fraction | None
    degree: int  # final total degree

    @property
    def arity(self) -> int:
        return self.R * self.N

    def error_bound(self) -> Fraction:
        """Triangle-inequality chain with the measured pieces."""
        return self.outer_error + self.rho_l1 * self.max_conj_error

    def composed_chain_bound(self) -> Fraction:
        return self.outer.error_bound() + self.rho_tracked * self.max_conj_error

    def conj_value(self, A, B, x) -> Fraction:
        ap = self.replacements[(len(A), len(B))]
        wa = sum(1 for i in A if x[i] == -1)
        wb = sum(1 for i in B if x[i] == -1)
        return ap.at_weights(wa, wb, sum(1 for v in x if v == -1) - wa - wb)

    def exact_value(self, x) -> Fraction:
        """The outer polynomial before replacement (conjunctions evaluated exactly)."""
        return self.expansion(x)

    def __call__(self, x) -> Fraction:
        return sum((v * self.conj_value(A, B, x) for (A, B), v in self.expansion.terms.items()), Fraction(0))

    def target(self):
        return restrict_weight(compose(make_or(self.R), make_thr(self.k, self.N)), self.N)

    def rows(self) -> list:
        """Structured form: outer Chebyshev data plus replacement table."""
        out = [f"outer m={self.m} R={self.R} scale={self.outer.scale}",
               f"cheb {' '.join(str(c) for c in self.outer.cheb.coeffs)}"]
        for (a, b), ap in sorted(self.replacements.items()):
            out.append(f"conj |A|={a} |B|={b} degree={ap.degree} error={ap.error} "
                       + " ".join(f"{s}:{v}" for s, v in sorted(ap.poly.coeffs.items()) if v))
        for (A, B), v in sorted(self.expansion.terms.items(), key=lambda t: (sorted(t[0][0]), sorted(t[0][1]))):
            out.append(f"term {v} +{sorted(A)} -{sorted(B)}")
        return out


def _block_terms(k: int, N: int, R: int) -> ConjunctionComb:
    """L = 1/R - 1 + (2/R) sum_j sum_{i<k} EXACT^i(x_j) over R*N bits."""
    n = R * N
    terms = {(frozenset(), frozenset()): Fraction(1, R) - 1}
    base = []
    for i in range(k):
        base.extend(exact_conjunctions(i, N))
    if R * len(base) > CONJ_TERM_CAP:
        raise CapError(f"{R * len(base)} block conjunctions (cap {CONJ_TERM_CAP})")
    for j in range(R):
        for A, B in base:
            terms[(frozenset(a + j * N for a in A), frozenset(b + j * N for b in B))] = Fraction(2, R)
    bound = abs(Fraction(1, R) - 1) + Fraction(2, R) * R * sum(binom(N, i) for i in range(k))
    return ConjunctionComb(n, terms, bound)


def expand_outer(outer: OuterCheb, k: int, N: int) -> ConjunctionComb:
    L = _block_terms(k, N, outer.R)
    n = outer.R * N
    coeffs = outer.cheb.coeffs
    acc = ConjunctionComb.constant(n, 0)
    power = ConjunctionComb.constant(n, 1)
    for j, c in enumerate(coeffs):
        if j:
            power = power * L
            if len(power.terms) > EXPANSION_CAP:
                raise CapError(f"outer expansion exceeds {EXPANSION_CAP} conjunctions")
        if c:
            acc = acc + power.scale(c)
    return acc.scale(outer.scale) + ConjunctionComb.constant(n, -1)


@lru_cache(maxsize=None)
def _replacement(nA: int, nB: int, n: int, d: int, bound: int) -> ConjApprox:
    return conj_best_error(range(nA), range(nA, nA + nB), n, d, bound)


def build_approximant(k: int, N: int, R: int, m: int | None = None, d: int | None = None,
                      measure: bool = True) -> ApproximantReport:
    m = default_m(R) if m is None else m
    d = N if d is None else d
    if d < 0:
        raise ValueError("degree must be non-negative")
    outer = build_outer(m, R)
    exp = expand_outer(outer, k, N)
    n = R * N
    reps = {}
    for A, B in exp.terms:
        key = (len(A), len(B))
        if key not in reps:
            reps[key] = _replacement(key[0], key[1], n, d, N)
    rho_l1 = exp.l1()
    chain = 2 * 3 ** m * thr_rho_bound(k, N) ** m
    max_err = max((ap.error for ap in reps.values()), default=Fraction(0))
    degree = max((ap.poly.degree for ap in reps.values()), default=0)
    rep = ApproximantReport(k, N, R, m, d, outer, exp, reps, rho_l1, exp.bound, chain, max_err,
                            Fraction(0), None, degree)
    if measure:
        rep.outer_error, rep.measured_error = measure_errors(rep)
    return rep


def promise_points(n: int, N: int):
    """All sign vectors of arity n with at most N entries equal to -1."""
    from itertools import combinations
    for w in range(N + 1):
        for S in combinations(range(n), w):
            x = [1] * n
            for i in S:
                x[i] = -1
            yield tuple(x)


def measure_errors(rep: ApproximantReport) -> tuple:
    """(max |outer - F|, max |approximant - F|) over every promise point.

    Both polynomials are invariant under permuting bits inside a block and
    permuting blocks, so values are memoised per orbit while the target is
    evaluated at every point.
    """
    n = rep.arity
    count = sum(binom(n, w) for w in range(rep.N + 1))
    if count > ENUM_CAP:
        raise CapError(f"promise domain has {count} points (cap {ENUM_CAP})")
    shape = (rep.R, rep.N)
    F = rep.target()
    memo: dict = {}
    worst_outer = worst = Fraction(0)
    for x in promise_points(n, rep.N):
        key = orb.orbit_of(shape, x)
        if key not in memo:
            rx = orb.representative(shape, key)
            memo[key] = (rep.exact_value(rx), rep(rx))
        p, q = memo[key]
        fx = F(x)
        worst_outer = max(worst_outer, abs(p - fx))
        worst = max(worst, abs(q - fx))
    return worst_outer, worst


def degree_sweep(k: int, N: int, R: int, m: int | None = None, target=Fraction(1, 3)) -> dict:
    """Measured error for d = N, N-1, ..., 0, stopping once it exceeds target."""
    out = {}
    for d in range(N, -1, -1):
        out[d] = build_approximant(k, N, R, m, d).measured_error
        if out[d] > target:
            break
    return out


def lp_cross_check(rep: ApproximantReport) -> tuple:
    """(LP-optimal error at the approximant's degree, the approximant's measured error)."""
    res = best_error(rep.target(), rep.degree)
    return res.error, rep.measured_error


# ------------------------------------------------------------------ lift to DIST

@dataclass
class LiftedApproximant:
    """q(y(x)) where y_{i,j}(x) = -1 iff item i decodes to range element j."""

    base: ApproximantReport
    items: int
    R: int

    @property
    def bits(self) -> int:
        return max(1, ceil(log2(self.R)))

    @property
    def arity(self) -> int:
        return self.items * self.bits

    @property
    def degree_bound(self) -> int:
        return self.base.degree * self.bits

    def indicator(self, i: int, j: int, x) -> int:
        """y_{i,j}(x): a sum of conjunctions of the bits of item i, in the +-1 convention."""
        b = self.bits
        pattern = 0
        for t in range(b):
            if x[i * b + t] == -1:
                pattern |= 1 << (b - 1 - t)
        return -1 if pattern % self.R == j - 1 else 1

    def substitute(self, x) -> tuple:
        """The R*N block input: block j holds (y_{1,j}, ..., y_{N,j})."""
        return tuple(self.indicator(i, j, x) for j in range(1, self.R + 1) for i in range(self.items))

    def __call__(self, x) -> Fraction:
        return self.base(self.substitute(x))

    def values(self) -> list:
        return [self(point_of(idx, self.arity)) for idx in range(1 << self.arity)]

    def measured_error(self) -> Fraction:
        f = make_dist(self.base.k, self.items, self.R)
        return max(abs(self(point_of(idx, self.arity)) - f(point_of(idx, self.arity)))
                   for idx in range(1 << self.arity))

    def fourier_degree(self) -> int:
        """Degree of the unique multilinear polynomial with these values."""
        spec = walsh_hadamard(self.values())
        return max((bin(S).count("1") for S, v in enumerate(spec) if v), default=-1)


def dist_lift(rep: ApproximantReport, R: int | None = None) -> LiftedApproximant:
    R = rep.R if R is None else R
    if R < 2:
        raise ValueError("lift needs R >= 2")
    if R != rep.R:
        raise ValueError(f"approximant built for R={rep.R}, lift asked for R={R}")
    return LiftedApproximant(rep, rep.N, R)
