"""Best low-degree error, approximate degree and dual witness extraction.

The LP is solved in witness form,

    max  sum_c f_c (u_c - v_c)
    s.t. sum_c (u_c + v_c) = 1,
         sum_c (u_c - v_c) K(c, sig) / |c| = 0   for every signature of degree <= d,

where c ranges over classes of points (single points, weight levels, orbits of
a block-permutation group, or weight triples for a conjunction), u_c - v_c is
the signed mass spread uniformly over class c, and K(c, sig) sums a character
of that signature over the class. Its optimum is E(f, d); the primal is the
dual witness and the row duals are the coefficients of an optimal polynomial.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from kdist import orbits as orb
from kdist.boolfn import BoolFn, index_of, symmetric_structure, weight
from kdist.exact import CapError, binom, frac
from kdist.lp.simplex import LPInstance, LPSolution, solve
from kdist.poly import MultilinearPoly, UnivariatePoly, interpolate_newton, krawtchouk, level_char_sum
from kdist.witness import DenseWitness, LevelWitness, OrbitWitness, Witness

DENSE_POINT_CAP = 1 << 16  # stated cap; the exact simplex is practical to about 2^7 points
ORBIT_CLASS_CAP = 8000


@dataclass
class ClassSystem:
    """A domain split into classes, with per-class sizes, targets and character sums."""

    kind: str  # dense | symmetric | orbit | conj
    n: int
    classes: list
    sizes: list
    values: list
    signatures: Callable[[int], Sequence]
    char_sum: Callable[[object, object], object]
    classify: Callable[[tuple], object]
    shape: tuple = ()

    def sigs_upto(self, d: int) -> list:
        out = []
        for k in range(min(d, self.n) + 1):
            out.extend(self.signatures(k))
        return out


def _target(f, x):
    return frac(f(x))


def dense_system(f: BoolFn) -> ClassSystem:
    n = f.arity
    if f.domain_size() > DENSE_POINT_CAP:
        raise CapError(f"dense LP capped at {DENSE_POINT_CAP} domain points")
    pts = list(f.domain())
    return ClassSystem(
        "dense", n, [index_of(x) for x in pts], [1] * len(pts), [_target(f, x) for x in pts],
        lambda k: [m for m in range(1 << n) if bin(m).count("1") == k],
        lambda c, s: -1 if bin(c & s).count("1") % 2 else 1,
        index_of,
    )


def symmetric_system(f: BoolFn) -> ClassSystem:
    prof = f.profile()
    if prof is None:
        raise ValueError("symmetric path needs a symmetric function")
    n = f.arity
    top = n if f.promise is None else min(n, f.promise)
    levels = list(range(top + 1))
    return ClassSystem(
        "symmetric", n, levels, [binom(n, t) for t in levels], [frac(prof[t]) for t in levels],
        lambda k: [k] if k <= n else [],
        lambda t, s: level_char_sum(s, t, n),
        weight,
        (n,),
    )


def orbit_system(f: BoolFn, shape: tuple | None = None) -> ClassSystem:
    shape = tuple(symmetric_structure(f) if shape is None else shape)
    n = orb.arity(shape)
    top = n if f.promise is None else f.promise
    classes = []
    for o in orb.orbits(shape, top):
        if f.in_promise(orb.representative(shape, o)):
            classes.append(o)
            if len(classes) > ORBIT_CLASS_CAP:
                raise CapError(f"orbit LP capped at {ORBIT_CLASS_CAP} classes")
    return ClassSystem(
        "orbit", n, classes, [orb.size(shape, o) for o in classes],
        [_target(f, orb.representative(shape, o)) for o in classes],
        lambda k: orb.signatures(shape, k),
        lambda o, s: orb.char_sum(shape, o, s),
        lambda x: orb.orbit_of(shape, x),
        shape,
    )


def system_for(f: BoolFn, method: str = "auto") -> ClassSystem:
    if method == "auto":
        st = symmetric_structure(f)
        if st is not None and len(st) == 1:
            method = "symmetric"
        elif st is not None:
            method = "orbit"
        else:
            method = "dense"
    if method == "symmetric":
        return symmetric_system(f)
    if method == "orbit":
        return orbit_system(f)
    if method == "dense":
        return dense_system(f)
    raise ValueError(f"unknown method {method!r}")


# ------------------------------------------------------------------ results

@dataclass(frozen=True)
class ClassPoly:
    """A polynomial constant on classes: sum over signatures of coeff * (class average of chi_sig)."""

    system: ClassSystem = field(repr=False)
    coeffs: dict

    def at_class(self, c) -> Fraction:
        size = _class_size(self.system, c)
        return sum((v * frac(self.system.char_sum(c, s)) / size for s, v in self.coeffs.items()), Fraction(0))

    def __call__(self, x) -> Fraction:
        return self.at_class(self.system.classify(tuple(x)))

    @property
    def degree(self) -> int:
        return max((_sig_degree(self.system, s) for s, v in self.coeffs.items() if v), default=-1)

    def to_multilinear(self) -> MultilinearPoly:
        """Explicit Fourier form (dense systems only)."""
        if self.system.kind != "dense":
            raise ValueError("explicit Fourier form only for dense systems")
        n = self.system.n
        return MultilinearPoly(n, {frozenset(i for i in range(n) if (s >> i) & 1): v for s, v in self.coeffs.items()})

    def to_univariate(self) -> UnivariatePoly:
        """q with q(|x|) = p(x) (symmetric systems only)."""
        if self.system.kind != "symmetric":
            raise ValueError("univariate form only for symmetric systems")
        n = self.system.n
        d = max(self.degree, 0)
        vals = [sum((v * Fraction(krawtchouk(s, t, n), binom(n, s)) for s, v in self.coeffs.items()), Fraction(0))
                for t in range(d + 1)]
        return interpolate_newton(vals)


def _class_size(system: ClassSystem, c) -> int:
    if system.kind == "dense":
        return 1
    if system.kind == "symmetric":
        return binom(system.n, c)
    if system.kind == "orbit":
        return orb.size(system.shape, c)
    if system.kind == "conj":
        a, b, r = system.shape
        return binom(a, c[0]) * binom(b, c[1]) * binom(r, c[2])
    raise ValueError(system.kind)


def _sig_degree(system: ClassSystem, s) -> int:
    if system.kind == "dense":
        return bin(s).count("1")
    if system.kind == "symmetric":
        return s
    if system.kind == "orbit":
        return orb.weight(system.shape, s)
    return sum(s)


@dataclass
class BestError:
    error: Fraction
    degree: int
    poly: ClassPoly
    witness: Witness | None
    method: str
    lp: LPInstance = field(repr=False)
    solution: LPSolution = field(repr=False)


def witness_lp(system: ClassSystem, d: int) -> tuple[LPInstance, list, list, list]:
    lp = LPInstance(note=f"witness form, {system.kind} classes, degree {d}")
    u = [lp.add_var(f"u{i}") for i in range(len(system.classes))]
    v = [lp.add_var(f"v{i}") for i in range(len(system.classes))]
    norm = {}
    for a, b in zip(u, v):
        norm[a] = 1
        norm[b] = 1
    lp.add_row(norm, "==", 1)
    sigs = system.sigs_upto(d)
    for s in sigs:
        row = {}
        for i, c in enumerate(system.classes):
            k = frac(system.char_sum(c, s))
            if k:
                row[u[i]] = k / system.sizes[i]
                row[v[i]] = -k / system.sizes[i]
        lp.add_row(row, "==", 0)
    obj = {}
    for i, fv in enumerate(system.values):
        obj[u[i]] = fv
        obj[v[i]] = -fv
    lp.set_objective(obj, "max")
    return lp, u, v, sigs


def _witness_from(system: ClassSystem, masses: list) -> Witness:
    if system.kind == "dense":
        vals = [Fraction(0)] * (1 << system.n)
        for c, m in zip(system.classes, masses):
            vals[c] = m
        return DenseWitness(system.n, tuple(vals))
    if system.kind == "symmetric":
        lv = [Fraction(0)] * (system.n + 1)
        for c, m in zip(system.classes, masses):
            lv[c] = m
        return LevelWitness(system.n, tuple(lv))
    if system.kind == "orbit":
        return OrbitWitness(system.shape, {c: m for c, m in zip(system.classes, masses) if m})
    raise ValueError(f"no witness carrier for {system.kind}")


def solve_system(system: ClassSystem, d: int) -> BestError:
    lp, u, v, sigs = witness_lp(system, d)
    sol = solve(lp)
    if sol.status != "optimal":
        raise RuntimeError(f"witness LP ended with status {sol.status}")
    E = sol.objective
    coeffs = {s: y for s, y in zip(sigs, sol.duals[1:]) if y}
    poly = ClassPoly(system, coeffs)
    # the readout must reproduce the optimum on every class
    worst = max((abs(fv - poly.at_class(c)) for c, fv in zip(system.classes, system.values)), default=Fraction(0))
    if worst != E:
        raise RuntimeError(f"dual readout error {worst} differs from LP optimum {E}")
    witness = None
    if E > 0:
        masses = [sol.x[a] - sol.x[b] for a, b in zip(u, v)]
        witness = _witness_from(system, masses) if system.kind != "conj" else None
    return BestError(E, d, poly, witness, system.kind, lp, sol)


def best_error(f: BoolFn, d: int, method: str = "auto") -> BestError:
    if d < 0:
        raise ValueError("degree must be non-negative")
    return solve_system(system_for(f, method), d)


@dataclass
class AdegResult:
    degree: int
    eps: Fraction
    errors: dict  # d -> E(f, d)
    poly: ClassPoly
    witness: Witness | None  # certifies E(f, degree - 1) > eps
    witness_error: Fraction | None
    method: str


def adeg(f: BoolFn, eps, max_d: int | None = None, method: str = "auto") -> AdegResult:
    """Least d with E(f, d) <= eps, scanning upward, plus the dual witness one degree below."""
    eps = frac(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    system = system_for(f, method)
    top = f.arity if max_d is None else min(max_d, f.arity)
    errors = {}
    prev = None
    for d in range(top + 1):
        res = solve_system(system, d)
        errors[d] = res.error
        if res.error <= eps:
            w = prev.witness if prev is not None else None
            return AdegResult(d, eps, errors, res.poly, w, prev.error if prev else None, system.kind)
        prev = res
    raise CapError(f"E(f, d) > eps for all d <= {top}")


# -------------------------------------------------------------- minimax form

def minimax_lp(f: BoolFn, d: int, basis: str = "auto", outside_bound=None) -> LPInstance:
    """min E s.t. |f - p| <= E on the domain; p in the power basis of |x|
    (symmetric f) or the Fourier basis (dense).

    With outside_bound set, |p| <= outside_bound is also imposed off the promise
    (for comparison only: approximate degree places no such constraint).
    """
    if basis == "auto":
        basis = "power" if f.profile() is not None else "fourier"
    lp = LPInstance(note=f"minimax form, {basis} basis, degree {d}")
    E = lp.add_var("E")
    if basis == "power":
        prof = f.profile()
        top = f.arity if f.promise is None else min(f.arity, f.promise)
        a = [lp.add_var(f"a{j}", free=True) for j in range(d + 1)]
        for t in range(top + 1):
            row = {aj: Fraction(t) ** j for j, aj in enumerate(a)}
            lp.add_row({**row, E: -1}, "<=", prof[t])
            lp.add_row({**{k: -c for k, c in row.items()}, E: -1}, "<=", -frac(prof[t]))
        if outside_bound is not None:
            for t in range(top + 1, f.arity + 1):
                row = {aj: Fraction(t) ** j for j, aj in enumerate(a)}
                lp.add_row(row, "<=", frac(outside_bound))
                lp.add_row({k: -c for k, c in row.items()}, "<=", frac(outside_bound))
    elif basis == "fourier":
        n = f.arity
        if f.domain_size() > DENSE_POINT_CAP:
            raise CapError(f"dense LP capped at {DENSE_POINT_CAP} domain points")
        masks = [m for m in range(1 << n) if bin(m).count("1") <= d]
        a = [lp.add_var(f"c{m}", free=True) for m in masks]
        for x in f.domain():
            idx = index_of(x)
            row = {aj: (-1 if bin(m & idx).count("1") % 2 else 1) for m, aj in zip(masks, a)}
            fx = frac(f(x))
            lp.add_row({**row, E: -1}, "<=", fx)
            lp.add_row({**{k: -c for k, c in row.items()}, E: -1}, "<=", -fx)
        if outside_bound is not None and f.promise is not None:
            for idx in range(1 << n):
                if bin(idx).count("1") > f.promise:
                    row = {aj: (-1 if bin(m & idx).count("1") % 2 else 1) for m, aj in zip(masks, a)}
                    lp.add_row(row, "<=", frac(outside_bound))
                    lp.add_row({k: -c for k, c in row.items()}, "<=", frac(outside_bound))
    else:
        raise ValueError(f"unknown basis {basis!r}")
    lp.set_objective({E: 1}, "min")
    return lp


def minimax_error(f: BoolFn, d: int, basis: str = "auto", outside_bound=None) -> Fraction:
    return solve(minimax_lp(f, d, basis, outside_bound)).objective


# ------------------------------------------------------------- conjunctions

def conj_system(nA: int, nB: int, n: int, bound: int | None) -> ClassSystem:
    """Classes (wA, wB, wR): weights inside A, inside B and on the rest."""
    nR = n - nA - nB
    if nR < 0:
        raise ValueError("A and B must be disjoint subsets of [n]")
    top = n if bound is None else bound
    classes = [(a, b, r) for a in range(nA + 1) for b in range(nB + 1) for r in range(nR + 1) if a + b + r <= top]
    sizes = [binom(nA, a) * binom(nB, b) * binom(nR, r) for a, b, r in classes]
    values = [Fraction(1) if (a == 0 and b == nB) else Fraction(0) for a, b, r in classes]

    def sigs(k):
        return [(s, t, k - s - t) for s in range(min(k, nA) + 1) for t in range(min(k - s, nB) + 1) if k - s - t <= nR]

    def cs(c, s):
        return level_char_sum(s[0], c[0], nA) * level_char_sum(s[1], c[1], nB) * level_char_sum(s[2], c[2], nR)

    def classify(x):
        return (sum(1 for i in range(nA) if x[i] == -1), sum(1 for i in range(nA, nA + nB) if x[i] == -1),
                sum(1 for i in range(nA + nB, n) if x[i] == -1))

    return ClassSystem("conj", n, classes, sizes, values, sigs, cs, classify, (nA, nB, nR))


@dataclass
class ConjApprox:
    """Best degree-d approximant of a conjunction on the weight promise, as a function of (wA, wB, wR)."""

    nA: int
    nB: int
    n: int
    bound: int | None
    degree: int
    error: Fraction
    poly: ClassPoly

    def at_weights(self, wA: int, wB: int, wR: int) -> Fraction:
        return self.poly.at_class((wA, wB, wR))


def conj_best_error(A, B, n: int, d: int, bound: int | None = None) -> ConjApprox:
    """E(conj(A, B), d) on {|x| <= bound}; A holds the coordinates required to be +1, B those required -1."""
    A, B = frozenset(A), frozenset(B)
    if A & B:
        raise ValueError("A and B must be disjoint")
    if any(i < 0 or i >= n for i in A | B):
        raise ValueError("coordinates outside [n]")
    res = solve_system(conj_system(len(A), len(B), n, bound), d)
    return ConjApprox(len(A), len(B), n, bound, d, res.error, res.poly)
