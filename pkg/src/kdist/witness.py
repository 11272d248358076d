"""Dual witnesses: real-valued functions on the hypercube and their algebra.

Three concrete carriers: DenseWitness (a table), LevelWitness (a symmetric
function given by its signed mass on each weight level) and OrbitWitness
(mass per orbit of a nested block-permutation group). ComposedWitness is the
lazy dual block composition outer * inner, optionally multiplied by
p_eta(alpha(x_1), ..., alpha(x_n)) and renormalised.

Statistics of composed witnesses never enumerate the full cube. Writing
nu_z(y) = |inner(y)| [sgn inner(y) = z], the composition is
    2^n outer(z) prod_i nu_{z_i}(x_i)
on the inputs whose blocks have sign pattern z, so every sum of a
block-product test function factorises into per-block sums ("block stats").
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations, permutations
from typing import Callable, Mapping

from kdist import orbits as orb
from kdist.boolfn import BoolFn, ComposedFn, index_of, point_of, symmetric_structure, weight
from kdist.exact import CapError, binom, frac
from kdist.poly import build_p_eta, eval_symmetric_at_reals, krawtchouk, walsh_hadamard

INFINITE = math.inf  # phd of the zero witness
DENSE_WITNESS_CAP = 16


def sgn(v) -> int:
    return -1 if v < 0 else 1


# ----------------------------------------------------------------- carriers

class Witness:
    n: int
    tag = "witness"

    def value(self, x) -> Fraction:
        raise NotImplementedError

    def dense_values(self) -> list[Fraction]:
        if self.n > DENSE_WITNESS_CAP:
            raise CapError(f"dense witness materialisation capped at {DENSE_WITNESS_CAP} bits")
        return [self.value(point_of(i, self.n)) for i in range(1 << self.n)]

    def to_dense(self) -> "DenseWitness":
        return DenseWitness(self.n, tuple(self.dense_values()))

    def l1(self) -> Fraction:
        return sum((abs(v) for v in self.dense_values()), Fraction(0))

    def total(self) -> Fraction:
        """<psi, 1>."""
        return self.moments_below(1).get(self._zero_sig(), Fraction(0))

    def mass_above(self, N: int) -> Fraction:
        return sum((abs(v) for i, v in enumerate(self.dense_values()) if bin(i).count("1") > N), Fraction(0))

    def category_masses(self, f: BoolFn) -> dict:
        """{(sign of psi, f value): total |psi| mass}; raises on promise mismatch."""
        out: dict = {}
        for i, v in enumerate(self.dense_values()):
            if v == 0:
                continue
            x = point_of(i, self.n)
            if not f.in_promise(x):
                raise ValueError("witness puts mass outside the promise of the function")
            key = (sgn(v), f(x))
            out[key] = out.get(key, Fraction(0)) + abs(v)
        return out

    def phd(self, limit: int | None = None):
        """Pure high degree; INFINITE for the zero witness.

        With a limit, stops scanning there and returns the limit when all
        lower moments vanish (meaning phd >= limit).
        """
        top = self.n if limit is None else min(limit, self.n)
        for d in range(top + 1):
            for sig in self._signatures(d):
                if self.moment(sig) != 0:
                    return d
        if limit is not None and limit <= self.n:
            return limit
        return INFINITE

    def moments_below(self, d: int) -> dict:
        return {sig: self.moment(sig) for k in range(d) for sig in self._signatures(k)}

    def first_nonzero_moment(self, below: int):
        for k in range(min(below, self.n + 1)):
            for sig in self._signatures(k):
                v = self.moment(sig)
                if v != 0:
                    return sig, v
        return None

    # subclasses supply these three
    def _signatures(self, degree: int):
        raise NotImplementedError

    def _zero_sig(self):
        raise NotImplementedError

    def moment(self, sig) -> Fraction:
        raise NotImplementedError

    def signature_set(self, sig) -> tuple:
        """A concrete coordinate set with the given signature."""
        raise NotImplementedError


@dataclass(frozen=True)
class DenseWitness(Witness):
    n: int
    values: tuple  # indexed by boolfn.index_of
    tag = "dense"

    def __post_init__(self):
        if self.n > DENSE_WITNESS_CAP:
            raise CapError(f"dense witness capped at {DENSE_WITNESS_CAP} bits")
        if len(self.values) != 1 << self.n:
            raise ValueError("need 2^n values")
        object.__setattr__(self, "values", tuple(frac(v) for v in self.values))

    @classmethod
    def from_function(cls, n: int, fn: Callable) -> "DenseWitness":
        return cls(n, tuple(frac(fn(point_of(i, n))) for i in range(1 << n)))

    def value(self, x):
        return self.values[index_of(x)]

    def dense_values(self):
        return list(self.values)

    def l1(self):
        return sum((abs(v) for v in self.values), Fraction(0))

    @cached_property
    def _spectrum(self) -> list:
        return walsh_hadamard(list(self.values))

    def _signatures(self, degree):
        return [i for i in range(1 << self.n) if bin(i).count("1") == degree]

    def _zero_sig(self):
        return 0

    def moment(self, sig):
        return self._spectrum[sig]

    def phd(self, limit=None):
        nz = [bin(i).count("1") for i, v in enumerate(self._spectrum) if v != 0]
        if not nz:
            return INFINITE if limit is None else limit
        d = min(nz)
        return d if limit is None else min(d, limit)

    def signature_set(self, sig):
        return tuple(i for i in range(self.n) if (sig >> i) & 1)

    def scaled(self, a) -> "DenseWitness":
        a = frac(a)
        return DenseWitness(self.n, tuple(a * v for v in self.values))


@dataclass(frozen=True)
class LevelWitness(Witness):
    """psi(x) = levels[|x|] / C(n, |x|): the mass of each level spread uniformly."""

    n: int
    levels: tuple
    tag = "level"

    def __post_init__(self):
        if len(self.levels) != self.n + 1:
            raise ValueError("need n + 1 level masses")
        object.__setattr__(self, "levels", tuple(frac(v) for v in self.levels))

    def value(self, x):
        t = weight(x)
        return self.levels[t] / binom(self.n, t)

    def l1(self):
        return sum((abs(v) for v in self.levels), Fraction(0))

    def mass_above(self, N):
        return sum((abs(v) for t, v in enumerate(self.levels) if t > N), Fraction(0))

    def power_moment(self, j: int) -> Fraction:
        return sum((v * t ** j for t, v in enumerate(self.levels) if v), Fraction(0))

    def phd(self, limit=None):
        # vanishing against every polynomial of degree < d is the same as the
        # univariate moments sum_t levels[t] t^j vanishing for j < d
        top = self.n if limit is None else min(limit, self.n)
        for j in range(top + 1):
            if self.power_moment(j) != 0:
                return j
        if limit is not None and limit <= self.n:
            return limit
        return INFINITE

    def _signatures(self, degree):
        return [degree] if degree <= self.n else []

    def _zero_sig(self):
        return 0

    def moment(self, sig):
        return sum((v * Fraction(krawtchouk(sig, t, self.n), binom(self.n, sig))
                    for t, v in enumerate(self.levels) if v), Fraction(0))

    def signature_set(self, sig):
        return tuple(range(sig))

    def category_masses(self, f):
        prof = f.profile()
        if prof is None or f.arity != self.n:
            return Witness.category_masses(self, f)
        top = self.n if f.promise is None else f.promise
        out: dict = {}
        for t, v in enumerate(self.levels):
            if v == 0:
                continue
            if t > top:
                raise ValueError("witness puts mass outside the promise of the function")
            key = (sgn(v), prof[t])
            out[key] = out.get(key, Fraction(0)) + abs(v)
        return out


@dataclass(frozen=True)
class OrbitWitness(Witness):
    """Mass per orbit of a nested block-permutation group, spread uniformly."""

    shape: tuple
    masses: Mapping = field(default_factory=dict)
    tag = "orbit"

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(self.shape))
        object.__setattr__(self, "masses", {o: frac(v) for o, v in self.masses.items() if v != 0})

    @property
    def n(self):
        return orb.arity(self.shape)

    def value(self, x):
        o = orb.orbit_of(self.shape, x)
        v = self.masses.get(o)
        return Fraction(0) if v is None else v / orb.size(self.shape, o)

    def l1(self):
        return sum((abs(v) for v in self.masses.values()), Fraction(0))

    def mass_above(self, N):
        return sum((abs(v) for o, v in self.masses.items() if orb.weight(self.shape, o) > N), Fraction(0))

    def _signatures(self, degree):
        return orb.signatures(self.shape, degree)

    def _zero_sig(self):
        return orb.zero(self.shape)

    def moment(self, sig):
        return sum((v * orb.char_sum(self.shape, o, sig) / orb.size(self.shape, o)
                    for o, v in self.masses.items()), Fraction(0))

    def signature_set(self, sig):
        rep = orb.representative(self.shape, sig)
        return tuple(i for i, v in enumerate(rep) if v == -1)

    def category_masses(self, f):
        if symmetric_structure(f) != list(self.shape):
            return Witness.category_masses(self, f)
        out: dict = {}
        for o, v in self.masses.items():
            x = orb.representative(self.shape, o)
            if not f.in_promise(x):
                raise ValueError("witness puts mass outside the promise of the function")
            key = (sgn(v), f(x))
            out[key] = out.get(key, Fraction(0)) + abs(v)
        return out

    def __add__(self, other: "OrbitWitness") -> "OrbitWitness":
        if other.shape != self.shape:
            raise ValueError("shape mismatch")
        out = dict(self.masses)
        for o, v in other.masses.items():
            out[o] = out.get(o, Fraction(0)) + v
        return OrbitWitness(self.shape, out)

    def scaled(self, a) -> "OrbitWitness":
        a = frac(a)
        return OrbitWitness(self.shape, {o: a * v for o, v in self.masses.items()})


# ------------------------------------------------------- sparse polynomials

def _pmul(a: dict, b: dict, caps: tuple | None = None) -> dict:
    out: dict = {}
    for ea, va in a.items():
        for eb, vb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            if caps is not None and any(c is not None and x > c for x, c in zip(e, caps)):
                continue
            out[e] = out.get(e, Fraction(0)) + va * vb
    return {e: v for e, v in out.items() if v != 0}


def _ppow(a: dict, k: int, nvars: int, caps=None) -> dict:
    out = {(0,) * nvars: Fraction(1)}
    for _ in range(k):
        out = _pmul(out, a, caps)
    return out


# ------------------------------------------------------------- block models

class _LevelModel:
    symmetric = True

    def __init__(self, w: LevelWitness, g: BoolFn | None):
        self.m = w.n
        self.levels = w.levels
        self.zero = 0
        self.prof = None
        if g is not None:
            self.prof = g.profile()
            if self.prof is None or g.arity != w.n:
                raise ValueError("level witness needs a symmetric block function of matching arity")
            if g.promise is not None and any(v for t, v in enumerate(self.levels) if t > g.promise):
                raise ValueError("witness puts mass outside the promise of the block function")

    def cats(self):
        return (1, -1) if self.prof is not None else (None,)

    @lru_cache(maxsize=None)
    def stat(self, z, b, s):
        total = Fraction(0)
        for t, v in enumerate(self.levels):
            if v == 0 or sgn(v) != z or (b is not None and self.prof[t] != b):
                continue
            total += abs(v) * Fraction(krawtchouk(s, t, self.m), binom(self.m, s))
        return total

    @lru_cache(maxsize=None)
    def wpoly(self, z, b, cap):
        out = [Fraction(0)] * (cap + 1)
        for t, v in enumerate(self.levels):
            if v == 0 or sgn(v) != z or (b is not None and self.prof[t] != b) or t > cap:
                continue
            out[t] += abs(v)
        return tuple(out)

    def signatures(self, degree):
        return (degree,) if 0 <= degree <= self.m else ()

    def sig_degree(self, s):
        return s


class _DenseModel:
    symmetric = False

    def __init__(self, w: DenseWitness, g: BoolFn | None):
        self.m = w.n
        self.values = w.values
        self.zero = 0
        self.g = g
        self.fvals = None
        if g is not None:
            fv = []
            for i, v in enumerate(self.values):
                x = point_of(i, self.m)
                if v != 0 and not g.in_promise(x):
                    raise ValueError("witness puts mass outside the promise of the block function")
                fv.append(g(x) if g.in_promise(x) else None)
            self.fvals = fv
        self._spec = {}

    def cats(self):
        return (1, -1) if self.fvals is not None else (None,)

    def _mask(self, z, b):
        return [abs(v) if v != 0 and sgn(v) == z and (b is None or self.fvals[i] == b) else Fraction(0)
                for i, v in enumerate(self.values)]

    def stat(self, z, b, s):
        key = (z, b)
        if key not in self._spec:
            self._spec[key] = walsh_hadamard(self._mask(z, b))
        return self._spec[key][s]

    @lru_cache(maxsize=None)
    def wpoly(self, z, b, cap):
        out = [Fraction(0)] * (cap + 1)
        for i, v in enumerate(self._mask(z, b)):
            t = bin(i).count("1")
            if v and t <= cap:
                out[t] += v
        return tuple(out)

    def signatures(self, degree):
        return tuple(i for i in range(1 << self.m) if bin(i).count("1") == degree)

    def sig_degree(self, s):
        return bin(s).count("1")


class _NestModel:
    """Block model of an unmodified composition outer * child."""

    def __init__(self, outer: Witness, child, gouter: BoolFn | None):
        if not isinstance(outer, (LevelWitness, DenseWitness)):
            raise ValueError("outer witness must be level or dense")
        self.outer = outer
        self.child = child
        self.n = outer.n
        self.m = outer.n * child.m
        self.zero = (child.zero,) * self.n
        self.symmetric = isinstance(outer, LevelWitness) and child.symmetric
        self.gprof = None
        if gouter is not None:
            self.gprof = gouter.profile()
            if self.gprof is None or gouter.arity != self.n:
                raise ValueError("outer function must be symmetric with matching arity")

    def cats(self):
        return (1, -1) if self.gprof is not None else (None,)

    def _factor(self, zi, s, level_outer: bool, wvar_cap=None):
        """Per-block generating polynomial in (outer weight, count of b=-1, block weight)."""
        out: dict = {}
        for bi in self.child.cats():
            c = 1 if bi == -1 else 0
            if wvar_cap is None:
                v = self.child.stat(zi, bi, s)
                if v:
                    e = (1 if zi == -1 else 0, c, 0)
                    out[e] = out.get(e, Fraction(0)) + v
            else:
                for t, v in enumerate(self.child.wpoly(zi, bi, wvar_cap)):
                    if v:
                        e = (1 if zi == -1 else 0, c, t)
                        out[e] = out.get(e, Fraction(0)) + v
        return out

    def _generate(self, sig, wcap=None):
        """Yields (outer sign, |outer| weight, generating poly) groups."""
        caps = (None, None, wcap)
        if isinstance(self.outer, LevelWitness):
            poly = {(0, 0, 0): Fraction(1)}
            for i in range(self.n):
                s = sig[i]
                f = {}
                for zi in (1, -1):
                    for e, v in self._factor(zi, s, True, wcap).items():
                        f[e] = f.get(e, Fraction(0)) + v
                poly = _pmul(poly, f, caps)
            for t, L in enumerate(self.outer.levels):
                if L == 0:
                    continue
                sub = {(0, c, w): v for (tt, c, w), v in poly.items() if tt == t}
                yield sgn(L), abs(L) / binom(self.n, t), sub
        else:
            for idx, val in enumerate(self.outer.values):
                if val == 0:
                    continue
                wz = point_of(idx, self.n)
                poly = {(0, 0, 0): Fraction(1)}
                for i in range(self.n):
                    f = {(0, c, w): v for (_, c, w), v in self._factor(wz[i], sig[i], False, wcap).items()}
                    poly = _pmul(poly, f, caps)
                yield sgn(val), abs(val), poly

    @lru_cache(maxsize=None)
    def stat(self, z, b, sig):
        scale = 1 << self.n
        total = Fraction(0)
        for zz, wt, poly in self._generate(sig):
            if zz != z:
                continue
            for (_, c, _), v in poly.items():
                if b is None or self.gprof[c] == b:
                    total += wt * v
        return total * scale

    @lru_cache(maxsize=None)
    def wpoly(self, z, b, cap):
        scale = 1 << self.n
        out = [Fraction(0)] * (cap + 1)
        for zz, wt, poly in self._generate(self.zero, cap):
            if zz != z:
                continue
            for (_, c, w), v in poly.items():
                if b is None or self.gprof[c] == b:
                    out[w] += wt * v * scale
        return tuple(out)

    def sig_degree(self, sig):
        return sum(self.child.sig_degree(s) for s in sig)

    def signatures(self, degree):
        return _tuple_signatures(self.child, self.n, degree, self.symmetric)


def _tuple_signatures(child, n: int, degree: int, symmetric: bool) -> tuple:
    pool = []
    for d in range(1, degree + 1):
        pool.extend((d, s) for s in child.signatures(d))
    out = set()

    def rec(start, remaining, slots, acc):
        if remaining == 0:
            if symmetric:
                out.add(tuple(sorted(acc + [child.zero] * slots)))
            else:
                _spread(acc, n, child.zero, out)
            return
        if slots == 0:
            return
        for i in range(start, len(pool)):
            d, s = pool[i]
            if d <= remaining:
                rec(i, remaining - d, slots - 1, acc + [s])

    rec(0, degree, n, [])
    return tuple(sorted(out))


def _spread(parts, n, zero, out):
    """All placements of a multiset of nonzero parts into n ordered slots."""
    k = len(parts)
    for slots in combinations(range(n), k):
        for perm in set(permutations(parts)):
            t = [zero] * n
            for pos, p in zip(slots, perm):
                t[pos] = p
            out.add(tuple(t))


def block_model(w: Witness, g: BoolFn | None):
    """Block statistics engine for witness w paired with block function g (or None)."""
    if isinstance(w, LevelWitness):
        if g is not None and g.profile() is None and g.arity == w.n:
            return _DenseModel(w.to_dense(), g)  # symmetric witness, asymmetric block function
        return _LevelModel(w, g)
    if isinstance(w, DenseWitness):
        return _DenseModel(w, g)
    if isinstance(w, ComposedWitness) and w.eta is None:
        gin, gout = None, None
        if g is not None:
            if not isinstance(g, ComposedFn) or g.promise is not None:
                raise ValueError("block function of a composed witness must be a composition without global promise")
            gin, gout = g.inner, g.outer
        return _NestModel(w.outer, block_model(w.inner, gin), gout)
    raise ValueError(f"no block model for {type(w).__name__}")


# --------------------------------------------------------------- composition

@dataclass(frozen=True)
class ErrorRates:
    delta_plus: Fraction
    delta_minus: Fraction
    eps_plus: Fraction
    eps_minus: Fraction

    @property
    def eps(self) -> Fraction:
        return self.eps_plus + self.eps_minus


@dataclass(frozen=True)
class BlockStats:
    """Category masses of mu_z for each sign z, and the alpha constants."""

    masses: Mapping  # {(z, 'agree' | 'disagree'): conditional probability under mu_z}
    eps_plus: Fraction
    eps_minus: Fraction

    a_plus = Fraction(1)
    b_plus = Fraction(0)

    @property
    def a_minus(self) -> Fraction:
        if self.eps_minus == 1:
            return Fraction(1)
        return (1 - 2 * self.eps_plus - self.eps_minus) / (1 - self.eps_minus)

    @property
    def b_minus(self) -> Fraction:
        if self.eps_minus == 1:
            return Fraction(0)
        return self.eps_plus / (1 - self.eps_minus)

    def alpha_of(self, z: int, agree: bool) -> Fraction:
        if z == 1:
            return Fraction(1) if agree else Fraction(-1)
        return self.a_minus if agree else Fraction(1)

    def expected_alpha(self, z: int) -> Fraction:
        return sum((p * self.alpha_of(zz, cat == "agree") for (zz, cat), p in self.masses.items() if zz == z),
                   Fraction(0))


def _rates_from_masses(cm: dict) -> ErrorRates:
    pos = cm.get((1, 1), Fraction(0)) + cm.get((1, -1), Fraction(0))
    neg = cm.get((-1, 1), Fraction(0)) + cm.get((-1, -1), Fraction(0))
    dp = cm.get((1, -1), Fraction(0))
    dm = cm.get((-1, 1), Fraction(0))
    ep = dp / pos if pos else Fraction(0)
    em = dm / neg if neg else Fraction(0)
    return ErrorRates(dp, dm, ep, em)


@dataclass(frozen=True, eq=False)
class ComposedWitness(Witness):
    """(outer * inner)(x) = 2^n outer(sgn inner(x_1), ...) prod |inner(x_i)|,

    times p_eta(alpha(x_1), ..., alpha(x_n)) / p_eta(1 - 2 eps+, ...) when eta is
    given, alpha taken with respect to the block function fn.
    """

    outer: Witness
    inner: Witness
    fn: BoolFn | None = None
    eta: int | None = None
    tag = "composed"

    def __post_init__(self):
        if not isinstance(self.outer, (LevelWitness, DenseWitness)):
            raise ValueError("outer witness must be level or dense")
        if self.eta is not None:
            if self.fn is None:
                raise ValueError("modified composition needs the block function")
            if self.eta < 0 or self.eta % 2 or self.eta >= self.outer.n:
                raise ValueError(f"eta must be even and below the outer arity {self.outer.n}")

    @property
    def n(self):
        return self.outer.n * self.inner.n

    @property
    def blocks(self) -> int:
        return self.outer.n

    def split(self, x):
        m = self.inner.n
        return [tuple(x[i * m:(i + 1) * m]) for i in range(self.outer.n)]

    # -- modifier data
    @cached_property
    def inner_model(self):
        return block_model(self.inner, self.fn)

    @cached_property
    def inner_rates(self) -> ErrorRates | None:
        if self.fn is None:
            return None
        cm = {}
        for z in (1, -1):
            for b in (1, -1):
                cm[(z, b)] = self.inner_model.stat(z, b, self.inner_model.zero)
        return _rates_from_masses(cm)

    @cached_property
    def p_eta(self):
        return build_p_eta(self.eta, self.outer.n) if self.eta is not None else None

    @cached_property
    def b_minus(self) -> Fraction:
        r = self.inner_rates
        if r.eps_minus == 1:
            return Fraction(0)  # no agreeing negative mass, so the value is never used
        return r.eps_plus / (1 - r.eps_minus)

    @cached_property
    def normalizer(self) -> Fraction:
        if self.eta is None:
            return Fraction(1)
        v = self.p_eta.at_uniform(self.inner_rates.eps_plus)
        if v == 0:
            raise ValueError("degenerate normaliser p_eta(1 - 2 eps+, ...) = 0")
        return v

    def _u(self, z, b) -> Fraction:
        if z == 1:
            return Fraction(1) if b == -1 else Fraction(0)
        return self.b_minus if b == -1 else Fraction(0)

    def alpha(self, y) -> Fraction:
        v = self.inner.value(y)
        return 1 - 2 * self._u(sgn(v), self.fn(y))

    @cached_property
    def _ecoeffs(self):
        return self.p_eta.elementary_coeffs() if self.eta is not None else [Fraction(1)]

    @lru_cache(maxsize=None)
    def p_at_counts(self, c1: int, c2: int) -> Fraction:
        """p_eta at c1 entries -1, c2 entries a-, the rest 1 (1 when unmodified)."""
        if self.eta is None:
            return Fraction(1)
        u = self.b_minus
        total = Fraction(0)
        for j, c in enumerate(self._ecoeffs):
            if c == 0:
                continue
            e = sum((binom(c1, i) * binom(c2, j - i) * u ** (j - i) for i in range(j + 1)), Fraction(0))
            total += c * e
        return total

    # -- pointwise
    def value(self, x):
        blocks = self.split(x)
        vals = [self.inner.value(b) for b in blocks]
        z = tuple(sgn(v) for v in vals)
        out = (1 << self.outer.n) * self.outer.value(z)
        for v in vals:
            out *= abs(v)
        if out == 0 or self.eta is None:
            return out
        alphas = [1 - 2 * self._u(zi, self.fn(b)) for zi, b in zip(z, blocks)]
        return out * eval_symmetric_at_reals(self.p_eta, alphas) / self.normalizer

    # -- aggregated statistics
    def _outer_weights(self) -> dict:
        """{t: (positive mass, negative mass)} of the outer witness by level.

        Every z of weight t sees the same count table, so only level totals matter.
        """
        out: dict = {}
        if isinstance(self.outer, LevelWitness):
            for t, L in enumerate(self.outer.levels):
                if L:
                    out[t] = (L, Fraction(0)) if L > 0 else (Fraction(0), -L)
        else:
            for idx, v in enumerate(self.outer.values):
                if v:
                    t = bin(idx).count("1")
                    p, q = out.get(t, (Fraction(0), Fraction(0)))
                    out[t] = (p + v, q) if v > 0 else (p, q - v)
        return out

    def _count_table(self, h: BoolFn | None, cap: int | None = None) -> dict:
        """{t: {(c1, c2, w): mass}}: outer level t, c1 blocks (+, b=-1), c2 blocks (-, b=-1), weight w."""
        if self.eta is not None:
            if h is not None and not _same_fn(h, self.fn):
                raise ValueError("statistic needs the modifier's block function")
            model = self.inner_model
        else:
            model = block_model(self.inner, h) if h is not None else block_model(self.inner, None)
        cats = model.cats()
        n = self.outer.n

        def factor(z):
            f: dict = {}
            for b in cats:
                e1 = 1 if (b == -1 and z == 1) else 0
                e2 = 1 if (b == -1 and z == -1) else 0
                if cap is None:
                    v = model.stat(z, b, model.zero)
                    if v:
                        f[(e1, e2, 0)] = f.get((e1, e2, 0), Fraction(0)) + v
                else:
                    for w, v in enumerate(model.wpoly(z, b, cap)):
                        if v:
                            f[(e1, e2, w)] = f.get((e1, e2, w), Fraction(0)) + v
            return f

        caps = (None, None, cap)
        fp, fm = factor(1), factor(-1)
        out = {}
        for t in self._outer_weights():
            out[t] = _pmul(_ppow(fp, n - t, 3, caps), _ppow(fm, t, 3, caps), caps)
        return out

    def l1(self):
        scale = 1 << self.outer.n
        P0 = abs(self.normalizer)
        total = Fraction(0)
        table = self._count_table(self.fn if self.eta is not None else None)
        for t, (p, q) in self._outer_weights().items():
            s = sum((v * abs(self.p_at_counts(c1, c2)) for (c1, c2, _), v in table[t].items()), Fraction(0))
            total += (p + q) * s
        return total * scale / P0

    def mass_upto(self, N: int) -> Fraction:
        scale = 1 << self.outer.n
        P0 = abs(self.normalizer)
        table = self._count_table(self.fn if self.eta is not None else None, cap=N)
        total = Fraction(0)
        for t, (p, q) in self._outer_weights().items():
            s = sum((v * abs(self.p_at_counts(c1, c2)) for (c1, c2, w), v in table[t].items() if w <= N),
                    Fraction(0))
            total += (p + q) * s
        return total * scale / P0

    def mass_above(self, N):
        return self.l1() - self.mass_upto(N)

    def category_masses(self, f):
        if not (isinstance(f, ComposedFn) and f.outer.profile() is not None and f.outer.arity == self.outer.n):
            return Witness.category_masses(self, f)
        if f.promise is not None and self.mass_above(f.promise) != 0:
            raise ValueError("witness puts mass outside the promise of the function")
        gprof = f.outer.profile()
        scale = 1 << self.outer.n
        P0 = self.normalizer
        table = self._count_table(f.inner)
        out: dict = {}
        for t, (p, q) in self._outer_weights().items():
            lf = scale
            for (c1, c2, _), v in table[t].items():
                pv = self.p_at_counts(c1, c2) / P0
                if pv == 0:
                    continue
                b = gprof[c1 + c2]
                for zo, mass in ((1, p), (-1, q)):
                    if mass:
                        key = (zo * sgn(pv), b)
                        out[key] = out.get(key, Fraction(0)) + mass * lf * v * abs(pv)
        return out

    def conditional_expectation(self, t: int, g_outer: BoolFn | None = None) -> Fraction:
        """E_{mu_z}[p_eta(alpha) * G(fn(x_1), ...)] for any z of weight t (G = 1 if omitted).

        This is the unnormalised p_eta (not divided by the normaliser).
        """
        model = self.inner_model
        zero = model.zero
        table = self._count_table(self.fn)
        mp = model.stat(1, 1, zero) + model.stat(1, -1, zero)
        mm = model.stat(-1, 1, zero) + model.stat(-1, -1, zero)
        n = self.outer.n
        prof = g_outer.profile() if g_outer is not None else None
        if t not in table:
            table = {t: self._count_row(t)}
        total = Fraction(0)
        for (c1, c2, _), v in table[t].items():
            g = prof[c1 + c2] if prof is not None else 1
            total += v * self.p_at_counts(c1, c2) * g
        return total / (mp ** (n - t) * mm ** t)

    def _count_row(self, t):
        model = self.inner_model
        fp = {}
        fm = {}
        for b in (1, -1):
            v = model.stat(1, b, model.zero)
            if v:
                fp[(1 if b == -1 else 0, 0, 0)] = v
            v = model.stat(-1, b, model.zero)
            if v:
                fm[(0, 1 if b == -1 else 0, 0)] = v
        n = self.outer.n
        return _pmul(_ppow(fp, n - t, 3), _ppow(fm, t, 3))

    # -- moments
    @cached_property
    def _moment_model(self):
        return self.inner_model if self.eta is not None else block_model(self.inner, None)

    @property
    def symmetric(self) -> bool:
        return isinstance(self.outer, LevelWitness) and self._moment_model.symmetric

    def _signatures(self, degree):
        return _tuple_signatures(self._moment_model, self.outer.n, degree, self.symmetric)

    def _zero_sig(self):
        return (self._moment_model.zero,) * self.outer.n

    def signature_set(self, sig):
        m = self.inner.n
        out = []
        for i, s in enumerate(sig):
            out.extend(i * m + j for j in _child_set(self.inner, s))
        return tuple(out)

    @lru_cache(maxsize=None)
    def moment(self, sig):
        model = self._moment_model
        n = self.outer.n
        top = self.eta if self.eta is not None else 0
        cats = model.cats()
        scale = 1 << n

        def factor(zi, s, tag_outer):
            f: dict = {}
            for b in cats:
                v = model.stat(zi, b, s)
                if not v:
                    continue
                xo = 1 if (tag_outer and zi == -1) else 0
                f[(xo, 0)] = f.get((xo, 0), Fraction(0)) + v
                u = self._u(zi, b) if self.eta is not None else 0
                if u and top > 0:
                    f[(xo, 1)] = f.get((xo, 1), Fraction(0)) + v * u
            return f

        caps = (None, top)
        total = Fraction(0)
        if isinstance(self.outer, LevelWitness):
            poly = {(0, 0): Fraction(1)}
            for i in range(n):
                fz = factor(1, sig[i], True)
                for e, v in factor(-1, sig[i], True).items():
                    fz[e] = fz.get(e, Fraction(0)) + v
                poly = _pmul(poly, fz, caps)
            for (t, j), v in poly.items():
                L = self.outer.levels[t]
                if L:
                    total += L / binom(n, t) * self._ecoeffs[j] * v
        else:
            for idx, val in enumerate(self.outer.values):
                if val == 0:
                    continue
                wz = point_of(idx, n)
                poly = {(0, 0): Fraction(1)}
                for i in range(n):
                    poly = _pmul(poly, factor(wz[i], sig[i], False), caps)
                total += val * sum((self._ecoeffs[j] * v for (_, j), v in poly.items()), Fraction(0))
        return total * scale / self.normalizer


def _child_set(w: Witness, s) -> tuple:
    if isinstance(w, LevelWitness):
        return tuple(range(s))
    if isinstance(w, DenseWitness):
        return tuple(i for i in range(w.n) if (s >> i) & 1)
    if isinstance(w, ComposedWitness):
        return w.signature_set(s)
    raise ValueError("unsupported witness")


def _same_fn(a: BoolFn, b: BoolFn) -> bool:
    return a is b or (a.arity == b.arity and a.spec == b.spec and a.spec != "dense") or a == b


# ----------------------------------------------------------------- operations

def phd(psi: Witness, limit: int | None = None):
    return psi.phd(limit)


def correlation(f: BoolFn, psi: Witness) -> Fraction:
    if f.arity != psi.n:
        raise ValueError("arity mismatch between function and witness")
    cm = psi.category_masses(f)
    return sum((z * b * v for (z, b), v in cm.items()), Fraction(0))


def error_rates(f: BoolFn, psi: Witness) -> ErrorRates:
    if psi.l1() != 1:
        raise ValueError("error rates need a normalised witness")
    return _rates_from_masses(psi.category_masses(f))


def alpha_classify(f: BoolFn, psi: Witness):
    """(alpha as a function of the input, BlockStats) for the pair (f, psi)."""
    if psi.l1() != 1:
        raise ValueError("alpha needs a normalised witness")
    if psi.total() != 0:
        raise ValueError("alpha needs phd >= 1")
    cm = psi.category_masses(f)
    rates = _rates_from_masses(cm)
    masses = {}
    for z in (1, -1):
        tot = cm.get((z, 1), Fraction(0)) + cm.get((z, -1), Fraction(0))
        for b in (1, -1):
            cat = "agree" if b == z else "disagree"
            masses[(z, cat)] = cm.get((z, b), Fraction(0)) / tot if tot else Fraction(0)
    stats = BlockStats(masses, rates.eps_plus, rates.eps_minus)

    def alpha(x):
        v = psi.value(x)
        z = sgn(v)
        return stats.alpha_of(z, f(x) == z)

    return alpha, stats


def _check_normalised(w: Witness, what: str, need_phd: bool = False):
    if w.l1() != 1:
        raise ValueError(f"{what} must have l1 norm 1")
    if need_phd and w.total() != 0:
        raise ValueError(f"{what} must have phd >= 1")


def dbc(theta: Witness, psi: Witness, check: bool = True) -> ComposedWitness:
    if check:
        _check_normalised(theta, "outer witness")
        _check_normalised(psi, "inner witness", need_phd=True)
    return ComposedWitness(theta, psi)


def modified_compose(zeta: Witness, xi: Witness, f: BoolFn, eta: int, check: bool = True) -> ComposedWitness:
    if check:
        _check_normalised(zeta, "outer witness")
        _check_normalised(xi, "inner witness", need_phd=True)
    if f.arity != xi.n:
        raise ValueError("block function arity must match the inner witness")
    w = ComposedWitness(zeta, xi, f, eta)
    if w.inner_rates.eps > 1:
        raise ValueError("eps+ + eps- must be at most 1 so that alpha stays in [-1, 1]")
    if w.normalizer <= 0:
        raise ValueError("p_eta(1 - 2 eps+, ...) must be positive")
    return w


def composed_moments(w: Witness, targets) -> dict:
    """Aggregated statistics. Targets: 'l1', 'total', ('corr', f), ('mass_above', N),
    ('moments_below', d), ('moment', sig)."""
    out = {}
    for tgt in targets:
        if tgt == "l1":
            out["l1"] = w.l1()
        elif tgt == "total":
            out["total"] = w.total()
        elif isinstance(tgt, tuple) and tgt[0] == "corr":
            out[("corr", tgt[1].spec)] = correlation(tgt[1], w)
        elif isinstance(tgt, tuple) and tgt[0] == "mass_above":
            out[tgt] = w.mass_above(tgt[1])
        elif isinstance(tgt, tuple) and tgt[0] == "moments_below":
            out[tgt] = w.moments_below(tgt[1])
        elif isinstance(tgt, tuple) and tgt[0] == "moment":
            out[tgt] = w.moment(tgt[1])
        else:
            raise ValueError(f"unsupported target {tgt!r}")
    return out


def inner_product(a: Witness, b: Witness) -> Fraction:
    """Dense inner product (small instances only)."""
    return sum((x * y for x, y in zip(a.dense_values(), b.dense_values())), Fraction(0))


# ------------------------------------------------------ orbit restrictions

def witness_shape(w: Witness):
    """Nested block shape under which w is invariant, or None."""
    if isinstance(w, LevelWitness):
        return (w.n,)
    if isinstance(w, OrbitWitness):
        return w.shape
    if isinstance(w, ComposedWitness) and isinstance(w.outer, LevelWitness):
        inner = witness_shape(w.inner)
        if inner is None:
            return None
        if w.fn is not None and symmetric_structure(w.fn) != list(inner):
            return None
        return (w.outer.n,) + tuple(inner)
    return None


def orbit_masses(w: Witness, shape: tuple, max_weight: int) -> OrbitWitness:
    """The part of w on orbits of weight <= max_weight, as an orbit witness."""
    out = {}
    for o in orb.orbits(shape, max_weight):
        v = w.value(orb.representative(shape, o))
        if v:
            out[o] = v * orb.size(shape, o)
    return OrbitWitness(shape, out)


@dataclass(frozen=True, eq=False)
class PatchedWitness(Witness):
    """Equal to base on inputs of weight > N and to low (an orbit witness) below."""

    base: Witness
    N: int
    low: OrbitWitness
    tag = "patched"

    @property
    def n(self):
        return self.base.n

    @cached_property
    def base_low(self) -> OrbitWitness:
        return orbit_masses(self.base, self.low.shape, self.N)

    def value(self, x):
        return self.base.value(x) if weight(x) > self.N else self.low.value(x)

    def high_mass(self) -> Fraction:
        return self.base.mass_above(self.N)

    def l1(self):
        return self.low.l1() + self.high_mass()

    def mass_above(self, M):
        if M >= self.N:
            return self.base.mass_above(M)
        return self.high_mass() + self.low.mass_above(M)

    def _signatures(self, degree):
        return self.low._signatures(degree)

    def _zero_sig(self):
        return self.low._zero_sig()

    def moment(self, sig):
        return self.low.moment(sig) + self.base.moment(sig) - self.base_low.moment(sig)

    def signature_set(self, sig):
        return self.low.signature_set(sig)
