"""Exact polynomial engines: Fourier expansions, univariate and Chebyshev
polynomials, symmetric multilinear profiles (p_eta), conjunction bookkeeping."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from kdist.exact import binom, frac

FOURIER_CAP = 12
RHO_EXACT_CAP = 8


# ---------------------------------------------------------------- multilinear

@dataclass(frozen=True)
class MultilinearPoly:
    """sum_S coeff[S] * prod_{i in S} x_i, S a frozenset of coordinates."""

    n: int
    coeffs: Mapping[frozenset, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {frozenset(S): frac(v) for S, v in self.coeffs.items() if v != 0}
        object.__setattr__(self, "coeffs", clean)

    @property
    def degree(self) -> int:
        return max((len(S) for S in self.coeffs), default=-1)

    def l1(self) -> Fraction:
        return sum((abs(v) for v in self.coeffs.values()), Fraction(0))

    def __call__(self, y: Sequence) -> Fraction:
        y = [frac(v) for v in y]
        total = Fraction(0)
        for S, c in self.coeffs.items():
            t = c
            for i in S:
                t *= y[i]
            total += t
        return total

    def __add__(self, other: "MultilinearPoly") -> "MultilinearPoly":
        out = dict(self.coeffs)
        for S, v in other.coeffs.items():
            out[S] = out.get(S, Fraction(0)) + v
        return MultilinearPoly(max(self.n, other.n), out)

    def scale(self, a) -> "MultilinearPoly":
        a = frac(a)
        return MultilinearPoly(self.n, {S: a * v for S, v in self.coeffs.items()})

    def mul_on_cube(self, other: "MultilinearPoly") -> "MultilinearPoly":
        """Product reduced with x_i^2 = 1, i.e. equal to the product on the hypercube."""
        out: dict[frozenset, Fraction] = {}
        for S, a in self.coeffs.items():
            for T, b in other.coeffs.items():
                U = S ^ T
                out[U] = out.get(U, Fraction(0)) + a * b
        return MultilinearPoly(max(self.n, other.n), out)

    def sorted_items(self) -> list[tuple[tuple, Fraction]]:
        return sorted(((tuple(sorted(S)), v) for S, v in self.coeffs.items()), key=lambda t: (len(t[0]), t[0]))


def walsh_hadamard(values: list) -> list:
    """Unnormalised transform: out[S] = sum_x values[x] * chi_S(x), index bits as in boolfn.index_of."""
    a = list(values)
    h = 1
    n = len(a)
    while h < n:
        for i in range(0, n, 2 * h):
            for j in range(i, i + h):
                u, v = a[j], a[j + h]
                a[j], a[j + h] = u + v, u - v
        h *= 2
    return a


def _dense_values(f, n: int) -> list[Fraction]:
    from kdist.boolfn import point_of
    if hasattr(f, "dense_values"):
        return [frac(v) for v in f.dense_values()]
    out = []
    for idx in range(1 << n):
        v = f(point_of(idx, n))
        out.append(frac(v))
    return out


def fourier_expand(f, n: int | None = None, cap: int = FOURIER_CAP) -> MultilinearPoly:
    """Exact Fourier coefficients of a total function (BoolFn or witness) on {-1,1}^n."""
    n = f.arity if n is None else n
    if n > cap:
        raise ValueError(f"Fourier expansion capped at arity {cap}")
    if getattr(f, "promise", None) is not None and f.promise < n:
        raise ValueError("Fourier expansion needs a total function")
    vals = _dense_values(f, n)
    spec = walsh_hadamard(vals)
    scale = Fraction(1, 1 << n)
    coeffs = {}
    for idx, v in enumerate(spec):
        if v != 0:
            coeffs[frozenset(i for i in range(n) if (idx >> i) & 1)] = v * scale
    return MultilinearPoly(n, coeffs)


def fourier_degree(values: list, n: int) -> int:
    """Largest |S| with a nonzero coefficient (-1 for the zero function)."""
    spec = walsh_hadamard(values)
    return max((bin(i).count("1") for i, v in enumerate(spec) if v != 0), default=-1)


# ----------------------------------------------------------------- univariate

@dataclass(frozen=True)
class UnivariatePoly:
    coeffs: tuple = (Fraction(0),)  # power basis, constant first

    def __post_init__(self):
        c = [frac(v) for v in self.coeffs] or [Fraction(0)]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return -1 if self.coeffs == (0,) else len(self.coeffs) - 1

    def __call__(self, x) -> Fraction:
        x = frac(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "UnivariatePoly") -> "UnivariatePoly":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return UnivariatePoly(tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)))

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, a) -> "UnivariatePoly":
        a = frac(a)
        return UnivariatePoly(tuple(a * c for c in self.coeffs))

    def __mul__(self, other: "UnivariatePoly") -> "UnivariatePoly":
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UnivariatePoly(tuple(out))

    def compose_affine(self, a, b) -> "UnivariatePoly":
        """x -> self(a*x + b)."""
        lin = UnivariatePoly((frac(b), frac(a)))
        acc = UnivariatePoly((0,))
        for c in reversed(self.coeffs):
            acc = acc * lin + UnivariatePoly((c,))
        return acc

    def coeff_l1(self) -> Fraction:
        return sum((abs(c) for c in self.coeffs), Fraction(0))


def chebyshev(d: int) -> UnivariatePoly:
    if d < 0:
        raise ValueError("Chebyshev degree must be >= 0")
    prev, cur = UnivariatePoly((1,)), UnivariatePoly((0, 1))
    if d == 0:
        return prev
    two_x = UnivariatePoly((0, 2))
    for _ in range(d - 1):
        prev, cur = cur, two_x * cur - prev
    return cur


def interpolate_newton(values: Sequence) -> UnivariatePoly:
    """Polynomial through (0, v_0), ..., (n, v_n), built from forward differences."""
    diffs = [frac(v) for v in values]
    fd = []
    while diffs:
        fd.append(diffs[0])
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
    acc = UnivariatePoly((0,))
    falling = UnivariatePoly((1,))
    for j, c in enumerate(fd):
        # falling = x(x-1)...(x-j+1)/j!
        acc = acc + falling.scale(c)
        falling = (falling * UnivariatePoly((-j, 1))).scale(Fraction(1, j + 1))
    return acc


def alternating_binomial_sum(values: Sequence) -> Fraction:
    """sum_i (-1)^i C(N, i) values[i] with N = len(values) - 1."""
    N = len(values) - 1
    return sum((Fraction((-1) ** i * binom(N, i)) * frac(v) for i, v in enumerate(values)), Fraction(0))


def krawtchouk(s: int, t: int, n: int) -> int:
    """sum of chi_T(x) over all |T| = s, for any fixed x of weight t."""
    return sum((-1) ** j * binom(t, j) * binom(n - t, s - j) for j in range(min(s, t) + 1))


def level_char_sum(s: int, t: int, n: int) -> Fraction:
    """sum of chi_T(x) over all x of weight t, for any fixed |T| = s."""
    return Fraction(binom(n, t) * krawtchouk(s, t, n), binom(n, s))


def symmetrize(p: MultilinearPoly) -> UnivariatePoly:
    """q with q(w) = average of p over all points of weight w."""
    n = p.n
    by_size: dict[int, Fraction] = {}
    for S, c in p.coeffs.items():
        by_size[len(S)] = by_size.get(len(S), Fraction(0)) + c
    vals = [sum((c * Fraction(krawtchouk(s, w, n), binom(n, s)) for s, c in by_size.items()), Fraction(0))
            for w in range(n + 1)]
    return interpolate_newton(vals)


# ------------------------------------------------------ symmetric multilinear

@dataclass(frozen=True)
class SymmetricMultilinear:
    """Symmetric function given by its value at each weight 0..n, read as the
    unique multilinear polynomial agreeing with it on the hypercube."""

    n: int
    profile: tuple

    def __post_init__(self):
        if len(self.profile) != self.n + 1:
            raise ValueError("profile needs n + 1 entries")
        object.__setattr__(self, "profile", tuple(frac(v) for v in self.profile))

    def __call__(self, x: Sequence[int]) -> Fraction:
        return self.profile[sum(1 for v in x if v == -1)]

    def elementary_coeffs(self) -> list[Fraction]:
        """c_j with p = sum_j c_j e_j(u), u_i = (1 - x_i)/2 (finite differences of the profile)."""
        return [sum((Fraction((-1) ** (j - i) * binom(j, i)) * self.profile[i] for i in range(j + 1)), Fraction(0))
                for j in range(self.n + 1)]

    @property
    def degree(self) -> int:
        c = self.elementary_coeffs()
        return max((j for j, v in enumerate(c) if v != 0), default=-1)

    def at_reals(self, y: Sequence) -> Fraction:
        return eval_symmetric_at_reals(self, y)

    def at_uniform(self, u) -> Fraction:
        """Value at the constant vector (1 - 2u, ..., 1 - 2u)."""
        u = frac(u)
        return sum((c * binom(self.n, j) * u ** j for j, c in enumerate(self.elementary_coeffs())), Fraction(0))


def elementary_symmetric(u: Sequence, top: int) -> list[Fraction]:
    """e_0..e_top of the entries of u by the product recurrence."""
    e = [Fraction(1)] + [Fraction(0)] * top
    for v in u:
        for j in range(top, 0, -1):
            e[j] += e[j - 1] * v
    return e


def eval_symmetric_at_reals(p: SymmetricMultilinear, y: Sequence) -> Fraction:
    y = [frac(v) for v in y]
    if len(y) != p.n:
        raise ValueError(f"expected {p.n} coordinates")
    for v in y:
        if v < -1 or v > 1:
            raise ValueError(f"coordinate {v} outside [-1, 1]")
    c = p.elementary_coeffs()
    top = max((j for j, v in enumerate(c) if v != 0), default=0)
    e = elementary_symmetric([(1 - v) / 2 for v in y], top)
    return sum((c[j] * e[j] for j in range(top + 1)), Fraction(0))


def build_p_eta(eta: int, n: int) -> SymmetricMultilinear:
    """(-1)^eta prod_{i=1..eta} (|z| - i): vanishes on weights 1..eta, eta! at weight 0."""
    if eta < 0 or eta % 2:
        raise ValueError(f"eta must be even and >= 0, got {eta}")
    if eta >= n:
        raise ValueError(f"eta must be below the arity, got eta={eta}, n={n}")
    prof = []
    for w in range(n + 1):
        v = 1
        for i in range(1, eta + 1):
            v *= w - i
        prof.append(Fraction((-1) ** eta * v))
    return SymmetricMultilinear(n, tuple(prof))


def p_eta_l1_bound(eta: int, n: int) -> int:
    return factorial(eta) * binom(n + eta, eta)


def expand_symmetric(p: SymmetricMultilinear) -> MultilinearPoly:
    """Explicit Fourier expansion of a symmetric profile (n <= FOURIER_CAP)."""
    if p.n > FOURIER_CAP:
        raise ValueError(f"Fourier expansion capped at arity {FOURIER_CAP}")
    from kdist.boolfn import point_of
    vals = [p(point_of(i, p.n)) for i in range(1 << p.n)]
    spec = walsh_hadamard(vals)
    scale = Fraction(1, 1 << p.n)
    return MultilinearPoly(p.n, {frozenset(i for i in range(p.n) if (idx >> i) & 1): v * scale
                                 for idx, v in enumerate(spec) if v != 0})


# --------------------------------------------------------------- conjunctions

def conj_value(A: Iterable[int], B: Iterable[int], x: Sequence[int]) -> int:
    """prod_{i in A} (1 + x_i)/2 * prod_{j in B} (1 - x_j)/2 on a sign vector."""
    for i in A:
        if x[i] != 1:
            return 0
    for j in B:
        if x[j] != -1:
            return 0
    return 1


@dataclass(frozen=True)
class ConjunctionComb:
    """sum C_{A,B} * conj(A, B) with a tracked upper bound on the conjunction norm."""

    n: int
    terms: Mapping[tuple, Fraction] = field(default_factory=dict)
    bound: Fraction | None = None

    def __post_init__(self):
        clean: dict[tuple, Fraction] = {}
        for (A, B), v in self.terms.items():
            key = (frozenset(A), frozenset(B))
            clean[key] = clean.get(key, Fraction(0)) + frac(v)
        clean = {k: v for k, v in clean.items() if v != 0 and not (k[0] & k[1])}
        object.__setattr__(self, "terms", clean)
        l1 = sum((abs(v) for v in clean.values()), Fraction(0))
        object.__setattr__(self, "bound", l1 if self.bound is None else max(frac(self.bound), l1))

    @classmethod
    def constant(cls, n: int, a) -> "ConjunctionComb":
        return cls(n, {(frozenset(), frozenset()): frac(a)})

    def l1(self) -> Fraction:
        return sum((abs(v) for v in self.terms.values()), Fraction(0))

    def __call__(self, x: Sequence[int]) -> Fraction:
        return sum((v for (A, B), v in self.terms.items() if conj_value(A, B, x)), Fraction(0))

    def __add__(self, other: "ConjunctionComb") -> "ConjunctionComb":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return ConjunctionComb(max(self.n, other.n), out, self.bound + other.bound)

    def scale(self, a) -> "ConjunctionComb":
        a = frac(a)
        return ConjunctionComb(self.n, {k: a * v for k, v in self.terms.items()}, abs(a) * self.bound)

    def __mul__(self, other: "ConjunctionComb") -> "ConjunctionComb":
        out: dict[tuple, Fraction] = {}
        for (A, B), a in self.terms.items():
            for (C, D), b in other.terms.items():
                k = (A | C, B | D)
                if k[0] & k[1]:
                    continue  # contradictory literals: identically zero
                out[k] = out.get(k, Fraction(0)) + a * b
        return ConjunctionComb(max(self.n, other.n), out, self.bound * other.bound)

    def shift(self, offset: int, n: int) -> "ConjunctionComb":
        """Relabel coordinates i -> i + offset inside an arity-n ambient space."""
        return ConjunctionComb(n, {(frozenset(i + offset for i in A), frozenset(j + offset for j in B)): v
                                   for (A, B), v in self.terms.items()}, self.bound)


def rho_upper(c: ConjunctionComb) -> Fraction:
    return c.bound


def rho_exact(f, n: int | None = None) -> Fraction:
    """Minimum l1 over all representations in the 3^n disjoint-conjunction basis, by LP."""
    from kdist.boolfn import point_of
    from kdist.lp import LPInstance, solve
    n = f.arity if n is None else n
    if n > RHO_EXACT_CAP:
        raise ValueError(f"rho_exact capped at arity {RHO_EXACT_CAP}")
    vals = _dense_values(f, n)
    pairs = []
    for code in range(3 ** n):
        A, B, c = [], [], code
        for i in range(n):
            c, r = divmod(c, 3)
            if r == 1:
                A.append(i)
            elif r == 2:
                B.append(i)
        pairs.append((tuple(A), tuple(B)))
    lp = LPInstance(note=f"conjunction norm, arity {n}")
    plus = [lp.add_var() for _ in pairs]
    minus = [lp.add_var() for _ in pairs]
    for idx in range(1 << n):
        x = point_of(idx, n)
        row = {}
        for j, (A, B) in enumerate(pairs):
            if conj_value(A, B, x):
                row[plus[j]] = 1
                row[minus[j]] = -1
        lp.add_row(row, "==", vals[idx])
    lp.set_objective({v: 1 for v in plus + minus}, "min")
    sol = solve(lp)
    return sol.objective
