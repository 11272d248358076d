"""Boolean functions on {-1,1}^n with -1 read as TRUE.

Points are plain tuples of +1/-1 ints. A point's weight is its number of -1
entries. Functions are immutable; promise-restricted functions refuse to
evaluate above their weight bound.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from itertools import combinations, product
from math import ceil, log2
from typing import Iterator, Sequence

from kdist.exact import binom

DENSE_CAP = 24

SignVector = tuple  # tuple of +1/-1 ints


class OutOfPromise(ValueError):
    pass


class SpecError(ValueError):
    pass


def check_signs(x: Sequence[int]) -> tuple:
    x = tuple(x)
    for v in x:
        if v != 1 and v != -1:
            raise ValueError(f"sign vector entry {v!r} is not +1/-1")
    return x


def weight(x: Sequence[int]) -> int:
    return sum(1 for v in x if v == -1)


def index_of(x: Sequence[int]) -> int:
    """Bit i of the index is set iff x[i] = -1."""
    idx = 0
    for i, v in enumerate(x):
        if v == -1:
            idx |= 1 << i
    return idx


def point_of(idx: int, n: int) -> tuple:
    return tuple(-1 if (idx >> i) & 1 else 1 for i in range(n))


def all_points(n: int) -> Iterator[tuple]:
    for idx in range(1 << n):
        yield point_of(idx, n)


def points_upto(n: int, bound: int | None) -> Iterator[tuple]:
    """All points of weight <= bound, grouped by weight."""
    top = n if bound is None else min(bound, n)
    for w in range(top + 1):
        for ones in combinations(range(n), w):
            x = [1] * n
            for i in ones:
                x[i] = -1
            yield tuple(x)


def promise_size(n: int, bound: int | None) -> int:
    top = n if bound is None else min(bound, n)
    return sum(binom(n, w) for w in range(top + 1))


class BoolFn:
    """Base class; subclasses implement _eval on in-promise points."""

    arity: int
    promise: int | None
    spec: str

    def __call__(self, x: Sequence[int]) -> int:
        x = check_signs(x)
        if len(x) != self.arity:
            raise ValueError(f"expected {self.arity} signs, got {len(x)}")
        if not self.in_promise(x):
            raise OutOfPromise(f"{self.spec}: input of weight {weight(x)} is outside the promise")
        return self._eval(x)

    def _eval(self, x: tuple) -> int:
        raise NotImplementedError

    def in_promise(self, x: Sequence[int]) -> bool:
        return self.promise is None or weight(x) <= self.promise

    def domain(self) -> Iterator[tuple]:
        return points_upto(self.arity, self.promise)

    def domain_size(self) -> int:
        return promise_size(self.arity, self.promise)

    @property
    def total(self) -> bool:
        return self.promise is None or self.promise >= self.arity

    def profile(self) -> tuple | None:
        """Weight profile if the function is symmetric, else None."""
        return None

    def truth_table(self) -> tuple:
        """Values indexed by index_of(x); out-of-promise entries are None."""
        if self.arity > DENSE_CAP:
            raise ValueError(f"dense table capped at arity {DENSE_CAP}")
        return tuple(self._eval(point_of(i, self.arity)) if self.in_promise(point_of(i, self.arity)) else None
                     for i in range(1 << self.arity))


@dataclass(frozen=True)
class SymmetricFn(BoolFn):
    arity: int
    values: tuple  # value at each weight 0..arity
    promise: int | None = None
    spec: str = ""
    boolean: bool = True  # False for 0/1 indicators such as EXACT

    def _eval(self, x):
        return self.values[weight(x)]

    def profile(self):
        return self.values


@dataclass(frozen=True)
class DenseFn(BoolFn):
    arity: int
    table: tuple
    promise: int | None = None
    spec: str = "dense"

    def __post_init__(self):
        if self.arity > DENSE_CAP:
            raise ValueError(f"dense table capped at arity {DENSE_CAP}")
        if len(self.table) != 1 << self.arity:
            raise ValueError("table length must be 2^arity")

    def _eval(self, x):
        return self.table[index_of(x)]


@dataclass(frozen=True)
class ComposedFn(BoolFn):
    """outer(inner(block_1), ..., inner(block_n)) on disjoint consecutive blocks."""

    outer: BoolFn
    inner: BoolFn
    promise: int | None = None
    spec: str = ""

    @property
    def arity(self):
        return self.outer.arity * self.inner.arity

    @property
    def blocks(self) -> int:
        return self.outer.arity

    def in_promise(self, x):
        if self.promise is not None and weight(x) > self.promise:
            return False
        return all(self.inner.in_promise(b) for b in self.split(x))

    def domain(self):
        return (x for x in points_upto(self.arity, self.promise) if self.in_promise(x))

    def domain_size(self):
        if self.inner.total:
            return promise_size(self.arity, self.promise)
        return sum(1 for _ in self.domain())

    @property
    def total(self):
        return self.promise is None and self.inner.total

    def split(self, x: Sequence[int]) -> list[tuple]:
        m = self.inner.arity
        return [tuple(x[i * m:(i + 1) * m]) for i in range(self.outer.arity)]

    def _eval(self, x):
        return self.outer([self.inner(b) for b in self.split(x)])


@dataclass(frozen=True)
class DistFn(BoolFn):
    """k-distinctness on N items from [R], each item written in ceil(log2 R) bits."""

    k: int
    items: int
    R: int
    promise: int | None = None
    spec: str = ""

    @property
    def bits(self) -> int:
        return max(1, ceil(log2(self.R)))

    @property
    def arity(self):
        return self.items * self.bits

    def decode(self, x: Sequence[int]) -> list[int]:
        b = self.bits
        out = []
        for i in range(self.items):
            pattern = 0
            for j in range(b):
                if x[i * b + j] == -1:
                    pattern |= 1 << (b - 1 - j)
            out.append(pattern % self.R + 1)
        return out

    def encode(self, values: Sequence[int]) -> tuple:
        b = self.bits
        x = []
        for r in values:
            if not 1 <= r <= self.R:
                raise ValueError(f"item {r} outside [1, {self.R}]")
            x.extend(-1 if ((r - 1) >> (b - 1 - j)) & 1 else 1 for j in range(b))
        return tuple(x)

    def on_list(self, values: Sequence[int]) -> int:
        return self(self.encode(values))

    def _eval(self, x):
        counts: dict[int, int] = {}
        for r in self.decode(x):
            counts[r] = counts.get(r, 0) + 1
        return -1 if max(counts.values()) >= self.k else 1


def make_or(n: int) -> SymmetricFn:
    if n < 1:
        raise ValueError("OR needs arity >= 1")
    return SymmetricFn(n, tuple(1 if w == 0 else -1 for w in range(n + 1)), spec=f"OR:{n}")


def make_and(n: int) -> SymmetricFn:
    if n < 1:
        raise ValueError("AND needs arity >= 1")
    return SymmetricFn(n, tuple(-1 if w == n else 1 for w in range(n + 1)), spec=f"AND:{n}")


def make_thr(k: int, N: int) -> SymmetricFn:
    if not 1 <= k <= N:
        raise ValueError(f"THR needs 1 <= k <= N, got k={k}, N={N}")
    return SymmetricFn(N, tuple(-1 if w >= k else 1 for w in range(N + 1)), spec=f"THR:{k}:{N}")


def make_exact(i: int, N: int) -> SymmetricFn:
    if not 0 <= i <= N:
        raise ValueError(f"EXACT needs 0 <= i <= N, got i={i}, N={N}")
    return SymmetricFn(N, tuple(1 if w == i else 0 for w in range(N + 1)), spec=f"EXACT:{i}:{N}", boolean=False)


def exact_conjunctions(i: int, N: int) -> list[tuple[frozenset, frozenset]]:
    """EXACT^i_N as a sum of conjunctions: (A = coordinates forced to +1, B = forced to -1)."""
    if not 0 <= i <= N:
        raise ValueError(f"EXACT needs 0 <= i <= N, got i={i}, N={N}")
    full = frozenset(range(N))
    return [(full - frozenset(S), frozenset(S)) for S in combinations(range(N), i)]


def compose(g: BoolFn, h: BoolFn) -> ComposedFn:
    if not g.total:
        raise ValueError("outer function of a composition must be total")
    if g.arity * h.arity > 1 << 20:
        raise ValueError("composed arity overflow")
    spec = f"{g.spec} o {h.spec}" if isinstance(h, ComposedFn) or not isinstance(g, ComposedFn) else f"({g.spec}) o {h.spec}"
    return ComposedFn(g, h, spec=spec)


def restrict_weight(f: BoolFn, N: int) -> BoolFn:
    if N > f.arity or N < 0:
        raise ValueError(f"promise bound {N} outside [0, {f.arity}]")
    bound = N if f.promise is None else min(N, f.promise)
    return replace(f, promise=bound, spec=f"{f.spec} <={N}")


def make_dist(k: int, N: int, R: int) -> DistFn:
    if R < 2:
        raise ValueError("DIST needs R >= 2")
    if not 1 <= k <= N:
        raise ValueError(f"DIST needs 1 <= k <= N, got k={k}, N={N}")
    return DistFn(k, N, R, spec=f"DIST:{k}:{N}:{R}")


def dense_of(f: BoolFn) -> DenseFn:
    return DenseFn(f.arity, f.truth_table(), f.promise, spec=f.spec)


_ATOM = re.compile(r"^(OR|AND|THR|EXACT|DIST)((?::\d+)+)(?:<=(\d+))?$")


def _atom(text: str) -> BoolFn:
    m = _ATOM.match(text)
    if not m:
        raise SpecError(f"cannot parse function atom {text!r}")
    name, args, bound = m.group(1), [int(a) for a in m.group(2)[1:].split(":")], m.group(3)
    want = {"OR": 1, "AND": 1, "THR": 2, "EXACT": 2, "DIST": 3}[name]
    if len(args) != want:
        raise SpecError(f"{name} takes {want} parameter(s), got {len(args)}")
    try:
        f = {"OR": make_or, "AND": make_and, "THR": make_thr, "EXACT": make_exact, "DIST": make_dist}[name](*args)
    except ValueError as e:
        raise SpecError(str(e)) from e
    if bound is not None:
        f = restrict_weight(f, int(bound))
    return f


def parse_spec(text: str) -> BoolFn:
    """Parse e.g. 'OR:2 o THR:2:4 <=4'.

    A trailing ' <=N' (space-separated) restricts the whole composed input;
    an attached suffix ('THR:2:4<=2') restricts that block only.
    Composition associates to the right.
    """
    text = text.strip().replace("∘", " o ")
    m = re.search(r"\s<=(\d+)$", text)
    bound = None
    if m:
        bound = int(m.group(1))
        text = text[:m.start()].strip()
    parts = [p.strip() for p in re.split(r"\s+o\s+", text)]
    if not parts or any(not p for p in parts):
        raise SpecError(f"empty component in {text!r}")
    f = _atom(parts[-1])
    for p in reversed(parts[:-1]):
        g = _atom(p)
        if not g.total:
            raise SpecError("only the innermost function may carry a promise")
        f = compose(g, f)
    if bound is not None:
        try:
            f = restrict_weight(f, bound)
        except ValueError as e:
            raise SpecError(str(e)) from e
    return f


def symmetric_structure(f: BoolFn):
    """Nested block structure under which f is invariant, or None.

    Returns a list of block counts from the outside in, ending with the leaf
    arity; e.g. OR:2 o THR:2:3 gives [2, 3].
    """
    if isinstance(f, SymmetricFn):
        return [f.arity]
    if isinstance(f, ComposedFn) and isinstance(f.outer, SymmetricFn):
        rest = symmetric_structure(f.inner)
        if rest is not None:
            return [f.outer.arity] + rest
    return None


def enumerate_lists(N: int, R: int) -> Iterator[tuple]:
    return product(range(1, R + 1), repeat=N)
