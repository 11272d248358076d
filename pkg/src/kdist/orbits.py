"""Orbits of the nested block-permutation group.

A shape (n_1, ..., n_r, m) describes n_1 outer blocks, each made of n_2
blocks, ..., down to leaves of m bits. The group permutes bits inside a leaf
and blocks inside their parent. An orbit is a leaf weight (int) at the
bottom level and a sorted tuple of child orbits above it. The same objects
index character-sum classes: a set T of coordinates is described by the
orbit of its indicator point, which we call its signature.
"""
from __future__ import annotations

from collections import Counter
from functools import lru_cache
from math import factorial
from typing import Iterator

from kdist.exact import binom
from kdist.poly import level_char_sum


def arity(shape: tuple) -> int:
    out = 1
    for s in shape:
        out *= s
    return out


def zero(shape: tuple):
    if len(shape) == 1:
        return 0
    return (zero(shape[1:]),) * shape[0]


def weight(shape: tuple, o) -> int:
    if len(shape) == 1:
        return o
    return sum(weight(shape[1:], c) for c in o)


def _arrangements(counter: Counter) -> int:
    total = sum(counter.values())
    out = factorial(total)
    for v in counter.values():
        out //= factorial(v)
    return out


@lru_cache(maxsize=None)
def size(shape: tuple, o) -> int:
    if len(shape) == 1:
        return binom(shape[0], o)
    out = _arrangements(Counter(o))
    for c in o:
        out *= size(shape[1:], c)
    return out


@lru_cache(maxsize=None)
def with_weight(shape: tuple, w: int) -> tuple:
    """All orbits of total weight exactly w, in a fixed order."""
    if len(shape) == 1:
        return (w,) if 0 <= w <= shape[0] else ()
    n, rest = shape[0], shape[1:]
    pool = []  # (weight, child orbit), child weights >= 1
    for cw in range(1, w + 1):
        pool.extend((cw, c) for c in with_weight(rest, cw))
    z = zero(rest)
    out = []

    def rec(start, remaining, slots, acc):
        if remaining == 0:
            out.append(tuple(sorted(acc + [z] * slots)))
            return
        if slots == 0:
            return
        for i in range(start, len(pool)):
            cw, c = pool[i]
            if cw <= remaining:
                rec(i, remaining - cw, slots - 1, acc + [c])

    rec(0, w, n, [])
    return tuple(sorted(set(out)))


def orbits(shape: tuple, max_weight: int | None = None) -> Iterator:
    top = arity(shape) if max_weight is None else min(max_weight, arity(shape))
    for w in range(top + 1):
        yield from with_weight(shape, w)


def orbit_of(shape: tuple, x) -> object:
    if len(shape) == 1:
        return sum(1 for v in x if v == -1)
    m = arity(shape[1:])
    return tuple(sorted(orbit_of(shape[1:], x[i * m:(i + 1) * m]) for i in range(shape[0])))


def representative(shape: tuple, o) -> tuple:
    if len(shape) == 1:
        return tuple([-1] * o + [1] * (shape[0] - o))
    out: list[int] = []
    for c in o:
        out.extend(representative(shape[1:], c))
    return tuple(out)


@lru_cache(maxsize=None)
def char_sum(shape: tuple, o, sig) -> object:
    """sum of chi_T(x) over x in orbit o, for a set T with signature sig.

    Exact rational (an integer in fact). Slots with an empty signature
    contribute the child orbit size, so only the few nonzero slots are
    enumerated explicitly.
    """
    if len(shape) == 1:
        return level_char_sum(sig, o, shape[0])
    rest = shape[1:]
    z = zero(rest)
    active = [s for s in sig if s != z]
    pool = Counter(o)

    def rec(i, pool):
        if i == len(active):
            out = _arrangements(pool)
            for c, k in pool.items():
                out *= size(rest, c) ** k
            return out
        total = 0
        for c in list(pool):
            if pool[c] == 0:
                continue
            v = char_sum(rest, c, active[i])
            if v == 0:
                continue
            pool[c] -= 1
            if pool[c] == 0:
                del pool[c]
            total += v * rec(i + 1, pool)
            pool[c] += 1
        return total

    return rec(0, pool)


def signatures(shape: tuple, degree: int) -> tuple:
    return with_weight(shape, degree)
