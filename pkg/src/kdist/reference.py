"""Brute-force reference implementations straight from the definitions.

Everything here works on explicit value tables over {-1,1}^n (index bit i
set iff x_i = -1) and shares no code with the structured witness engine, so
agreement between the two is a genuine cross-check. Only for small arity.
"""
from __future__ import annotations

from fractions import Fraction

from kdist.exact import binom

REF_CAP = 16


def _check(n: int):
    if n > REF_CAP:
        raise ValueError(f"reference enumeration capped at {REF_CAP} bits")


def points(n: int):
    _check(n)
    for idx in range(1 << n):
        yield idx, tuple(-1 if (idx >> i) & 1 else 1 for i in range(n))


def sign(v) -> int:
    return -1 if v < 0 else 1


def l1(vals) -> Fraction:
    return sum((abs(v) for v in vals), Fraction(0))


def char(idx_S: int, idx_x: int) -> int:
    return -1 if bin(idx_S & idx_x).count("1") % 2 else 1


def moment(vals, S: int) -> Fraction:
    return sum((v * char(S, x) for x, v in enumerate(vals) if v), Fraction(0))


def spectrum(vals) -> list:
    """All correlations <vals, chi_S> by the in-place butterfly."""
    a = list(vals)
    h = 1
    while h < len(a):
        for i in range(0, len(a), 2 * h):
            for j in range(i, i + h):
                a[j], a[j + h] = a[j] + a[j + h], a[j] - a[j + h]
        h *= 2
    return a


def phd(vals, n: int):
    """Least |S| with a nonzero correlation against chi_S (None if all vanish)."""
    degs = [bin(S).count("1") for S, v in enumerate(spectrum(vals)) if v != 0]
    return min(degs) if degs else None


def table(fn, n: int) -> list:
    return [fn(x) for _, x in points(n)]


def split(x, blocks: int):
    m = len(x) // blocks
    return [x[i * m:(i + 1) * m] for i in range(blocks)]


def index(x) -> int:
    return sum(1 << i for i, v in enumerate(x) if v == -1)


def dbc(outer, n: int, inner, m: int) -> list:
    """(outer * inner)(x) = 2^n outer(sgn inner(x_1), ...) prod |inner(x_i)|."""
    out = []
    for _, x in points(n * m):
        blocks = split(x, n)
        vs = [inner[index(b)] for b in blocks]
        z = tuple(sign(v) for v in vs)
        prod = Fraction(1 << n)
        for v in vs:
            prod *= abs(v)
        out.append(outer[index(z)] * prod)
    return out


def rates(vals, fvals) -> dict:
    """delta/eps by direct sums: false positive = psi > 0 where f = -1."""
    pos = sum((v for v in vals if v > 0), Fraction(0))
    neg = sum((-v for v in vals if v < 0), Fraction(0))
    dp = sum((v for v, f in zip(vals, fvals) if v > 0 and f == -1), Fraction(0))
    dm = sum((-v for v, f in zip(vals, fvals) if v < 0 and f == 1), Fraction(0))
    return {"delta_plus": dp, "delta_minus": dm, "eps_plus": dp / pos if pos else Fraction(0),
            "eps_minus": dm / neg if neg else Fraction(0), "pos": pos, "neg": neg}


def alpha_table(vals, fvals) -> list:
    """alpha(x) per point: +-1 on the positive side, a- or 1 on the negative side."""
    r = rates(vals, fvals)
    ep, em = r["eps_plus"], r["eps_minus"]
    a_minus = Fraction(1) if em == 1 else (1 - 2 * ep - em) / (1 - em)
    out = []
    for v, f in zip(vals, fvals):
        if v >= 0:
            out.append(Fraction(1) if f == 1 else Fraction(-1))
        else:
            out.append(a_minus if f == -1 else Fraction(1))
    return out


def p_eta_value(eta: int, weight: int) -> int:
    out = (-1) ** eta
    for i in range(1, eta + 1):
        out *= weight - i
    return out


def p_eta_at_reals(eta: int, ys) -> Fraction:
    """Multilinear extension of the weight profile, by expanding over the cube."""
    n = len(ys)
    total = Fraction(0)
    for idx, z in points(n):
        w = sum(1 for v in z if v == -1)
        pv = p_eta_value(eta, w)
        if pv == 0:
            continue
        pr = Fraction(1)
        for zi, y in zip(z, ys):
            pr *= (1 + zi * y) / 2
        total += pv * pr
    return total


def modified(outer, n: int, inner, m: int, fvals, eta: int) -> tuple:
    """(unnormalised (outer*inner)(p_eta o alpha) table, normaliser p_eta(1 - 2 eps+))."""
    base = dbc(outer, n, inner, m)
    al = alpha_table(inner, fvals)
    ep = rates(inner, fvals)["eps_plus"]
    cache = {}
    out = []
    for (idx, x), b in zip(points(n * m), base):
        if b == 0:
            out.append(Fraction(0))
            continue
        key = tuple(al[index(blk)] for blk in split(x, n))
        if key not in cache:
            cache[key] = p_eta_at_reals(eta, key)
        out.append(b * cache[key])
    return out, p_eta_at_reals(eta, [1 - 2 * ep] * n)


def correlation(vals, fvals) -> Fraction:
    return sum((v * f for v, f in zip(vals, fvals) if v), Fraction(0))


def mass_above(vals, n: int, N: int) -> Fraction:
    return sum((abs(v) for idx, v in enumerate(vals) if v and bin(idx).count("1") > N), Fraction(0))


def product_expectation(fn, taus) -> Fraction:
    """E over x with x_i = -1 independently with probability tau_i."""
    total = Fraction(0)
    for _, x in points(len(taus)):
        pr = Fraction(1)
        for v, t in zip(x, taus):
            pr *= t if v == -1 else 1 - t
        total += pr * fn(x)
    return total


def fourier(vals, n: int) -> dict:
    return {S: v / (1 << n) for S, v in enumerate(spectrum(vals)) if v}


def combid(values) -> Fraction:
    N = len(values) - 1
    return sum((Fraction((-1) ** i * binom(N, i)) * v for i, v in enumerate(values)), Fraction(0))
