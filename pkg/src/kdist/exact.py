"""Rational parsing/formatting and rigorous comparisons against irrational bounds."""
from __future__ import annotations

from fractions import Fraction
from math import comb

from mpmath import iv

iv.prec = 200


def frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    if hasattr(v, "numerator") and hasattr(v, "denominator"):
        return Fraction(int(v.numerator), int(v.denominator))
    raise TypeError(f"refusing inexact value {v!r}")


def fmt(v) -> str:
    """'num/den' (or plain integer) text for an exact rational."""
    v = frac(v)
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return comb(n, k)


def to_iv(x):
    """Interval enclosing an exact rational or an mpmath interval expression."""
    if isinstance(x, (int, Fraction)):
        x = frac(x)
        return iv.mpf(x.numerator) / iv.mpf(x.denominator)
    return x


def compare(lhs, rhs) -> int | None:
    """-1 / 0 / +1 if lhs <,=,> rhs is decided rigorously, None if the enclosure is ambiguous.

    Either side may be an exact rational or an mpmath interval built from
    exact inputs (sqrt, log, exp of rationals).
    """
    if isinstance(lhs, (int, Fraction)) and isinstance(rhs, (int, Fraction)):
        d = frac(lhs) - frac(rhs)
        return (d > 0) - (d < 0)
    diff = to_iv(lhs) - to_iv(rhs)
    if diff.b < 0:
        return -1
    if diff.a > 0:
        return 1
    if diff.a == 0 and diff.b == 0:
        return 0
    return None


def ivq(x) -> "iv.mpf":
    return to_iv(frac(x))


def log2_iv(x):
    return iv.log(ivq(x)) / iv.log(iv.mpf(2))


def sqrt_iv(x):
    return iv.sqrt(ivq(x))


def iv_floor(x) -> int:
    """Exact floor of an interval quantity; raises if the enclosure straddles an integer."""
    import math
    if isinstance(x, (int, Fraction)):
        return math.floor(frac(x))
    lo, hi = math.floor(x.a), math.floor(x.b)
    if lo != hi:
        raise ValueError("floor undecided at working precision")
    return int(lo)


def iv_ceil(x) -> int:
    import math
    if isinstance(x, (int, Fraction)):
        return math.ceil(frac(x))
    lo, hi = math.ceil(x.a), math.ceil(x.b)
    if lo != hi:
        raise ValueError("ceiling undecided at working precision")
    return int(lo)


def mid(x) -> float:
    """Float midpoint for display only."""
    if isinstance(x, (int, Fraction)):
        return float(x)
    return float(x.mid.a)


class CapError(ValueError):
    """An instance exceeds a size cap (CLI exit code 3)."""
