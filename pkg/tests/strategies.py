"""Hypothesis strategies for exact witnesses and Boolean functions."""
from fractions import Fraction

from hypothesis import strategies as st

from kdist.boolfn import DenseFn
from kdist.witness import DenseWitness, LevelWitness

small_rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


def _normalise(vals, balanced, pivot):
    vals = list(vals)
    if balanced:
        vals[pivot % len(vals)] -= sum(vals)
    l1 = sum(abs(v) for v in vals)
    return [v / l1 for v in vals] if l1 else None


@st.composite
def dense_witnesses(draw, m, balanced=True):
    vals = draw(st.lists(small_rationals, min_size=1 << m, max_size=1 << m))
    out = _normalise(vals, balanced, draw(st.integers(0, (1 << m) - 1)))
    if out is None:
        out = [Fraction(0)] * (1 << m)
        out[0], out[-1] = Fraction(1, 2), Fraction(-1, 2) if balanced else Fraction(1, 2)
    return DenseWitness(m, tuple(out))


@st.composite
def level_witnesses(draw, m, balanced=True):
    vals = draw(st.lists(small_rationals, min_size=m + 1, max_size=m + 1))
    out = _normalise(vals, balanced, draw(st.integers(0, m)))
    if out is None:
        out = [Fraction(0)] * (m + 1)
        out[0], out[-1] = Fraction(1, 2), Fraction(-1, 2)
    return LevelWitness(m, tuple(out))


def witnesses(m, balanced=True):
    return st.one_of(dense_witnesses(m, balanced), level_witnesses(m, balanced))


@st.composite
def dense_fns(draw, m):
    return DenseFn(m, tuple(draw(st.lists(st.sampled_from((1, -1)), min_size=1 << m, max_size=1 << m))))
