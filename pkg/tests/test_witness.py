from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from kdist import reference as ref
from kdist.boolfn import DenseFn, compose, make_or, make_thr, point_of
from kdist.poly import fourier_expand
from kdist.witness import (
    INFINITE, DenseWitness, LevelWitness, OrbitWitness, alpha_classify, correlation, dbc, error_rates,
    inner_product, modified_compose, orbit_masses, witness_shape,
)

from strategies import dense_fns, dense_witnesses, level_witnesses, witnesses


def _sign_fn(psi, flips):
    tab = []
    for i, v in enumerate(psi.dense_values()):
        s = -1 if v < 0 else 1
        tab.append(-s if (flips >> i) & 1 else s)
    return DenseFn(psi.n, tuple(tab))


@given(st.integers(1, 6).flatmap(level_witnesses))
def test_level_witness_matches_dense_route(w):
    d = w.to_dense()
    vals = d.dense_values()
    assert w.l1() == d.l1() == ref.l1(vals)
    assert w.total() == sum(vals)
    ph = ref.phd(vals, w.n)
    assert w.phd() == (INFINITE if ph is None else ph) == d.phd()
    for s in range(w.n + 1):
        assert w.moment(s) == ref.moment(vals, (1 << s) - 1)


@given(st.integers(1, 5).flatmap(lambda m: st.tuples(dense_witnesses(m), dense_fns(m))))
def test_rates_and_correlation_against_reference(case):
    psi, f = case
    vals, fvals = psi.dense_values(), ref.table(f, f.arity)
    r = error_rates(f, psi)
    rr = ref.rates(vals, fvals)
    assert (r.delta_plus, r.delta_minus, r.eps_plus, r.eps_minus) == \
        (rr["delta_plus"], rr["delta_minus"], rr["eps_plus"], rr["eps_minus"])
    # with a balanced witness each sign carries half the mass
    assert r.eps_plus == 2 * r.delta_plus and r.eps_minus == 2 * r.delta_minus
    assert correlation(f, psi) == ref.correlation(vals, fvals)
    assert correlation(f, psi) == 1 - 2 * (r.delta_plus + r.delta_minus)


@given(st.integers(1, 4).flatmap(lambda m: st.tuples(witnesses(m), st.integers(0, (1 << (1 << m)) - 1))))
def test_alpha_expectation_per_sign(case):
    psi, flips = case
    f = _sign_fn(psi, flips)
    vals, fvals = psi.dense_values(), ref.table(f, f.arity)
    assume(ref.rates(vals, fvals)["eps_minus"] < 1)
    alpha, stats = alpha_classify(f, psi)
    target = 1 - 2 * stats.eps_plus
    al = ref.alpha_table(vals, fvals)
    for z in (1, -1):
        assert stats.expected_alpha(z) == target
        assert sum(2 * abs(v) * a for v, a in zip(vals, al) if v and ref.sign(v) == z) == target
    for i in range(1 << psi.n):
        if vals[i]:
            assert alpha(point_of(i, psi.n)) == al[i]
            if stats.eps_plus + stats.eps_minus <= 1:
                assert -1 <= al[i] <= 1


@given(st.sampled_from([(1, 2), (2, 2), (2, 3), (3, 2), (1, 4)]).flatmap(
    lambda nm: st.tuples(witnesses(nm[0], balanced=False), witnesses(nm[1]))))
def test_dbc_matches_reference(case):
    outer, inner = case
    n, m = outer.n, inner.n
    table = ref.dbc(outer.dense_values(), n, inner.dense_values(), m)
    w = dbc(outer, inner)
    assert w.dense_values() == table
    assert w.l1() == ref.l1(table) == 1
    assert w.total() == sum(table)
    ph = ref.phd(table, n * m)
    assert w.phd() == (INFINITE if ph is None else ph)
    po, pi = ref.phd(outer.dense_values(), n), ref.phd(inner.dense_values(), m)
    if None not in (po, pi, ph):
        assert ph >= po * pi
    for N in range(n * m + 1):
        assert w.mass_above(N) == ref.mass_above(table, n * m, N)


@given(st.sampled_from([(2, 2), (2, 3), (3, 2)]).flatmap(
    lambda nm: st.tuples(witnesses(nm[0], balanced=False), witnesses(nm[1]), dense_fns(nm[1]))))
def test_dbc_category_masses_against_composed_function(case):
    outer, inner, g = case
    n, m = outer.n, inner.n
    F = compose(make_or(n), g)
    w = dbc(outer, inner)
    table = ref.dbc(outer.dense_values(), n, inner.dense_values(), m)
    assert correlation(F, w) == ref.correlation(table, ref.table(F, n * m))
    assert w.category_masses(F) == w.to_dense().category_masses(F)


@given(st.sampled_from([(2, 2, 0), (3, 2, 0), (3, 2, 2), (4, 2, 2), (3, 3, 2)]).flatmap(
    lambda t: st.tuples(st.just(t[2]), dense_witnesses(t[0], balanced=False), witnesses(t[1]),
                        st.integers(0, (1 << (1 << t[1])) - 1))))
def test_modified_compose_matches_reference(case):
    eta, zeta, xi, flips = case
    f = _sign_fn(xi, flips)
    try:
        g = modified_compose(zeta, xi, f, eta)
    except ValueError:
        assume(False)
    n, m = zeta.n, xi.n
    tbl, P0 = ref.modified(zeta.dense_values(), n, xi.dense_values(), m, ref.table(f, m), eta)
    assert g.normalizer == P0
    assert ref.l1(tbl) == P0
    assert g.l1() == 1
    assert all(g.value(x) * P0 == tbl[idx] for idx, x in ref.points(n * m))
    F = compose(make_or(n), f)
    assert correlation(F, g) == ref.correlation(tbl, ref.table(F, n * m)) / P0


def test_dbc_rejects_unnormalised_inputs():
    inner = LevelWitness(2, (Fraction(1, 2), 0, Fraction(-1, 2)))
    with pytest.raises(ValueError):
        dbc(LevelWitness(1, (1, 1)), inner)
    with pytest.raises(ValueError):
        dbc(LevelWitness(1, (Fraction(1, 2), Fraction(-1, 2))), LevelWitness(2, (Fraction(1, 2), Fraction(1, 2), 0)))


def test_modified_compose_rejects_bad_arity():
    xi = LevelWitness(2, (Fraction(1, 4), Fraction(-1, 2), Fraction(1, 4)))
    zeta = LevelWitness(2, (Fraction(1, 2), 0, Fraction(1, 2)))
    with pytest.raises(ValueError):
        modified_compose(zeta, xi, make_or(3), 0)


def test_parity_witness_has_full_phd():
    # normalised parity is orthogonal to every polynomial of degree < n
    n = 4
    vals = tuple(Fraction((-1) ** bin(i).count("1"), 1 << n) for i in range(1 << n))
    w = DenseWitness(n, vals)
    assert w.phd() == n
    assert w.phd(limit=2) == 2
    assert DenseWitness(2, (0, 0, 0, 0)).phd() == INFINITE


def test_witness_inner_product_is_fourier_coefficient():
    f = make_thr(2, 3)
    p = fourier_expand(f)
    for S in range(8):
        chi = DenseWitness(3, tuple(Fraction(ref.char(S, i)) for i in range(8)))
        coeff = p.coeffs.get(frozenset(i for i in range(3) if (S >> i) & 1), 0)
        assert inner_product(chi, f_as_witness(f)) == 8 * coeff


def f_as_witness(f):
    return DenseWitness(f.arity, tuple(Fraction(f(point_of(i, f.arity))) for i in range(1 << f.arity)))


@given(st.integers(1, 5).flatmap(level_witnesses))
def test_orbit_restriction_of_level_witness(w):
    shape = witness_shape(w)
    assert shape == (w.n,)
    o = orbit_masses(w, shape, w.n)
    assert isinstance(o, OrbitWitness)
    assert o.dense_values() == w.dense_values()
    assert o.phd() == w.phd()
    half = orbit_masses(w, shape, w.n // 2)
    assert half.l1() == sum(abs(v) for v in w.levels[: w.n // 2 + 1])


def test_composed_shape_is_nested():
    outer = LevelWitness(2, (Fraction(1, 2), 0, Fraction(-1, 2)))
    inner = LevelWitness(3, (Fraction(1, 4), Fraction(-1, 4), Fraction(1, 4), Fraction(-1, 4)))
    w = dbc(outer, inner)
    assert witness_shape(w) == (2, 3)
    o = orbit_masses(w, (2, 3), 6)
    assert o.dense_values() == w.dense_values()
