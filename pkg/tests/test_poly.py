import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kdist import reference as ref
from kdist.boolfn import all_points, make_or, make_thr, point_of
from kdist.exact import binom
from kdist.poly import (
    ConjunctionComb, MultilinearPoly, SymmetricMultilinear, UnivariatePoly, alternating_binomial_sum,
    build_p_eta, chebyshev, conj_value, elementary_symmetric, expand_symmetric, fourier_degree, fourier_expand,
    interpolate_newton, krawtchouk, level_char_sum, p_eta_l1_bound, rho_exact, rho_upper, symmetrize,
    walsh_hadamard,
)

from strategies import dense_fns, small_rationals


def test_chebyshev_low_degrees():
    assert chebyshev(0).coeffs == (1,)
    assert chebyshev(1).coeffs == (0, 1)
    assert chebyshev(2).coeffs == (-1, 0, 2)
    assert chebyshev(3).coeffs == (0, -3, 0, 4)
    assert chebyshev(4).coeffs == (1, 0, -8, 0, 8)
    with pytest.raises(ValueError):
        chebyshev(-1)


@pytest.mark.parametrize("d", range(1, 12))
def test_chebyshev_matches_trig_forms(d):
    T = chebyshev(d)
    for x in (Fraction(-1), Fraction(-3, 7), Fraction(0), Fraction(2, 5), Fraction(1)):
        assert float(T(x)) == pytest.approx(math.cos(d * math.acos(float(x))), abs=1e-9)
    for x in (Fraction(1), Fraction(11, 10), Fraction(3, 2), Fraction(3)):
        assert float(T(x)) == pytest.approx(math.cosh(d * math.acosh(float(x))), rel=1e-9)
    # leading coefficient and derivative at 1 (= d^2)
    assert T.coeffs[-1] == 2 ** (d - 1)
    assert sum(i * c for i, c in enumerate(T.coeffs)) == d * d


@given(st.lists(small_rationals, min_size=1, max_size=8))
def test_newton_interpolation_hits_nodes(vals):
    p = interpolate_newton(vals)
    assert [p(i) for i in range(len(vals))] == vals
    assert p.degree <= len(vals) - 1


@given(st.lists(small_rationals, min_size=1, max_size=6), st.lists(small_rationals, min_size=1, max_size=6),
       small_rationals)
def test_univariate_arithmetic_pointwise(a, b, x):
    p, q = UnivariatePoly(tuple(a)), UnivariatePoly(tuple(b))
    assert (p * q)(x) == p(x) * q(x)
    assert (p + q)(x) == p(x) + q(x)
    assert (p - q)(x) == p(x) - q(x)
    assert p.compose_affine(2, -1)(x) == p(2 * x - 1)


@given(st.lists(small_rationals, min_size=1, max_size=9))
def test_alternating_sum_kills_low_degree(vals):
    assert alternating_binomial_sum(vals) == ref.combid(vals)
    N = len(vals) - 1
    if N >= 1:
        p = interpolate_newton(vals[:N])  # degree < N
        assert alternating_binomial_sum([p(i) for i in range(N + 1)]) == 0


@given(st.integers(0, 6).flatmap(lambda m: st.lists(small_rationals, min_size=1 << m, max_size=1 << m)))
def test_walsh_hadamard_matches_reference(vals):
    assert walsh_hadamard(vals) == ref.spectrum(vals)
    n = len(vals).bit_length() - 1
    for S in range(len(vals)):
        assert walsh_hadamard(vals)[S] == ref.moment(vals, S)
    # involution up to 2^n
    assert [v / (1 << n) for v in walsh_hadamard(walsh_hadamard(vals))] == vals


@given(st.integers(1, 5).flatmap(dense_fns))
def test_fourier_expand_reconstructs(f):
    p = fourier_expand(f)
    for idx in range(1 << f.arity):
        x = point_of(idx, f.arity)
        assert p(x) == f(x)
    assert sum(v * v for v in p.coeffs.values()) == 1  # Parseval for a +-1 function
    vals = [f(point_of(i, f.arity)) for i in range(1 << f.arity)]
    assert p.degree == fourier_degree(vals, f.arity)
    assert {sum(1 << i for i in S): v for S, v in p.coeffs.items()} == ref.fourier(vals, f.arity)


def test_fourier_of_or_and_cap():
    p = fourier_expand(make_or(2))
    # OR_2 = (-1 + x1 + x2 + x1 x2)/2 with -1 as TRUE
    assert p.coeffs == {frozenset(): Fraction(-1, 2), frozenset({0}): Fraction(1, 2),
                        frozenset({1}): Fraction(1, 2), frozenset({0, 1}): Fraction(1, 2)}
    with pytest.raises(ValueError):
        fourier_expand(make_or(13))


@given(st.integers(1, 5).flatmap(dense_fns), st.integers(1, 5).flatmap(dense_fns))
def test_mul_on_cube_is_pointwise(f, g):
    n = max(f.arity, g.arity)
    p, q = fourier_expand(f), fourier_expand(g)
    r = p.mul_on_cube(q)
    for x in all_points(n):
        assert r(x) == f(x[:f.arity]) * g(x[:g.arity])


@pytest.mark.parametrize("n", range(1, 8))
def test_krawtchouk_brute_force(n):
    for s in range(n + 1):
        for t in range(n + 1):
            x = tuple(-1 if i < t else 1 for i in range(n))
            brute = sum(math.prod(x[i] for i in range(n) if (T >> i) & 1)
                        for T in range(1 << n) if bin(T).count("1") == s)
            assert krawtchouk(s, t, n) == brute
            T_fixed = (1 << s) - 1
            brute_level = sum(ref.char(T_fixed, idx) for idx in range(1 << n) if bin(idx).count("1") == t)
            assert level_char_sum(s, t, n) == brute_level


@given(st.integers(1, 5).flatmap(dense_fns))
def test_symmetrize_averages_levels(f):
    n = f.arity
    q = symmetrize(fourier_expand(f))
    for w in range(n + 1):
        pts = [x for x in all_points(n) if sum(v == -1 for v in x) == w]
        assert q(w) == Fraction(sum(f(x) for x in pts), len(pts))


@given(st.integers(1, 7).flatmap(lambda n: st.tuples(st.just(n), st.lists(small_rationals, min_size=n + 1,
                                                                             max_size=n + 1))),
       st.data())
def test_symmetric_multilinear_routes_agree(case, data):
    n, prof = case
    p = SymmetricMultilinear(n, tuple(prof))
    expanded = expand_symmetric(p)
    ys = data.draw(st.lists(st.fractions(-1, 1, max_denominator=5), min_size=n, max_size=n))
    assert p.at_reals(ys) == expanded(ys)
    for x in all_points(n):
        assert p(x) == expanded(x)
    u = data.draw(st.fractions(0, 1, max_denominator=7))
    assert p.at_uniform(u) == expanded([1 - 2 * u] * n)
    assert p.degree == expanded.degree


def test_elementary_symmetric_small():
    assert elementary_symmetric([1, 2, 3], 3) == [1, 6, 11, 6]
    assert elementary_symmetric([Fraction(1, 2)] * 4, 2) == [1, 2, Fraction(6, 4)]


@pytest.mark.parametrize("eta,n", [(0, 1), (2, 3), (2, 5), (4, 6), (4, 9), (6, 8)])
def test_p_eta_profile_and_bounds(eta, n):
    p = build_p_eta(eta, n)
    assert p.profile[0] == math.factorial(eta)
    assert all(p.profile[w] == 0 for w in range(1, eta + 1))
    assert all(p.profile[w] > 0 for w in range(eta + 1, n + 1))  # eta even
    assert p.degree == eta
    assert expand_symmetric(p).l1() <= p_eta_l1_bound(eta, n)
    ys = [Fraction(i + 1, n + 2) * (-1) ** i for i in range(n)]
    assert p.at_reals(ys) == ref.p_eta_at_reals(eta, ys)


@pytest.mark.parametrize("eta,n", [(1, 4), (-2, 4), (4, 4)])
def test_p_eta_rejects_bad_parameters(eta, n):
    with pytest.raises(ValueError):
        build_p_eta(eta, n)


def test_symmetric_at_reals_rejects_outside_cube():
    p = build_p_eta(2, 3)
    with pytest.raises(ValueError):
        p.at_reals([Fraction(2), 0, 0])


def _random_comb(draw, n):
    terms = {}
    for _ in range(draw(st.integers(0, 4))):
        A = frozenset(draw(st.sets(st.integers(0, n - 1), max_size=n)))
        B = frozenset(draw(st.sets(st.integers(0, n - 1), max_size=n))) - A
        terms[(A, B)] = draw(small_rationals)
    return ConjunctionComb(n, terms)


@st.composite
def combs(draw, n=4):
    return _random_comb(draw, n)


@given(combs(), combs(), small_rationals)
def test_conjunction_algebra_pointwise(a, b, s):
    for x in all_points(4):
        assert (a + b)(x) == a(x) + b(x)
        assert (a * b)(x) == a(x) * b(x)
        assert a.scale(s)(x) == s * a(x)
    assert rho_upper(a * b) >= (a * b).l1()
    assert (a * b).bound <= a.bound * b.bound
    assert rho_upper(a + b) <= a.bound + b.bound


def test_conj_value_and_shift():
    assert conj_value([0], [1], (1, -1, 1)) == 1
    assert conj_value([0], [1], (-1, -1, 1)) == 0
    c = ConjunctionComb(2, {((0,), (1,)): 3}).shift(2, 4)
    assert c((1, 1, 1, -1)) == 3 and c((1, -1, 1, 1)) == 0


def test_rho_exact_small_functions():
    # x_1 = [x_1 = 1] - [x_1 = -1], and no single conjunction takes both signs
    assert rho_exact(make_or(1)) == 2
    assert rho_exact(make_or(2)) <= 3
    # THR expansion is one representation, so the LP optimum cannot exceed its l1
    from kdist.upperbound import expand_thr_conjunctions
    for k, N in ((1, 3), (2, 3), (2, 4)):
        comb = expand_thr_conjunctions(k, N)
        f = make_thr(k, N)
        for x in all_points(N):
            assert comb(x) == f(x)
        assert rho_exact(f) <= comb.l1()


def test_multilinear_sorted_items_and_degree():
    p = MultilinearPoly(3, {frozenset({2, 0}): 1, frozenset(): 2, frozenset({1}): 0})
    assert p.degree == 2
    assert p.sorted_items() == [((), 2), ((0, 2), 1)]
    assert MultilinearPoly(2).degree == -1


def test_binom_edges():
    assert binom(5, -1) == 0 and binom(5, 6) == 0 and binom(6, 3) == 20
