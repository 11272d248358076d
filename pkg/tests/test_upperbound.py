import math
from fractions import Fraction

import numpy as np
import pytest
from numpy.polynomial import chebyshev as npcheb

from kdist.boolfn import all_points, make_dist, make_thr, point_of
from kdist.exact import CapError
from kdist.upperbound import (
    build_approximant, build_outer, default_m, degree_sweep, dist_lift, expand_thr_conjunctions,
    lp_cross_check, thr_rho_bound,
)


def cheb_float(m: int, s: float) -> float:
    if abs(s) <= 1:
        return math.cos(m * math.acos(s))
    return math.copysign(1, s) ** m * math.cosh(m * math.acosh(abs(s)))


def outer_error_oracle(k: int, N: int, R: int, m: int) -> float:
    """Max |p - F| over block patterns reachable under the promise (at most N // k true blocks)."""
    top = cheb_float(m, 1 + 1 / R)
    worst = 0.0
    for w in range(min(R, N // k) + 1):
        p = 2 * cheb_float(m, (R - 2 * w + 1) / R) / top - 1
        worst = max(worst, abs(p - (1 if w == 0 else -1)))
    return worst


def test_default_m():
    assert [default_m(R) for R in (1, 2, 4, 6, 16)] == [3, 4, 5, 6, 10]


@pytest.mark.parametrize("m,R", [(1, 1), (3, 2), (4, 2), (5, 4), (7, 9)])
def test_outer_matches_numpy_chebyshev(m, R):
    outer = build_outer(m, R)
    coeffs = [0] * m + [1]
    top = npcheb.chebval(1 + 1 / R, coeffs)
    for w in range(R + 1):
        want = 2 * npcheb.chebval((R - 2 * w + 1) / R, coeffs) / top - 1
        assert float(outer.at_weight(w)) == pytest.approx(want, abs=1e-12)
    assert outer.at_weight(0) == 1
    assert outer.measured_error() <= outer.error_bound()


# (2, 4, 2) -> 2/47 and (2, 4, 4) -> 122/1025, frozen after agreeing with the float oracle
@pytest.mark.parametrize("k,N,R,m,err", [(2, 4, 2, 4, Fraction(2, 47)), (2, 4, 4, 5, Fraction(122, 1025))])
def test_approximant_error_matches_oracle(k, N, R, m, err):
    rep = build_approximant(k, N, R)
    assert rep.m == m
    assert rep.measured_error == err
    assert float(err) == pytest.approx(outer_error_oracle(k, N, R, m), abs=1e-12)
    assert rep.degree <= rep.d
    assert rep.measured_error <= rep.error_bound() <= rep.composed_chain_bound()
    assert rep.rho_l1 <= rep.rho_tracked <= rep.rho_chain


def test_approximant_pointwise_against_direct_evaluation():
    rep = build_approximant(2, 3, 2, d=3)
    F = rep.target()
    worst = Fraction(0)
    for x in all_points(rep.arity):
        if F.in_promise(x):
            worst = max(worst, abs(rep(x) - F(x)))
    assert worst == rep.measured_error


def test_lower_degree_replacements_cost_error():
    sweep = degree_sweep(2, 4, 2)
    assert sweep[4] == Fraction(2, 47)
    ds = sorted(sweep)
    assert all(sweep[a] >= sweep[b] for a, b in zip(ds, ds[1:]))


def test_lp_optimum_is_below_the_construction():
    rep = build_approximant(2, 3, 2)
    best, measured = lp_cross_check(rep)
    assert best <= measured


@pytest.mark.parametrize("k,N", [(1, 3), (2, 4), (2, 5), (3, 6)])
def test_thr_expansion_is_exact(k, N):
    comb = expand_thr_conjunctions(k, N)
    f = make_thr(k, N)
    for x in all_points(N):
        assert comb(x) == f(x)
    assert comb.l1() <= thr_rho_bound(k, N)


def test_thr_expansion_cap():
    with pytest.raises(CapError):
        expand_thr_conjunctions(10, 40)


def test_dist_lift_toy():
    base = build_approximant(2, 3, 2)
    lift = dist_lift(base)
    assert lift.arity == 3
    dist = make_dist(2, 3, 2)
    vals = np.array([float(lift(point_of(i, 3))) for i in range(8)])
    target = np.array([dist(point_of(i, 3)) for i in range(8)])
    assert np.max(np.abs(vals - target)) == pytest.approx(float(lift.measured_error()))
    assert lift.measured_error() <= base.measured_error == Fraction(2, 47)
    assert lift.fourier_degree() <= lift.degree_bound
    with pytest.raises(ValueError):
        dist_lift(base, 3)


def test_bad_parameters():
    with pytest.raises(ValueError):
        build_outer(0, 2)
    with pytest.raises(ValueError):
        build_approximant(2, 4, 2, d=-1)
