from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from kdist import reference as ref
from kdist.boolfn import make_or, make_thr
from kdist.constructions import (
    ParamBlock, a_bound, amplification_report, best_theta_phd, build_final, build_gamma, build_omega, build_phi,
    build_psi, build_theta, composition_report, default_ell, final_report, gamma_report, omega_report,
)
from kdist.lp.adeg import best_error
from kdist.verdicts import CERTIFIED, FAILED
from kdist.witness import LevelWitness, correlation, error_rates


def omega_oracle(k, T, ell):
    """Unique signed measure on S killing all polynomials of degree < |S| - 1, via a sympy null space."""
    m = 0
    while ell * (m + 1) ** 2 <= T:
        m += 1
    S = sorted(set(range(1, k + 1)) | {ell * i * i for i in range(m + 1)})
    rows = [[sympy.Integer(t) ** j for t in S] for j in range(len(S) - 1)]
    (vec,) = sympy.Matrix(rows).nullspace()
    vals = [Fraction(int(sympy.fraction(v)[0]), int(sympy.fraction(v)[1])) for v in vec]
    l1 = sum(abs(v) for v in vals)
    prof = [Fraction(0)] * (T + 1)
    for t, v in zip(S, vals):
        prof[t] = v / l1
    if prof[k] > 0:
        prof = [-v for v in prof]
    return S, tuple(prof)


def test_default_ell_hand_value():
    # 100 * 2 * ceil(16^(1/4) * 16 * log2 16) = 200 * 128
    assert default_ell(2, 16) == 25600
    assert default_ell(3, 64) == 300 * (2 * 64 * 6)


def test_omega_toy_profile():
    om = build_omega(2, 4, 16)
    assert om.m == 0 and om.S == (0, 1, 2)
    assert om.values == (Fraction(-1, 4), Fraction(1, 2), Fraction(-1, 4), 0, 0)
    assert sum(om.values) == 0 and sum(t * v for t, v in enumerate(om.values)) == 0
    assert om.vanishing_order() == 2


@pytest.mark.parametrize("k,T,N", [(2, 4, 16), (2, 9, 64), (3, 9, 64)])
def test_omega_matches_null_space_oracle(k, T, N):
    om = build_omega(k, T, N)
    S, prof = omega_oracle(k, T, om.ell)
    assert om.S == tuple(S)
    assert om.values == prof
    rep = omega_report(om)
    assert rep.ok
    for name in ("support = S", "omega(k) < 0", "l1 norm", "moments vanish below |S| - 1",
                 "head bound |omega(t)|/|omega(k)| <= C(k,t)"):
        assert rep.verdicts()[name] == CERTIFIED


# ell > k keeps the squares clear of 1..k, as the construction assumes
@given(st.integers(2, 4).flatmap(lambda k: st.tuples(st.just(k), st.integers(k, 14), st.integers(k + 1, 7))))
def test_omega_small_ell_against_oracle(case):
    k, T, ell = case
    om = build_omega(k, T, 64, ell)
    S, prof = omega_oracle(k, T, ell)
    assert om.S == tuple(S)
    assert om.values == prof
    assert om.vanishing_order() == len(S) - 1
    assert om.values[k] < 0


@pytest.mark.parametrize("args", [(1, 4, 16), (5, 4, 16), (2, 20, 16), (2, 4, 16, 0)])
def test_omega_rejects_bad_parameters(args):
    with pytest.raises(ValueError):
        build_omega(*args)


def test_psi_toy_rates_and_phd():
    om = build_omega(2, 4, 16)
    psi = build_psi(om, 16)
    assert psi.l1() == 1
    assert psi.phd() == om.vanishing_order() == 2
    assert psi.mass_above(4) == 0
    r = error_rates(make_thr(2, 16), psi)
    assert r.delta_minus == Fraction(1, 4) <= Fraction(1, 2) - Fraction(2, 16)
    # the dense route on a small N agrees
    small = build_psi(build_omega(2, 4, 6, ell=1000), 6)
    vals = small.dense_values()
    assert ref.phd(vals, 6) == 2
    assert ref.l1(vals) == 1


@pytest.mark.parametrize("M", [1, 2, 3, 5])
def test_phi_is_a_perfect_witness_for_or(M):
    phi = build_phi(M)
    assert phi.l1() == 1
    assert phi.phd() == 1
    assert correlation(make_or(M), phi) == 1


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_theta_is_optimal_for_its_phd(n):
    tp = best_theta_phd(n)
    theta = build_theta(n, tp)
    assert theta.l1() == 1
    assert theta.phd() >= tp
    corr = correlation(make_or(n), theta)
    assert corr == best_error(make_or(n), tp - 1).error
    assert corr >= Fraction(3, 5)
    if tp < n:
        assert best_error(make_or(n), tp).error < Fraction(3, 5)


def test_param_block_formulas():
    p = ParamBlock.build(16, 2)
    # T = floor(sqrt 16), sigma = 4^2, N = ceil(20 * 4 * 16), n = 16 / 4^2, M = 4^2
    assert (p.T, p.sigma, p.N, p.n_outer, p.M) == (4, 16, 1280, 1, 16)
    assert p.provenance["N"] == "PAPER"
    with pytest.raises(ValueError):
        ParamBlock.build(17, 2)
    with pytest.raises(ValueError):
        ParamBlock.build(16, 2, bogus=1)


def test_param_block_eta_rounding_is_noted():
    p = ParamBlock.build(16, 2, n=4, eta=3)
    assert p.eta == 2
    assert any("rounded" in s for s in p.notes)
    q = ParamBlock.build(16, 2, n=2, eta=4)
    assert q.eta == 0
    assert any("lowered" in s for s in q.notes)


def test_a_bound_formula():
    assert a_bound(4, 0, Fraction(1, 2)) == 4 * Fraction(1, 2) * 16
    assert a_bound(3, 2, Fraction(1, 10)) == Fraction(1, 1000) / Fraction(9, 10) ** 3
    with pytest.raises(ValueError):
        a_bound(3, 0, 1)


def _toy_xi():
    xi = LevelWitness(2, (Fraction(1, 4), Fraction(-1, 2), Fraction(1, 4)))
    return xi, make_or(2)


def test_composition_report_on_a_hand_instance():
    xi, f = _toy_xi()
    zeta = LevelWitness(3, (Fraction(1, 2), 0, 0, Fraction(-1, 2)))
    rep = composition_report(zeta, xi, f, 2)
    assert rep.ok
    assert rep.verdicts()["two routes to the final correlation agree"] == CERTIFIED
    assert rep.data["normalizer"] > 0


def test_amplification_report_on_a_hand_instance():
    xi, f = _toy_xi()
    rep = amplification_report(build_phi(3), xi, f)
    assert rep.ok and all(c.verdict == CERTIFIED for c in rep.claims)


@pytest.mark.parametrize("over", [dict(N=4), dict(n=2, M=2, N=3, T=3)])
def test_gamma_and_final_witness_toys(over):
    gb = build_gamma(ParamBlock.build(16, 2, **over))
    rep = gamma_report(gb)
    assert rep.verdicts()["||Gamma||_1 = 1"] == CERTIFIED
    assert rep.verdicts()["phd(Gamma) >= (phd(theta) - eta) phd(phi*psi)"] == CERTIFIED
    fb = build_final(gb)
    fr = final_report(fb)
    for name in ("nu agrees with Gamma above N", "||W||_1 = 1", "W vanishes above weight N",
                 "phd(W) >= min(phd(Gamma), phd(nu))"):
        assert fr.verdicts()[name] == CERTIFIED
    assert not any(c.verdict == FAILED for c in fr.claims)
