from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from kdist.lp.simplex import LPInstance, LPSolution, solve, verify_certificate


def _lp(c, rows, sense="min", free=()):
    lp = LPInstance(note="test")
    for j in range(len(c)):
        lp.add_var(free=j in free)
    for coeffs, op, rhs in rows:
        lp.add_row(dict(enumerate(coeffs)), op, rhs)
    lp.set_objective(dict(enumerate(c)), sense)
    return lp


def test_textbook_max():
    # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
    lp = _lp([3, 5], [([1, 0], "<=", 4), ([0, 2], "<=", 12), ([3, 2], "<=", 18)], "max")
    sol = solve(lp)
    assert sol.status == "optimal"
    assert sol.objective == 36
    assert sol.x == [2, 6]
    assert sol.certified


def test_fractional_optimum_is_exact():
    lp = _lp([1, 1], [([3, 1], ">=", 1), ([1, 3], ">=", 1)])
    sol = solve(lp)
    assert sol.objective == Fraction(1, 2)
    assert sol.x == [Fraction(1, 4), Fraction(1, 4)]


def test_free_variables_and_equalities():
    # min |t| style: t free, t = -3/7
    lp = _lp([0, 1, 1], [([1, -1, 1], "==", Fraction(-3, 7))], free={0})
    sol = solve(lp)
    assert sol.objective == 0
    assert sol.x[0] - sol.x[1] + sol.x[2] == Fraction(-3, 7)


def test_infeasible_and_unbounded():
    assert solve(_lp([1], [([1], "<=", -1)])).status == "infeasible"
    assert solve(_lp([1], [([1], ">=", 1)], "max")).status == "unbounded"


def test_certificate_rejects_a_tampered_dual():
    lp = _lp([3, 5], [([1, 0], "<=", 4), ([0, 2], "<=", 12), ([3, 2], "<=", 18)], "max")
    sol = solve(lp)
    bad = LPSolution(sol.status, sol.objective, list(sol.x), [d + Fraction(1, 100) for d in sol.duals])
    assert not verify_certificate(lp, bad)


def test_text_round_trip():
    lp = _lp([Fraction(1, 3), -2], [([1, 1], "<=", Fraction(7, 2)), ([1, -1], ">=", -1)], "max", free={1})
    again = LPInstance.loads(lp.dumps())
    assert again.dumps() == lp.dumps()
    assert solve(again).objective == solve(lp).objective


def test_degenerate_problem_terminates():
    # Beale's cycling example (classic degenerate LP); optimum -1/20
    c = [Fraction(-3, 4), 150, Fraction(-1, 50), 6]
    rows = [([Fraction(1, 4), -60, Fraction(-1, 25), 9], "<=", 0),
            ([Fraction(1, 2), -90, Fraction(-1, 50), 3], "<=", 0),
            ([0, 0, 1, 0], "<=", 1)]
    for rule in ("dantzig", "bland"):
        sol = solve(_lp(c, rows), rule)
        assert sol.objective == Fraction(-1, 20)


@given(st.integers(2, 4), st.integers(1, 4), st.data())
def test_matches_scipy_on_random_bounded_lps(n, m, data):
    ints = st.integers(-5, 5)
    A = [[data.draw(ints) for _ in range(n)] for _ in range(m)]
    b = [data.draw(st.integers(0, 8)) for _ in range(m)]
    c = [data.draw(ints) for _ in range(n)]
    # box keeps it bounded; b >= 0 keeps the origin feasible
    rows = [(row, "<=", rhs) for row, rhs in zip(A, b)]
    rows += [([1 if i == j else 0 for i in range(n)], "<=", 3) for j in range(n)]
    sol = solve(_lp(c, rows))
    ref = linprog(c, A_ub=np.array([r[0] for r in rows], dtype=float), b_ub=[r[2] for r in rows],
                  bounds=[(0, None)] * n, method="highs")
    assert sol.status == "optimal" and ref.status == 0
    assert abs(float(sol.objective) - ref.fun) < 1e-7
    assert verify_certificate(_lp(c, rows), sol)


@given(st.integers(1, 3), st.data())
def test_pricing_rules_agree(n, data):
    c = [data.draw(st.integers(-4, 4)) for _ in range(n)]
    rows = [([data.draw(st.integers(0, 3)) for _ in range(n)], "<=", data.draw(st.integers(0, 5)))
            for _ in range(2)]
    rows += [([1] * n, "<=", 4)]
    a, b = solve(_lp(c, rows), "dantzig"), solve(_lp(c, rows), "bland")
    assert a.objective == b.objective


@pytest.mark.parametrize("op", ["<", "=", "=>"])
def test_bad_row_operator(op):
    with pytest.raises(ValueError):
        LPInstance().add_row({0: 1}, op, 0)
