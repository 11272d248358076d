from itertools import product

import pytest
from hypothesis import given, strategies as st

from kdist.boolfn import (
    OutOfPromise, SpecError, all_points, compose, enumerate_lists, exact_conjunctions, index_of, make_and,
    make_dist, make_exact, make_or, make_thr, parse_spec, point_of, points_upto, promise_size, restrict_weight,
    symmetric_structure, weight,
)
from kdist.exact import binom


def test_or_and_thr_truth_values():
    assert make_or(3)((1, 1, 1)) == 1
    assert make_or(3)((1, -1, 1)) == -1
    assert make_and(2)((-1, -1)) == -1
    assert make_and(2)((-1, 1)) == 1
    thr = make_thr(2, 4)
    assert [thr(point_of(i, 4)) for i in (0, 1, 3, 15)] == [1, 1, -1, -1]


def test_point_index_convention():
    # bit i set iff x_i = -1
    assert index_of((-1, 1, -1)) == 0b101
    assert point_of(0b101, 3) == (-1, 1, -1)
    assert all(index_of(point_of(i, 5)) == i for i in range(32))


def test_exact_is_zero_one_valued():
    e = make_exact(2, 4)
    vals = {e(x) for x in all_points(4)}
    assert vals == {0, 1}
    assert sum(e(x) for x in all_points(4)) == binom(4, 2)


def test_exact_conjunctions_cover_the_level():
    for N in range(1, 6):
        for i in range(N + 1):
            conj = exact_conjunctions(i, N)
            assert len(conj) == binom(N, i)
            for x in all_points(N):
                hits = sum(all(x[a] == 1 for a in A) and all(x[b] == -1 for b in B) for A, B in conj)
                assert hits == (1 if weight(x) == i else 0)


def test_parse_examples():
    f = parse_spec("OR:2 o THR:2:4 <=4")
    assert f.arity == 8 and f.promise == 4
    assert f.spec == "OR:2 o THR:2:4 <=4"
    assert symmetric_structure(parse_spec("OR:2 o THR:2:3")) == [2, 3]
    g = parse_spec("OR:2 ∘ AND:2")
    assert g((1, 1, -1, -1)) == -1


@pytest.mark.parametrize("bad", ["", "OR", "OR:x", "THR:5:3", "OR:2 o", "XOR:3", "OR:2 o THR:2:2 <=9",
                                 "THR:1:2<=1 o OR:2"])
def test_malformed_specs_raise(bad):
    with pytest.raises(SpecError):
        parse_spec(bad)


def test_promise_rejects_heavy_inputs():
    f = restrict_weight(make_or(4), 2)
    assert f((-1, -1, 1, 1)) == -1
    with pytest.raises(OutOfPromise):
        f((-1, -1, -1, 1))
    assert promise_size(4, 2) == 1 + 4 + 6
    assert len(list(points_upto(4, 2))) == 11


def test_composition_semantics():
    f = compose(make_or(2), make_thr(2, 3))
    for x in all_points(6):
        want = -1 if (weight(x[:3]) >= 2 or weight(x[3:]) >= 2) else 1
        assert f(x) == want


def test_dist_encoding_round_trip():
    d = make_dist(2, 3, 4)
    assert d.bits == 2 and d.arity == 6
    for vals in product(range(1, 5), repeat=3):
        assert d.decode(d.encode(vals)) == list(vals)
        assert d.on_list(vals) == (-1 if len(set(vals)) < 3 else 1)


def test_dist_with_padding_patterns():
    # R = 3 needs 2 bits; the unused pattern wraps around to an existing value
    d = make_dist(2, 2, 3)
    assert sorted({tuple(d.decode(x)) for x in all_points(4)}) == sorted(product(range(1, 4), repeat=2))


def test_enumerate_lists_counts():
    assert len(list(enumerate_lists(3, 2))) == 8


@given(st.integers(1, 5), st.integers(1, 5))
def test_thr_matches_weight_rule(k, N):
    if k > N:
        k, N = N, k
    f = make_thr(k, N)
    assert all(f(x) == (-1 if weight(x) >= k else 1) for x in all_points(N))
