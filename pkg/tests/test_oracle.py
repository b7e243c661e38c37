import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symtsp import _backend
from symtsp.instance import random_matrix
from symtsp.oracle import (OracleLimit, acceptable_cycles_by_permutations, brute_min_derangement,
                           brute_min_pm, brute_tsp, derangements_by_enumeration,
                           enumerate_acceptable_cycles, iter_perfect_matchings, tsp_by_enumeration)
from symtsp.permutation import PerfectMatching, pm_value, tour_value
from symtsp.reduced import build_reduced


def test_matching_count():
    # (n-1)!! matchings
    assert sum(1 for _ in iter_perfect_matchings(8)) == 105
    assert sum(1 for _ in iter_perfect_matchings(10)) == 945


@pytest.mark.skipif(_backend._compiled is None, reason="n=20 subset DP needs the compiled kernels")
def test_fixture_optima(ex3, ex4):
    assert _backend.held_karp(ex4.w)[0] == 52
    assert _backend.held_karp(ex3.w)[0] == 165


@settings(max_examples=20)
@given(seed=st.integers(0, 10_000), n=st.integers(4, 8))
def test_tsp_methods_agree(seed, n):
    m = random_matrix(n, np.random.default_rng(seed))
    res = brute_tsp(m)
    assert tour_value(res.witness, m) == res.value == tsp_by_enumeration(m)[0]


@settings(max_examples=20)
@given(seed=st.integers(0, 10_000), n=st.sampled_from([4, 6, 8]))
def test_min_pm_against_full_list(seed, n):
    m = random_matrix(n, np.random.default_rng(seed))
    want = min(pm_value(PerfectMatching.from_pairs(n, p), m) for p in iter_perfect_matchings(n))
    assert brute_min_pm(m).value == want


@settings(max_examples=15)
@given(seed=st.integers(0, 10_000), n=st.integers(2, 7))
def test_min_derangement_against_enumeration(seed, n):
    m = random_matrix(n, np.random.default_rng(seed))
    res = brute_min_derangement(m)
    assert all(res.witness(i) != i for i in range(1, n + 1))
    assert res.value == derangements_by_enumeration(m)[0]


@settings(max_examples=10)
@given(seed=st.integers(0, 10_000), n=st.sampled_from([4, 6, 8]))
def test_cycle_generators_agree(seed, n):
    rng = np.random.default_rng(seed)
    m = random_matrix(n, rng)
    p = rng.permutation(n) + 1
    s = PerfectMatching.from_pairs(n, [(int(p[i]), int(p[i + 1])) for i in range(0, n, 2)])
    r = build_reduced(m, s)
    got = [(c.vertices, c.value) for c in enumerate_acceptable_cycles(r, s)]
    assert got == acceptable_cycles_by_permutations(r, s)


def test_limits(rng):
    with pytest.raises(OracleLimit):
        brute_tsp(random_matrix(14, rng))
    with pytest.raises(OracleLimit):
        brute_min_pm(random_matrix(7, rng))
    with pytest.raises(OracleLimit):
        brute_min_derangement(random_matrix(10, rng))
