import numpy as np
import pytest
from hypothesis import given, strategies as st

from symtsp.instance import CostMatrix, random_matrix
from symtsp.permutation import Permutation, PermutationError, pm_from_tour
from symtsp.reduced import (ForbiddenArc, WeightedCycle, build_reduced, cycle_value, determining_vertex,
                            format_table, qualifying_starts)

# cells that agree with the printed table for the start tour's matching
EX4_CELLS = {(1, 4): 2, (1, 2): 27, (4, 8): -4, (6, 4): -8, (6, 13): -8, (7, 1): -3, (10, 17): -8,
             (10, 12): -6, (12, 6): -1, (16, 7): -1, (18, 10): -1, (20, 16): -1, (6, 8): 29, (11, 8): 1}


def test_two_vertices():
    r = build_reduced(CostMatrix([[0, 5], [5, 0]]), Permutation([2, 1]))
    assert r.entry(1, 1) == r.entry(2, 2) == 0
    assert not r.allowed(1, 2) and not r.allowed(2, 1)
    with pytest.raises(ForbiddenArc):
        r.entry(1, 2)


def test_needs_derangement(rng):
    with pytest.raises(PermutationError):
        build_reduced(random_matrix(4, rng), Permutation.identity(4))


def test_example4_cells(ex4, t1):
    sigma, _ = pm_from_tour(t1, ex4)
    r = build_reduced(ex4, sigma)
    got = {cell: r.entry(*cell) for cell in EX4_CELLS}
    assert got == EX4_CELLS


def test_example4_cycle_values(ex4, t1):
    sigma, _ = pm_from_tour(t1, ex4)
    r = build_reduced(ex4, sigma)
    assert cycle_value(r, (11, 9)) == 5
    assert cycle_value(r, (4, 8, 10, 12)) == 2
    assert cycle_value(r, (8, 10, 12, 4)) == 2
    with pytest.raises(ValueError):
        cycle_value(r, (3,))


@given(st.integers(0, 10_000), st.permutations(list(range(1, 9))))
def test_entries_recompute(seed, order):
    m = random_matrix(8, np.random.default_rng(seed))
    d = Permutation([order[(order.index(a) + 1) % 8] for a in range(1, 9)])
    r = build_reduced(m, d)
    for a in range(1, 9):
        assert r.entry(a, a) == 0
        for b in range(1, 9):
            if d(b) == a:
                assert not r.allowed(a, b)
            elif a != b:
                assert r.entry(a, b) + m.cost(a, d(a)) == m.cost(a, d(b))


def test_extra_forbidden(rng):
    d = Permutation([2, 3, 4, 1])
    r = build_reduced(random_matrix(4, rng), d, [(1, 3)])
    assert not r.allowed(1, 3)
    assert r.forbidden.sum() == 5


def test_values_read_only(ex4, t1):
    r = build_reduced(ex4, pm_from_tour(t1, ex4)[0])
    with pytest.raises(ValueError):
        r.values[0, 1] = 3


def test_format_table_headers(ex4, t1):
    sigma, _ = pm_from_tour(t1, ex4)
    lines = format_table(build_reduced(ex4, sigma)).splitlines()
    assert lines[1].split()[:4] == ["3", "9", "1", "7"]
    assert lines[2].split()[:5] == ["1", "0", "27", "-", "2"]


def test_determining_vertex_small():
    assert determining_vertex(WeightedCycle.from_weights([-3, 1])) == 1
    c = WeightedCycle.from_weights([5, -2, -5])
    starts = qualifying_starts(c)
    v = determining_vertex(c)
    assert v is not None and v - 1 in starts
    for s in starts:
        run = 0
        for i in range(3):
            run += c.weights[(s + i) % 3]
            assert run <= 0


def test_determining_vertex_none_when_positive():
    assert determining_vertex(WeightedCycle.from_weights([2, 3])) is None
    assert determining_vertex(WeightedCycle.from_weights([2, 3]), 5) == 1


def test_zero_weights_count_as_nonpositive():
    assert determining_vertex(WeightedCycle.from_weights([0, 0, 0])) == 1


weights = st.lists(st.integers(-50, 50), min_size=2, max_size=12)


@given(weights, st.integers(-20, 20))
def test_bounded_start_exists(w, slack):
    bound = max(0, sum(w)) + abs(slack)
    v = determining_vertex(WeightedCycle.from_weights(w), bound)
    assert v is not None


@given(weights)
def test_dual_start_for_positive(w):
    c = WeightedCycle.from_weights(w)
    if c.total > 0:
        assert determining_vertex(c, 0, dual=True) is not None
        # negating the weights turns the dual question into the primal one
        neg = WeightedCycle.from_weights([-x for x in w])
        assert qualifying_starts(neg, 0) == qualifying_starts(c, 0, dual=True)
