import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symtsp.instance import (INF, CostMatrix, InstanceError, dump_matrix, load_matrix, neighbor_rank,
                             pad_odd, random_matrix, symmetrize_asymmetric, validate_symmetry)
from symtsp.oracle import brute_tsp
from symtsp.permutation import Tour, tour_value


def test_smallest_instance():
    m = load_matrix("2\nINF 5\n5 INF")
    assert m.n == 2 and m.cost(1, 2) == 5 and m.cost(2, 1) == 5
    assert m.cost(1, 1) == INF


def test_example3_cells(ex3):
    assert ex3.n == 20
    assert ex3.cost(1, 2) == 26
    assert ex3.cost(15, 20) == 2


@pytest.mark.parametrize("text, fragment", [
    ("3\nINF 1\n1 INF", "dimension mismatch"),
    ("2\nINF 5 7\n5 INF", "dimension mismatch"),
    ("2\nINF x\n5 INF", "line 2, column 2"),
    ("2\nINF INF\n5 INF", "INF off the diagonal"),
    ("two\n", "vertex count"),
    ("", "empty"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(InstanceError, match=fragment):
        load_matrix(text)


def test_comments_and_round_trip(rng):
    m = random_matrix(7, rng)
    text = dump_matrix(m, "a comment\nspanning lines")
    assert text.startswith("# a comment\n")
    assert load_matrix(text) == m


def test_validate_symmetry():
    assert validate_symmetry(CostMatrix([[0, 3], [4, 0]])) == [(1, 2, 3, 4)]
    assert validate_symmetry(CostMatrix([[0, 5], [5, 0]])) == []


def test_fixtures_are_symmetric(ex3, ex4):
    assert validate_symmetry(ex3) == []
    assert validate_symmetry(ex4) == []


def test_neighbor_rank_example3_row1(ex3):
    nr = neighbor_rank(ex3)
    assert nr.row(1)[:4] == (3, 7, 6, 12)
    assert ex3.cost(1, 3) == ex3.cost(1, 7) == 4


def test_neighbor_rank_n2():
    nr = neighbor_rank(CostMatrix([[0, 9], [9, 0]]))
    assert nr(1, 1) == 2 and nr(2, 1) == 1


@given(st.integers(0, 10_000))
def test_neighbor_rank_matches_sort(seed):
    m = random_matrix(6, np.random.default_rng(seed), max_cost=5)
    nr = neighbor_rank(m)
    for a in range(1, 7):
        want = tuple(sorted((b for b in range(1, 7) if b != a), key=lambda b: (m.cost(a, b), b)))
        assert nr.row(a) == want
        assert all(nr.position(a, b) == want.index(b) + 1 for b in want)


def test_pad_odd():
    m = CostMatrix(np.full((3, 3), 7))
    p = pad_odd(m)
    assert p.n == 4
    assert all(p.cost(i, 4) == p.cost(4, i) == -7 for i in range(1, 4))
    assert validate_symmetry(p) == []
    with pytest.raises(InstanceError):
        pad_odd(p)


def test_pad_odd_uses_largest_entry(rng):
    m = random_matrix(5, rng, max_cost=99)
    w = m.w.copy()
    w[0, 1] = w[1, 0] = 99
    p = pad_odd(CostMatrix(w))
    assert p.cost(6, 3) == -99


def _directed_optimum(m):
    n = m.n
    best = None
    for rest in itertools.permutations(range(2, n + 1)):
        order = (1,) + rest
        v = sum(m.cost(order[i], order[(i + 1) % n]) for i in range(n))
        best = v if best is None else min(best, v)
    return best


@pytest.mark.parametrize("seed", range(5))
def test_asymmetric_transform_keeps_optimum(seed):
    rng = np.random.default_rng(seed)
    w = rng.integers(1, 30, size=(4, 4))
    m = CostMatrix(w)
    big = int(np.abs(m.w).sum()) + 1
    s = symmetrize_asymmetric(m, big)
    assert s.n == 8 and validate_symmetry(s) == []
    assert brute_tsp(s).value == _directed_optimum(m) - 4 * big


def test_asymmetric_transform_on_symmetric_input(rng):
    m = random_matrix(5, rng)
    big = int(np.abs(m.w).sum()) + 1
    s = symmetrize_asymmetric(m, big)
    assert brute_tsp(s).value == brute_tsp(m).value - 5 * big


def test_three_city_asymmetric_is_symmetric_after():
    m = CostMatrix([[0, 1, 2], [3, 0, 4], [5, 6, 0]])
    assert validate_symmetry(symmetrize_asymmetric(m)) == []


def test_random_matrix_range(rng):
    m = random_matrix(9, rng, max_cost=10)
    off = m.w[~np.eye(9, dtype=bool)]
    assert off.min() >= 1 and off.max() <= 10
    assert validate_symmetry(m) == []
