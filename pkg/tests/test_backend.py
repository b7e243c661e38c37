import numpy as np
import pytest

from symtsp import _backend, _kernels_py
from symtsp.fwcycles import harvest_cycles
from symtsp.instance import random_matrix
from symtsp.permutation import Tour, pm_from_tour, tour_value
from symtsp.reduced import build_reduced

compiled = pytest.mark.skipif(_backend._compiled is None, reason="compiled kernels not built")


@compiled
@pytest.mark.parametrize("seed", range(5))
def test_held_karp_matches(seed):
    m = random_matrix(10, np.random.default_rng(seed))
    assert _backend._compiled.held_karp(m.w)[0] == _kernels_py.held_karp(m.w)[0]


@compiled
@pytest.mark.parametrize("seed", range(4))
def test_harvest_matches(seed, monkeypatch):
    m = random_matrix(12, np.random.default_rng(seed))
    t = Tour(list(range(1, 13)))
    sigma, pmv = pm_from_tour(t, m)
    r = build_reduced(m, sigma)
    bound = tour_value(t, m) - pmv - 1
    fast = harvest_cycles(r, sigma, bound)
    monkeypatch.setattr(_backend, "_compiled", None)
    slow = harvest_cycles(r, sigma, bound)
    assert [(c.vertices, c.value) for c in fast.cycles] == [(c.vertices, c.value) for c in slow.cycles]
    assert fast.pass_counts == slow.pass_counts


def test_backend_name():
    assert _backend.NAME in ("compiled", "python")
