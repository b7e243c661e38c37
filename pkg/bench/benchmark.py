"""Time the compiled kernels against the pure-Python fallback.

    python3 bench/benchmark.py [--repeat N]
"""
import argparse
import time

import numpy as np

from symtsp import EXAMPLE4_START_TOUR, _backend, _kernels_py, load_fixture
from symtsp.fwcycles import harvest_cycles
from symtsp.instance import random_matrix
from symtsp.permutation import Tour, pm_from_tour
from symtsp.reduced import build_reduced

try:
    from symtsp import _kernels as compiled
except ImportError:
    compiled = None


def _best_of(fn, repeat):
    best = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        dt = time.perf_counter() - t
        best = dt if best is None else min(best, dt)
    return best, out


def _harvest_with(kernels, r, sigma, bound):
    saved = _backend._compiled
    _backend._compiled = kernels
    try:
        return harvest_cycles(r, sigma, bound)
    finally:
        _backend._compiled = saved


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if compiled is None:
        print("compiled kernels not built; only the fallback can run")

    m = load_fixture("example4")
    sigma, pmv = pm_from_tour(Tour(EXAMPLE4_START_TOUR), m)
    r = build_reduced(m, sigma)
    rows = []
    for label, kern in (("python", None), ("compiled", compiled)):
        if label == "compiled" and compiled is None:
            continue
        dt, h = _best_of(lambda: _harvest_with(kern, r, sigma, 11), args.repeat)
        rows.append(("harvest example4", label, dt, len(h.cycles)))

    w = random_matrix(14, np.random.default_rng(7)).w
    dt, (v, _) = _best_of(lambda: _kernels_py.held_karp(w), 1)
    rows.append(("held-karp n=14", "python", dt, v))
    if compiled is not None:
        dt, (v, _) = _best_of(lambda: compiled.held_karp(w), args.repeat)
        rows.append(("held-karp n=14", "compiled", dt, v))

    print(f"{'kernel':<18}{'backend':<10}{'seconds':>10}  result")
    for name, label, dt, res in rows:
        print(f"{name:<18}{label:<10}{dt:>10.4f}  {res}")


if __name__ == "__main__":
    main()
