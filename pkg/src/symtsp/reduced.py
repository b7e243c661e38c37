"""Reduced matrices ``D^-1 M^-`` and start-vertex selection for weighted cycles.

For a derangement ``d`` the reduced entry is
``entry(a, b) = cost(a, d(b)) - cost(a, d(a))``: moving ``a`` onto the image
of ``b`` instead of its own.  The diagonal is 0.  A cell with ``d(b) == a``
would read the infinite diagonal of the cost matrix and is forbidden, as is
any cell the caller adds to ``extra_forbidden``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import CostMatrix
from .permutation import Permutation, PermutationError


class ForbiddenArc(ValueError):
    pass


# Large enough to never win a comparison, small enough not to overflow int64 sums.
BLOCKED = np.int64(1) << 40


class ReducedMatrix:
    """Immutable reduced matrix for ``base`` and derangement ``perm``.

    ``values`` is a 0-based int64 array with :data:`BLOCKED` in forbidden
    cells; ``forbidden`` is the matching boolean mask.
    """

    __slots__ = ("n", "base", "perm", "values", "forbidden")

    def __init__(self, base: CostMatrix, perm: Permutation, extra_forbidden=()):
        if perm.n != base.n:
            raise PermutationError(f"size mismatch: matrix {base.n}, permutation {perm.n}")
        if not perm.is_derangement():
            raise PermutationError(f"reduced matrix needs a derangement, {perm} has fixed points")
        n = base.n
        img = np.array(perm.img, dtype=np.int64) - 1
        w = base.w
        own = w[np.arange(n), img]
        vals = w[:, img] - own[:, None]
        forb = img[None, :] == np.arange(n)[:, None]
        for a, b in extra_forbidden:
            if a != b:
                forb[a - 1, b - 1] = True
        np.fill_diagonal(forb, False)
        vals = np.where(forb, BLOCKED, vals)
        np.fill_diagonal(vals, 0)
        vals.setflags(write=False)
        forb.setflags(write=False)
        self.n = n
        self.base = base
        self.perm = perm
        self.values = vals
        self.forbidden = forb

    def allowed(self, a: int, b: int) -> bool:
        return a != b and not self.forbidden[a - 1, b - 1]

    def entry(self, a: int, b: int) -> int:
        if self.forbidden[a - 1, b - 1]:
            raise ForbiddenArc(f"arc ({a}, {b}) is forbidden")
        return int(self.values[a - 1, b - 1])

    def arc_weights(self, cyc):
        cyc = tuple(cyc)
        return [self.entry(a, cyc[(i + 1) % len(cyc)]) for i, a in enumerate(cyc)]

    def __repr__(self):
        return f"ReducedMatrix(n={self.n}, perm={self.perm})"


def build_reduced(m: CostMatrix, d: Permutation, extra_forbidden=()) -> ReducedMatrix:
    return ReducedMatrix(m, d, extra_forbidden)


def cycle_value(r: ReducedMatrix, cyc) -> int:
    cyc = tuple(cyc)
    if len(cyc) < 2:
        raise ValueError(f"a cycle needs at least 2 vertices: {cyc}")
    return sum(r.arc_weights(cyc))


def format_table(r: ReducedMatrix) -> str:
    """Text table: first header row is the column vertex, second its image."""
    n = r.n
    width = max(4, max(len(str(int(x))) for x in r.values[~r.forbidden]) + 1)
    cell = lambda s: str(s).rjust(width)
    lines = [cell("") + "".join(cell(b) for b in range(1, n + 1)),
             cell("") + "".join(cell(r.perm(b)) for b in range(1, n + 1))]
    for a in range(1, n + 1):
        row = [cell("-") if r.forbidden[a - 1, b - 1] else cell(int(r.values[a - 1, b - 1]))
               for b in range(1, n + 1)]
        lines.append(cell(a) + "".join(row))
    return "\n".join(lines)


@dataclass(frozen=True)
class WeightedCycle:
    """``weights[i]`` is the arc from ``vertices[i]`` to the next vertex."""

    vertices: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.vertices) < 2 or len(self.vertices) != len(self.weights):
            raise ValueError("a weighted cycle needs >= 2 vertices and one weight per arc")

    @classmethod
    def from_weights(cls, weights):
        return cls(tuple(range(1, len(weights) + 1)), tuple(int(x) for x in weights))

    @classmethod
    def from_reduced(cls, r: ReducedMatrix, cyc):
        return cls(tuple(cyc), tuple(r.arc_weights(cyc)))

    @property
    def total(self) -> int:
        return sum(self.weights)


def qualifying_starts(c: WeightedCycle, bound: int = 0, dual: bool = False):
    """Positions whose running partial sums all stay ``<= bound`` (``>= bound`` if dual)."""
    w = c.weights
    k = len(w)
    out = []
    for s in range(k):
        run = 0
        ok = True
        for i in range(k):
            run += w[(s + i) % k]
            if (run < bound) if dual else (run > bound):
                ok = False
                break
        if ok:
            out.append(s)
    return out


def determining_vertex(c: WeightedCycle, bound: int = 0, dual: bool = False):
    """Smallest-label vertex from which every partial sum respects ``bound``.

    With ``dual`` the test is reversed (all partial sums ``>= bound``), which
    is the orientation that always succeeds for a positive cycle and
    ``bound = 0``.  Returns None when no start qualifies.
    """
    starts = qualifying_starts(c, bound, dual)
    if not starts:
        return None
    return min(c.vertices[s] for s in starts)
