"""Cost matrices: parsing, validation, neighbour ranking and input transforms.

Vertices are labelled 1..n in every public function.  The dense array held by
:class:`CostMatrix` is 0-based; its diagonal is never read, and ``cost(a, a)``
reports :data:`INF` instead of a number.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INF = math.inf
"""Marker for the diagonal of a cost matrix (never stored as a number)."""


class InstanceError(ValueError):
    """Malformed instance text or an invalid matrix."""


class CostMatrix:
    """An n x n integer cost matrix with an infinite diagonal."""

    __slots__ = ("n", "w")

    def __init__(self, w):
        w = np.array(w, dtype=np.int64, copy=True)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise InstanceError(f"cost matrix must be square, got shape {w.shape}")
        if w.shape[0] < 2:
            raise InstanceError("cost matrix needs at least 2 vertices")
        np.fill_diagonal(w, 0)
        w.setflags(write=False)
        self.n = int(w.shape[0])
        self.w = w

    @classmethod
    def from_rows(cls, rows):
        """Build from nested rows; diagonal entries may be anything (``INF``, None...)."""
        n = len(rows)
        w = np.zeros((n, n), dtype=np.int64)
        for a, row in enumerate(rows):
            if len(row) != n:
                raise InstanceError(f"row {a + 1} has {len(row)} entries, expected {n}")
            for b, x in enumerate(row):
                if a != b:
                    w[a, b] = int(x)
        return cls(w)

    def cost(self, a: int, b: int):
        if a == b:
            return INF
        return int(self.w[a - 1, b - 1])

    def max_entry(self) -> int:
        off = ~np.eye(self.n, dtype=bool)
        return int(self.w[off].max())

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.w, self.w.T))

    def rows(self):
        """Nested lists with ``INF`` on the diagonal, 1-based view order."""
        out = self.w.tolist()
        for a in range(self.n):
            out[a][a] = INF
        return out

    def __eq__(self, other):
        return isinstance(other, CostMatrix) and np.array_equal(self.w, other.w)

    def __hash__(self):
        return hash(self.w.tobytes())

    def __repr__(self):
        return f"CostMatrix(n={self.n})"


@dataclass(frozen=True)
class NeighborRank:
    """``order[a-1]`` lists the other vertices by ascending ``cost(a, .)``."""

    order: tuple

    def __call__(self, a: int, t: int) -> int:
        return self.order[a - 1][t - 1]

    def row(self, a: int) -> tuple:
        return self.order[a - 1]

    def position(self, a: int, b: int) -> int:
        """1-based rank of column ``b`` in row ``a``."""
        return self.order[a - 1].index(b) + 1


# -- text format ------------------------------------------------------------

def load_matrix(text: str) -> CostMatrix:
    """Parse the instance format: a line holding n, then n rows of n tokens.

    Lines starting with ``#`` and blank lines are skipped.  ``INF`` is only
    accepted on the diagonal.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        lines.append((lineno, s))
    if not lines:
        raise InstanceError("empty instance")
    lineno, head = lines[0]
    try:
        n = int(head)
    except ValueError:
        raise InstanceError(f"line {lineno}, column 1: expected vertex count, got {head!r}") from None
    if n < 2:
        raise InstanceError(f"line {lineno}, column 1: vertex count must be >= 2, got {n}")
    body = lines[1:]
    if len(body) != n:
        raise InstanceError(f"dimension mismatch: header says {n} rows, found {len(body)}")
    w = np.zeros((n, n), dtype=np.int64)
    for a, (lineno, s) in enumerate(body):
        toks = s.split()
        if len(toks) != n:
            raise InstanceError(
                f"dimension mismatch: line {lineno} has {len(toks)} entries, expected {n}")
        for b, tok in enumerate(toks):
            col = b + 1
            if tok.upper() == "INF":
                if a != b:
                    raise InstanceError(f"line {lineno}, column {col}: INF off the diagonal")
                continue
            try:
                x = int(tok)
            except ValueError:
                raise InstanceError(
                    f"line {lineno}, column {col}: non-integer entry {tok!r}") from None
            if a != b:
                w[a, b] = x
    return CostMatrix(w)


def dump_matrix(m: CostMatrix, header: str | None = None) -> str:
    out = []
    if header:
        out.extend("# " + h if h else "#" for h in header.splitlines())
    out.append(str(m.n))
    width = max(3, max(len(str(int(x))) for x in m.w.flat))
    for a in range(m.n):
        toks = ["INF" if a == b else str(int(m.w[a, b])) for b in range(m.n)]
        out.append(" ".join(t.rjust(width) for t in toks))
    return "\n".join(out) + "\n"


# -- validation and ranking ---------------------------------------------------

def validate_symmetry(m: CostMatrix):
    """List ``(a, b, cost(a, b), cost(b, a))`` for every asymmetric pair, a < b."""
    bad = []
    w = m.w
    for a, b in zip(*np.nonzero(np.triu(w != w.T, 1))):
        bad.append((int(a) + 1, int(b) + 1, int(w[a, b]), int(w[b, a])))
    return bad


def symmetrized(m: CostMatrix):
    """Copy the upper triangle over the lower one.

    Returns the corrected matrix and the list of cells that changed, as
    ``(a, b, old, new)`` with a > b.
    """
    w = m.w.copy()
    fixes = []
    for a in range(m.n):
        for b in range(a):
            if w[a, b] != w[b, a]:
                fixes.append((a + 1, b + 1, int(w[a, b]), int(w[b, a])))
                w[a, b] = w[b, a]
    return CostMatrix(w), fixes


def neighbor_rank(m: CostMatrix) -> NeighborRank:
    order = []
    for a in range(m.n):
        others = [b for b in range(m.n) if b != a]
        # stable sort keeps smaller column first on ties
        others.sort(key=lambda b: int(m.w[a, b]))
        order.append(tuple(b + 1 for b in others))
    return NeighborRank(tuple(order))


# -- transforms -------------------------------------------------------------

def pad_odd(m: CostMatrix) -> CostMatrix:
    """Add a vertex whose edges all cost ``-N`` (N the largest entry)."""
    if m.n % 2 == 0:
        raise InstanceError(f"pad_odd needs an odd vertex count, got {m.n}")
    big = m.max_entry()
    w = np.full((m.n + 1, m.n + 1), -big, dtype=np.int64)
    w[: m.n, : m.n] = m.w
    return CostMatrix(w)


def symmetrize_asymmetric(m: CostMatrix, big: int | None = None) -> CostMatrix:
    """Jonker-Volgenant 2n-node symmetric form of a (possibly) asymmetric matrix.

    City ``i`` becomes the pair (i, n+i) joined by an edge of cost ``-big``;
    edge (n+i, j) costs ``c(i, j)``; every other edge costs ``+big``.  With
    ``big`` larger than the sum of all costs an optimal symmetric tour uses
    every pairing edge, so its value is ``optimal directed tour - n * big``.
    """
    n = m.n
    if big is None:
        big = int(np.abs(m.w).sum()) + 1
    w = np.full((2 * n, 2 * n), big, dtype=np.int64)
    for i in range(n):
        w[i, n + i] = w[n + i, i] = -big
        for j in range(n):
            if i != j:
                w[n + i, j] = w[j, n + i] = m.w[i, j]
    return CostMatrix(w)


def random_matrix(n: int, rng, max_cost: int = 99, min_cost: int = 1) -> CostMatrix:
    """Uniform random symmetric integer costs in [min_cost, max_cost]."""
    w = np.zeros((n, n), dtype=np.int64)
    iu = np.triu_indices(n, 1)
    w[iu] = rng.integers(min_cost, max_cost + 1, size=len(iu[0]))
    w = w + w.T
    return CostMatrix(w)
