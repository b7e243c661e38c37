"""Permutations, perfect matchings and tours on the vertex set {1..n}.

Products follow function composition: ``compose(p, q)(a) == p(q(a))``.  Under
this convention a derangement ``D`` updated by a cycle ``s`` found in
``D^-1 M^-`` is ``compose(D, s)``.

Values use the permutation convention throughout: a permutation ``p`` is worth
``sum(cost(a, p(a)))``.  A perfect matching viewed as a product of 2-cycles
therefore counts every edge twice, so a tour's cheaper set of alternating
edges is worth at most the tour itself.
"""
from __future__ import annotations

import re

from .instance import CostMatrix


class PermutationError(ValueError):
    pass


class Permutation:
    """Immutable bijection of {1..n}; ``img[a-1]`` is the image of ``a``."""

    __slots__ = ("img",)

    def __init__(self, img):
        img = tuple(int(x) for x in img)
        n = len(img)
        if sorted(img) != list(range(1, n + 1)):
            raise PermutationError(f"not a permutation of 1..{n}: {img}")
        self.img = img

    @classmethod
    def identity(cls, n: int):
        return cls(range(1, n + 1))

    @classmethod
    def from_cycles(cls, n: int, cycles):
        img = list(range(1, n + 1))
        seen = set()
        for cyc in cycles:
            cyc = tuple(cyc)
            for a in cyc:
                if a in seen or not 1 <= a <= n:
                    raise PermutationError(f"bad or repeated point {a} in cycles {cycles}")
                seen.add(a)
            for i, a in enumerate(cyc):
                img[a - 1] = cyc[(i + 1) % len(cyc)]
        return cls(img)

    @classmethod
    def parse(cls, n: int, text: str):
        return cls.from_cycles(n, parse_cycles(text))

    @property
    def n(self) -> int:
        return len(self.img)

    def __call__(self, a: int) -> int:
        return self.img[a - 1]

    def __mul__(self, other):
        return compose(self, other)

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.img == other.img

    def __hash__(self):
        return hash(self.img)

    def inverse(self):
        return inverse(self)

    def cycles(self):
        return cycle_decompose(self)

    def fixed_points(self):
        return [a for a in range(1, self.n + 1) if self(a) == a]

    def is_derangement(self) -> bool:
        return all(self(a) != a for a in range(1, self.n + 1))

    def is_involution(self) -> bool:
        return all(self(self(a)) == a for a in range(1, self.n + 1))

    def __str__(self):
        return format_cycles(self.cycles())

    def __repr__(self):
        return f"{type(self).__name__}({self})"


class PerfectMatching(Permutation):
    """A fixed-point-free involution: n/2 disjoint 2-cycles."""

    __slots__ = ()

    def __init__(self, img):
        super().__init__(img)
        for a in range(1, self.n + 1):
            b = self(a)
            if b == a or self(b) != a:
                raise PermutationError(f"not a perfect matching at point {a}: {self.img}")

    @classmethod
    def from_pairs(cls, n: int, pairs):
        return cls(Permutation.from_cycles(n, pairs).img)

    def pairs(self):
        """2-cycles as ``(a, b)`` with a < b, ordered by ``a``."""
        return [(a, self(a)) for a in range(1, self.n + 1) if a < self(a)]

    def pair_index(self):
        """Map vertex -> 0-based number of its 2-cycle (ordered by smaller point)."""
        idx = {}
        for k, (a, b) in enumerate(self.pairs()):
            idx[a] = idx[b] = k
        return idx


class Tour:
    """A Hamiltonian cycle given as a cyclic vertex order."""

    __slots__ = ("order",)

    def __init__(self, order):
        order = tuple(int(x) for x in order)
        n = len(order)
        if n < 3:
            raise PermutationError(f"a tour needs at least 3 vertices, got {n}")
        if sorted(order) != list(range(1, n + 1)):
            raise PermutationError(f"tour must visit each of 1..{n} once: {order}")
        self.order = order

    @classmethod
    def from_permutation(cls, p: Permutation):
        cyc = p.cycles()
        if len(cyc) != 1 or len(cyc[0]) != p.n:
            raise PermutationError(f"permutation is not a single n-cycle: {p}")
        return cls(cyc[0])

    @property
    def n(self) -> int:
        return len(self.order)

    def as_permutation(self) -> Permutation:
        img = [0] * self.n
        for i, a in enumerate(self.order):
            img[a - 1] = self.order[(i + 1) % self.n]
        return Permutation(img)

    def edges(self):
        o = self.order
        return [(o[i], o[(i + 1) % len(o)]) for i in range(len(o))]

    def edge_set(self):
        return frozenset(frozenset(e) for e in self.edges())

    def canonical(self):
        """Rotation starting at 1, direction with the smaller second vertex."""
        o = self.order
        i = o.index(1)
        fwd = o[i:] + o[:i]
        bwd = (fwd[0],) + tuple(reversed(fwd[1:]))
        return min(fwd, bwd)

    def __eq__(self, other):
        return isinstance(other, Tour) and self.edge_set() == other.edge_set()

    def __hash__(self):
        return hash(self.edge_set())

    def __repr__(self):
        return f"Tour({list(self.order)})"


# -- algebra ------------------------------------------------------------------

def compose(p: Permutation, q: Permutation) -> Permutation:
    """``(p o q)(a) = p(q(a))``."""
    if p.n != q.n:
        raise PermutationError(f"size mismatch {p.n} != {q.n}")
    return Permutation(p.img[b - 1] for b in q.img)


def inverse(p: Permutation) -> Permutation:
    inv = [0] * p.n
    for a, b in enumerate(p.img, start=1):
        inv[b - 1] = a
    return type(p)(inv) if isinstance(p, PerfectMatching) else Permutation(inv)


def cycle_decompose(p: Permutation):
    """Non-trivial cycles, each starting at its smallest point, sorted by that point."""
    seen = [False] * (p.n + 1)
    out = []
    for a in range(1, p.n + 1):
        if seen[a] or p(a) == a:
            continue
        cyc = [a]
        seen[a] = True
        b = p(a)
        while b != a:
            cyc.append(b)
            seen[b] = True
            b = p(b)
        out.append(tuple(cyc))
    return out


def canonical_cycle(cyc) -> tuple:
    """Rotate a cycle so that its smallest point comes first."""
    cyc = tuple(cyc)
    i = cyc.index(min(cyc))
    return cyc[i:] + cyc[:i]


def format_cycles(cycles) -> str:
    cycles = sorted(canonical_cycle(c) for c in cycles)
    if not cycles:
        return "()"
    return "".join("(" + " ".join(map(str, c)) + ")" for c in cycles)


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str):
    text = text.strip()
    if text in ("", "()"):
        return []
    rest = _CYCLE_RE.sub("", text).strip()
    if rest:
        raise PermutationError(f"cannot parse cycle notation {text!r}")
    return [tuple(int(x) for x in body.split()) for body in _CYCLE_RE.findall(text) if body.split()]


def cycle_permutation(n: int, cyc) -> Permutation:
    return Permutation.from_cycles(n, [cyc])


# -- values -------------------------------------------------------------------

def derangement_value(d: Permutation, m: CostMatrix) -> int:
    if not d.is_derangement():
        raise PermutationError(f"not a derangement: {d}")
    w = m.w
    return int(sum(w[a - 1, d.img[a - 1] - 1] for a in range(1, d.n + 1)))


def pm_value(pm: Permutation, m: CostMatrix) -> int:
    """Permutation value of a matching: every edge counted in both directions."""
    return derangement_value(pm, m)


def tour_value(t: Tour, m: CostMatrix) -> int:
    w = m.w
    return int(sum(w[a - 1, b - 1] for a, b in t.edges()))


# -- matchings and tours ------------------------------------------------------

def pm_from_tour(t: Tour, m: CostMatrix):
    """Cheaper of the tour's two alternating edge sets, and its value.

    Ties go to the set holding the tour's first edge ``(order[0], order[1])``.
    """
    n = t.n
    if n % 2:
        raise PermutationError(f"a tour on an odd number of vertices ({n}) has no alternating matching")
    o = t.order
    first = [(o[i], o[i + 1]) for i in range(0, n, 2)]
    second = [(o[i], o[(i + 1) % n]) for i in range(1, n, 2)]
    w = m.w

    def val(edges):
        return 2 * int(sum(w[a - 1, b - 1] for a, b in edges))

    v1, v2 = val(first), val(second)
    edges, v = (first, v1) if v1 <= v2 else (second, v2)
    return PerfectMatching.from_pairs(n, edges), v


def is_acceptable(pm: PerfectMatching, cyc) -> bool:
    if len(cyc) < 2 or len(set(cyc)) != len(cyc):
        return False
    partners = set()
    for a in cyc:
        key = min(a, pm(a))
        if key in partners:
            return False
        partners.add(key)
    return True


def apply_acceptable_cycle(pm: PerfectMatching, cyc) -> PerfectMatching:
    """Swap the matched edges touched by ``cyc`` for ``{a_i, pm(a_{i+1})}``."""
    cyc = tuple(cyc)
    if not is_acceptable(pm, cyc):
        raise PermutationError(f"cycle {cyc} is not acceptable for {pm}")
    img = list(pm.img)
    m = len(cyc)
    for i, a in enumerate(cyc):
        b = pm(cyc[(i + 1) % m])
        img[a - 1] = b
        img[b - 1] = a
    return PerfectMatching(img)


def tour_from_full_cycle(pm: PerfectMatching, cyc) -> Tour:
    """Tour ``(a1 pm(a2) a2 pm(a3) ... am pm(a1))`` from an acceptable n/2-cycle."""
    cyc = tuple(cyc)
    if not is_acceptable(pm, cyc):
        raise PermutationError(f"cycle {cyc} is not acceptable for {pm}")
    if 2 * len(cyc) != pm.n:
        raise PermutationError(
            f"cycle has {len(cyc)} points, a tour needs {pm.n // 2}; use patcher.circuit_from_cycle")
    order = []
    m = len(cyc)
    for i, a in enumerate(cyc):
        order.append(a)
        order.append(pm(cyc[(i + 1) % m]))
    return Tour(order)
