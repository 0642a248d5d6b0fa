"""Independent oracles shared across the test modules.

Everything here is deliberately naive: dense scans, exhaustive products,
permutation actions.  The library is checked against these, never the
other way round.
"""

from __future__ import annotations

import random
from fractions import Fraction

from corefree import SubgroupPresentation, Word, free_reduce


def dense_defect(f, window=None) -> tuple[Fraction, tuple[int, int]]:
    """Full window scan of |f(m+n)-f(m)-f(n)| in canonical pair order."""
    S = f.support_bound
    W = window if window is not None else 2 * S + 2

    def key(p):
        m, n = p
        return (abs(m) + abs(n), abs(m), 0 if m > 0 else 1, 0 if n > 0 else 1, m, n)

    best, wit = Fraction(0), (0, 0)
    pairs = ((m, n) for m in range(-W, W + 1) for n in range(-W, W + 1))
    for m, n in sorted(pairs, key=key):
        d = abs(f(m + n) - f(m) - f(n))
        if d > best:
            best, wit = d, (m, n)
    return best, wit


def subgroup_products(p: SubgroupPresentation, max_factors: int) -> set[Word]:
    """All products of at most max_factors generators and inverses."""
    gens = list(p.generators) + [~w for w in p.generators]
    elements = {Word.identity(p.rank)}
    frontier = {Word.identity(p.rank)}
    for _ in range(max_factors):
        nxt = set()
        for w in frontier:
            for g in gens:
                u = w * g
                if u not in elements:
                    elements.add(u)
                    nxt.add(u)
        frontier = nxt
    return elements


def naive_core_vertices(graph) -> set[int]:
    """Fixpoint of valence-1 trimming by repeated full scans.  The result
    (the maximal min-valence-2 subgraph) is deletion-order independent."""
    alive = set(range(graph.num_vertices))
    while True:
        valence = {v: 0 for v in alive}
        for m in graph.succ:
            for v, u in m.items():
                if v in alive and u in alive:
                    valence[v] += 1
                    valence[u] += 1
        doomed = {v for v in alive if valence[v] <= 1}
        if not doomed:
            return alive
        alive -= doomed


class PermutationInstance:
    """A finite-index subgroup built from a transitive permutation action:
    the stabiliser of the point 0, presented by its Schreier generators.
    The action itself is an exact membership oracle for arbitrary words."""

    def __init__(self, rng: random.Random, rank: int, degree: int):
        while True:
            perms = []
            for _ in range(rank):
                perm = list(range(degree))
                rng.shuffle(perm)
                perms.append(perm)
            if self._transitive(perms, degree):
                break
        self.rank = rank
        self.degree = degree
        self.perms = perms
        self.inv_perms = [self._invert(p) for p in perms]
        self.presentation = self._schreier_presentation()

    @staticmethod
    def _invert(perm: list[int]) -> list[int]:
        out = [0] * len(perm)
        for i, j in enumerate(perm):
            out[j] = i
        return out

    @staticmethod
    def _transitive(perms, degree) -> bool:
        # permutations have finite order, so the forward orbit is the orbit
        seen = {0}
        stack = [0]
        while stack:
            s = stack.pop()
            for p in perms:
                if p[s] not in seen:
                    seen.add(p[s])
                    stack.append(p[s])
        return len(seen) == degree

    def act(self, state: int, letter: int) -> int:
        if letter > 0:
            return self.perms[letter - 1][state]
        return self.inv_perms[-letter - 1][state]

    def act_word(self, w: Word, state: int = 0) -> int:
        for s in w.letters:
            state = self.act(state, s)
        return state

    def member(self, w: Word) -> bool:
        return self.act_word(w) == 0

    def _schreier_presentation(self) -> SubgroupPresentation:
        transversal = {0: ()}
        queue = [0]
        while queue:
            s = queue.pop(0)
            for i in range(1, self.rank + 1):
                for letter in (i, -i):
                    t = self.act(s, letter)
                    if t not in transversal:
                        transversal[t] = transversal[s] + (letter,)
                        queue.append(t)
        gens = []
        for s in range(self.degree):
            for i in range(1, self.rank + 1):
                t = self.act(s, i)
                letters = (
                    transversal[s]
                    + (i,)
                    + tuple(-x for x in reversed(transversal[t]))
                )
                w = free_reduce(self.rank, letters)
                if not w.is_identity():
                    gens.append(w)
        return SubgroupPresentation(self.rank, tuple(gens))
