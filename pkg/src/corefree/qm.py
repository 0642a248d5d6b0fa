"""Split and relative quasimorphisms with exact rational defects.

Building blocks are finitely supported alternating functions on the
integers.  A split quasimorphism attaches one to each generator and sums
factor values over the syllable form of a word; its defect is the
maximum of the factor defects, and that value is computed exactly by a
finite window search.  Pulling a split quasimorphism back through the
basis automorphism, with all supports on multiples of the power bound,
gives a quasimorphism vanishing on the subgroup.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

from .basis import BasisCertificate, transformed_syllables
from .graphs import SubgroupPresentation
from .words import Word, syllables

Rational = Fraction


class AlternatingFunction:
    """Finitely supported f: Z -> Q with f(0) = 0 and f(-m) = -f(m),
    stored by its values on positive support points."""

    def __init__(self, values: Mapping[int, Fraction | int | str]):
        vals = {}
        for m, q in values.items():
            if not isinstance(m, int) or m <= 0:
                raise ValueError(f"support point {m!r} must be a positive integer")
            q = Fraction(q)
            if q != 0:
                vals[int(m)] = q
        self._values = vals
        self._items = tuple(sorted(vals.items()))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(m for m, _ in self._items)

    @property
    def support_bound(self) -> int:
        return self._items[-1][0] if self._items else 0

    def __call__(self, m: int) -> Fraction:
        if m >= 0:
            return self._values.get(m, Fraction(0))
        return -self._values.get(-m, Fraction(0))

    def is_zero(self) -> bool:
        return not self._items

    def items(self) -> tuple[tuple[int, Fraction], ...]:
        return self._items

    def __eq__(self, other) -> bool:
        return isinstance(other, AlternatingFunction) and self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __repr__(self) -> str:
        body = ", ".join(f"{m}: {q}" for m, q in self._items)
        return f"AlternatingFunction({{{body}}})"

    def to_json(self) -> dict:
        return {"support": [[m, str(q)] for m, q in self._items]}

    @staticmethod
    def from_json(data: dict) -> "AlternatingFunction":
        return AlternatingFunction({int(m): Fraction(q) for m, q in data.get("support", [])})


@dataclass(frozen=True)
class DefectReport:
    value: Fraction
    witness: tuple[int, int]


def _pair_key(pair: tuple[int, int]) -> tuple:
    m, n = pair
    return (abs(m) + abs(n), abs(m), 0 if m > 0 else 1, 0 if n > 0 else 1, m, n)


def defect_z(f: AlternatingFunction, window: Optional[int] = None) -> DefectReport:
    """Exact defect sup |f(m+n) - f(m) - f(n)| with a witness pair.

    The search window W = 2S+2 (S the support bound) is exhaustive: a
    nonzero term needs one of m, n, m+n in the support, and every such
    value pattern is already realised with |m|, |n| <= W.  Only pairs
    that can contribute are enumerated (all others are exactly zero),
    and values are scaled to integers over a common denominator.
    """
    S = f.support_bound
    W = window if window is not None else 2 * S + 2
    denom = math.lcm(*(q.denominator for _, q in f.items())) if not f.is_zero() else 1
    scaled: dict[int, int] = {}
    for m, q in f.items():
        v = int(q * denom)
        scaled[m] = v
        scaled[-m] = -v
    supp = [s for s in scaled if abs(s) <= W]
    candidates: set[tuple[int, int]] = set()
    for s in supp:
        for t in range(-W, W + 1):
            candidates.add((s, t))
            candidates.add((t, s))
            if -W <= s - t <= W:
                candidates.add((t, s - t))
    get = scaled.get
    best = 0
    witness = (0, 0)
    for m, n in sorted(candidates, key=_pair_key):
        d = abs(get(m + n, 0) - get(m, 0) - get(n, 0))
        if d > best:
            best = d
            witness = (m, n)
    return DefectReport(Fraction(best, denom), witness)


def embed_support(f: AlternatingFunction, m0: int) -> AlternatingFunction:
    """Push f onto the subgroup m0*Z: the result g has g(m0*t) = f(t) and
    vanishes off multiples of m0.  The defect is unchanged."""
    if m0 < 1:
        raise ValueError("m0 must be positive")
    return AlternatingFunction({m0 * m: q for m, q in f.items()})


class SplitQuasimorphism:
    """One alternating factor per generator; the value of a word is the
    sum of factor values over its syllable exponents."""

    def __init__(self, rank: int, factors: Sequence[AlternatingFunction]):
        if len(factors) != rank:
            raise ValueError(f"need {rank} factors, got {len(factors)}")
        self.rank = rank
        self.factors = tuple(factors)

    def __call__(self, w: Word) -> Fraction:
        if w.rank != self.rank:
            raise ValueError("rank mismatch")
        return sum((self.factors[i - 1](e) for i, e in syllables(w)), Fraction(0))

    def defect(self) -> Fraction:
        """max over factors of the integer defect; this equals the true
        defect of the word evaluator over all pairs."""
        return max((defect_z(f).value for f in self.factors), default=Fraction(0))

    def defect_witness(self) -> tuple[Word, Word]:
        """A word pair attaining the defect, built from the worst factor's
        integer witness."""
        best_i, best = 1, DefectReport(Fraction(0), (0, 0))
        for i, f in enumerate(self.factors, start=1):
            rep = defect_z(f)
            if rep.value > best.value:
                best_i, best = i, rep
        m, n = best.witness
        return (
            Word.generator(self.rank, best_i, m) if m else Word.identity(self.rank),
            Word.generator(self.rank, best_i, n) if n else Word.identity(self.rank),
        )

    def to_json(self) -> dict:
        return {"rank": self.rank, "factors": [f.to_json() for f in self.factors]}

    @staticmethod
    def from_json(data: dict) -> "SplitQuasimorphism":
        return SplitQuasimorphism(
            int(data["rank"]),
            [AlternatingFunction.from_json(f) for f in data["factors"]],
        )


def eval_split(q: SplitQuasimorphism, w: Word) -> Fraction:
    return q(w)


def split_defect(q: SplitQuasimorphism) -> Fraction:
    return q.defect()


def coboundary1(f: Callable[[Word], Fraction], g: Word, h: Word) -> Fraction:
    """d1 f (g, h) = f(g) + f(h) - f(gh)."""
    return f(g) + f(h) - f(g * h)


def coboundary2(
    c: Callable[[Word, Word], Fraction], g: Word, h: Word, k: Word
) -> Fraction:
    """d2 c (g, h, k) = c(h,k) - c(gh,k) + c(g,hk) - c(g,h)."""
    return c(h, k) - c(g * h, k) + c(g, h * k) - c(g, h)


# --- quasimorphisms vanishing on the subgroup ------------------------------


class RelativeQuasimorphism:
    """A split quasimorphism in the transformed coordinates of a basis
    certificate, with every factor supported on multiples of the power
    bound.  Subgroup elements only realise smaller exponents, so the
    function vanishes identically on the subgroup."""

    def __init__(self, certificate: BasisCertificate, base_factors: Sequence[AlternatingFunction]):
        if len(base_factors) != certificate.rank:
            raise ValueError(f"need {certificate.rank} factors")
        m0 = certificate.power_bound
        for i, f in enumerate(base_factors, start=1):
            for m in f.support:
                if m % m0 != 0:
                    raise ValueError(
                        f"factor {i} supported at {m}, not a multiple of the power bound {m0}"
                    )
        self.certificate = certificate
        self.base_factors = tuple(base_factors)

    def __call__(self, w: Word) -> Fraction:
        total = Fraction(0)
        for i, e in transformed_syllables(self.certificate, w):
            total += self.base_factors[i - 1](e)
        return total

    def to_json(self) -> dict:
        return {
            "certificate": self.certificate.to_json(),
            "factors": [f.to_json() for f in self.base_factors],
        }

    @staticmethod
    def from_json(data: dict) -> "RelativeQuasimorphism":
        return RelativeQuasimorphism(
            BasisCertificate.from_json(data["certificate"]),
            [AlternatingFunction.from_json(f) for f in data["factors"]],
        )


def make_relative_qm(
    cert: BasisCertificate, base_factors: Sequence[AlternatingFunction]
) -> RelativeQuasimorphism:
    return RelativeQuasimorphism(cert, base_factors)


def nontriviality_witness(r: RelativeQuasimorphism) -> Optional[tuple[Word, Fraction]]:
    """A word outside the subgroup where r is provably nonzero: pull a
    supported power x_i^(m0 t) back through the inverse automorphism."""
    cert = r.certificate
    inv = cert.automorphism.inverse()
    for i, f in enumerate(r.base_factors, start=1):
        for m, _ in f.items():
            w = inv.apply(Word.generator(cert.rank, i, m))
            value = r(w)
            if value != 0:
                return w, value
    return None


@dataclass
class VanishingReport:
    samples_checked: int
    failures: list[tuple[Word, Fraction]]

    @property
    def ok(self) -> bool:
        return not self.failures


def check_vanishing(
    r: RelativeQuasimorphism,
    p: Optional[SubgroupPresentation] = None,
    samples: int = 1000,
    length: int = 20,
    rng: Optional[random.Random] = None,
) -> VanishingReport:
    """Evaluate r on random products of the subgroup generators; every
    value must be zero.  p defaults to the certificate's presentation."""
    rng = rng if rng is not None else random.Random(0)
    cert = r.certificate
    gens = p.generators if p is not None else cert.original_generators
    failures: list[tuple[Word, Fraction]] = []
    checked = 0
    for _ in range(samples):
        w = Word.identity(cert.rank)
        if gens:
            for _ in range(rng.randint(1, length)):
                h = gens[rng.randrange(len(gens))]
                w = w * (h if rng.random() < 0.5 else ~h)
        value = r(w)
        checked += 1
        if value != 0:
            failures.append((w, value))
    return VanishingReport(checked, failures)


# --- counting quasimorphisms ------------------------------------------------


def counting_qm(pattern: Word, g: Word) -> int:
    """Occurrences (with overlaps) of the pattern as a contiguous subword
    of g, minus occurrences of the inverse pattern."""
    if pattern.is_identity():
        raise ValueError("pattern must be nonempty")
    if pattern.rank != g.rank:
        raise ValueError("rank mismatch")
    return _count(pattern.letters, g.letters) - _count((~pattern).letters, g.letters)


def _count(pattern: tuple[int, ...], text: tuple[int, ...]) -> int:
    k = len(pattern)
    return sum(1 for i in range(len(text) - k + 1) if text[i : i + k] == pattern)


def sample_defect(
    f: Callable[[Word], Fraction],
    word_sampler: Callable[[], Word],
    pairs: int,
) -> Fraction:
    """Empirical lower bound for the defect: max |d1 f| over sampled pairs."""
    best = Fraction(0)
    for _ in range(pairs):
        g = word_sampler()
        h = word_sampler()
        best = max(best, abs(coboundary1(f, g, h)))
    return best
