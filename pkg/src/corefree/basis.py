"""Elementary Nielsen moves and the power-free basis construction.

The move phi_{i,k} fixes x_i and sends x_j to x_j x_i^k.  For a subgroup
H of infinite index, repeatedly applying phi_{i,-k} with a suitable k
strictly shrinks the set of core vertices lying on single-generator
cycles, and after finitely many steps no conjugate of H meets any cyclic
subgroup generated by a basis element y_i = psi^{-1}(x_i).  The folded
graph of the transformed subgroup then bounds every syllable exponent
occurring in H, which is the power bound reported in the certificate.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .graphs import (
    CoreGraph,
    FoldedGraph,
    SchreierAction,
    SubgroupPresentation,
    core,
    fold,
    loop_union,
)
from .words import (
    Syllable,
    Word,
    free_reduce,
    push_syllable,
    syllable_length,
    syllables,
    word_from_json,
    word_from_syllables,
    word_to_json,
)

DEFAULT_LENGTH_CAP = 10**6


class FiniteIndexError(ValueError):
    """The subgroup has finite index, so no power-free basis exists."""

    def __init__(self, index: int):
        super().__init__(f"subgroup has finite index {index}")
        self.index = index


class WordBlowupError(RuntimeError):
    """Word growth exceeded the configured letter cap."""


class UnboundedRunError(ValueError):
    """A single-generator cycle survives, so runs are unbounded."""


@dataclass(frozen=True)
class ElementaryMove:
    """x_index is fixed; every other x_j maps to x_j * x_index^power."""

    index: int
    power: int

    def __post_init__(self):
        if self.power == 0:
            raise ValueError("move power must be nonzero")
        if self.index < 1:
            raise ValueError("move index must be a generator index")

    def inverse(self) -> "ElementaryMove":
        return ElementaryMove(self.index, -self.power)


def apply_move(w: Word, move: ElementaryMove) -> Word:
    """Letter-level substitution followed by free reduction."""
    i, k = move.index, move.power
    tail = [i] * k if k > 0 else [-i] * (-k)  # x_i^k
    head = [-s for s in reversed(tail)]  # x_i^-k
    out: list[int] = []
    for s in w.letters:
        if abs(s) == i:
            out.append(s)
        elif s > 0:
            out.append(s)
            out.extend(tail)
        else:
            out.extend(head)
            out.append(s)
    return free_reduce(w.rank, out)


def _move_on_syllables(sylls: Iterable[Syllable], index: int, k: int) -> list[Syllable]:
    out: list[Syllable] = []
    for j, e in sylls:
        if j == index:
            push_syllable(out, (j, e))
        elif e > 0:
            for _ in range(e):
                push_syllable(out, (j, 1))
                push_syllable(out, (index, k))
        else:
            for _ in range(-e):
                push_syllable(out, (index, -k))
                push_syllable(out, (j, -1))
    return out


@dataclass(frozen=True)
class Automorphism:
    """A composition of elementary moves, applied left to right."""

    rank: int
    moves: tuple[ElementaryMove, ...] = ()

    def inverse(self) -> "Automorphism":
        return Automorphism(self.rank, tuple(m.inverse() for m in reversed(self.moves)))

    def apply_syllables(
        self, sylls: Sequence[Syllable], max_letters: int = DEFAULT_LENGTH_CAP
    ) -> list[Syllable]:
        out = list(sylls)
        for m in self.moves:
            out = _move_on_syllables(out, m.index, m.power)
            if syllable_length(out) > max_letters:
                raise WordBlowupError(
                    f"image exceeds {max_letters} letters while applying {m}"
                )
        return out

    def apply(self, w: Word, max_letters: int = DEFAULT_LENGTH_CAP) -> Word:
        return word_from_syllables(w.rank, self.apply_syllables(syllables(w), max_letters))

    def __call__(self, w: Word) -> Word:
        return self.apply(w)


@dataclass
class IterationStep:
    """One round of the basis iteration: the chosen label, the computed
    cycle-killing exponent, loop-vertex counts before/after, core size."""

    index: int
    power: int
    loops_before: int
    loops_after: int
    core_vertices: int

    def to_json(self) -> dict:
        return {
            "i": self.index,
            "k": self.power,
            "L_before": self.loops_before,
            "L_after": self.loops_after,
            "core_vertices": self.core_vertices,
        }

    @staticmethod
    def from_json(data: dict) -> "IterationStep":
        return IterationStep(
            index=int(data["i"]),
            power=int(data["k"]),
            loops_before=int(data["L_before"]),
            loops_after=int(data["L_after"]),
            core_vertices=int(data["core_vertices"]),
        )


@dataclass(frozen=True)
class BasisCertificate:
    """Output of the basis search: the automorphism psi, the transformed
    generators of psi(H), the basis words y_i = psi^{-1}(x_i), and the
    power bound m0 (every syllable exponent of an H-element, written in
    transformed coordinates, is strictly below it)."""

    rank: int
    original_generators: tuple[Word, ...]
    automorphism: Automorphism
    transformed_generators: tuple[Word, ...]
    basis: tuple[Word, ...]
    power_bound: int
    trace: tuple[IterationStep, ...]

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "original_generators": [word_to_json(w) for w in self.original_generators],
            "moves": [[m.index, m.power] for m in self.automorphism.moves],
            "basis": [word_to_json(w) for w in self.basis],
            "transformed_generators": [word_to_json(w) for w in self.transformed_generators],
            "m0": self.power_bound,
            "trace": [t.to_json() for t in self.trace],
        }

    @staticmethod
    def from_json(data: dict) -> "BasisCertificate":
        rank = int(data["rank"])
        moves = tuple(ElementaryMove(int(i), int(k)) for i, k in data["moves"])
        return BasisCertificate(
            rank=rank,
            original_generators=tuple(word_from_json(rank, w) for w in data["original_generators"]),
            automorphism=Automorphism(rank, moves),
            transformed_generators=tuple(
                word_from_json(rank, w) for w in data["transformed_generators"]
            ),
            basis=tuple(word_from_json(rank, w) for w in data["basis"]),
            power_bound=int(data["m0"]),
            trace=tuple(IterationStep.from_json(t) for t in data.get("trace", [])),
        )


def choose_index(loop_sets: Mapping[int, frozenset[int]]) -> int:
    """The label whose loop set is smallest among those strictly below the
    union; ties go to the smallest label."""
    union: set[int] = set()
    for vs in loop_sets.values():
        union.update(vs)
    if not union:
        raise ValueError("all loop sets are empty; nothing to choose")
    best = None
    for i in sorted(loop_sets):
        size = len(loop_sets[i])
        if size < len(union) and (best is None or size < len(loop_sets[best])):
            best = i
    if best is None:
        raise ValueError("no label has a proper loop set (finite index?)")
    return best


def compute_k(c: CoreGraph, index: int) -> int:
    """Smallest multiple of the lcm of x_index-cycle lengths that exceeds
    the core size.  Such a power fixes every cycle vertex and pushes every
    other core vertex out of the core (exit times never exceed the vertex
    count, and an orbit that leaves the core cannot re-enter: it would
    have to traverse a hanging tree's unique attachment edge against its
    orientation)."""
    lengths = [len(cycle) for cycle in c.xi_cycles(index)]
    lcm = math.lcm(*lengths) if lengths else 1
    n = -((c.num_vertices + 1) // -lcm)  # ceil((V+1)/lcm)
    return lcm * max(n, 1)


def compute_power_bound(g: FoldedGraph) -> int:
    """1 + the longest single-label run in the graph.  Requires every
    label's edge map to be cycle-free; each one is then a disjoint union
    of paths, and any subgroup element traces its syllables along them."""
    best = 0
    for i in range(g.rank):
        succ = g.succ[i]
        image = set(succ.values())
        walked = 0
        for v in succ:
            if v in image:
                continue
            length = 0
            u = v
            while u in succ:
                u = succ[u]
                length += 1
            walked += length
            best = max(best, length)
        if walked != len(succ):
            raise UnboundedRunError(f"label x{i + 1} still has a cycle")
    return best + 1


def find_power_free_basis(
    p: SubgroupPresentation, max_total_length: int = DEFAULT_LENGTH_CAP
) -> BasisCertificate:
    """Iterate: fold, read off loop sets, kill the smallest proper one
    with phi_{i,-k}.  The loop-vertex count strictly decreases, so the
    loop terminates; it then reports psi, the basis y_i = psi^{-1}(x_i),
    and the power bound of the final folded graph."""
    g = fold(p)
    idx = g.index()
    if idx is not None:
        raise FiniteIndexError(idx)
    gens = list(p.generators)
    moves: list[ElementaryMove] = []
    trace: list[IterationStep] = []
    graph = g
    while True:
        c = core(graph)
        loop_sets = {i: c.loop_set(i) for i in range(1, p.rank + 1)}
        union_size = len(loop_union(c))
        if trace:
            trace[-1].loops_after = union_size
        if union_size == 0:
            break
        i = choose_index(loop_sets)
        k = compute_k(c, i)
        move = ElementaryMove(i, -k)
        gens = [apply_move(w, move) for w in gens]
        total = sum(len(w) for w in gens)
        if total > max_total_length:
            raise WordBlowupError(
                f"generators reached {total} letters (cap {max_total_length})"
            )
        moves.append(move)
        trace.append(
            IterationStep(
                index=i,
                power=k,
                loops_before=union_size,
                loops_after=0,
                core_vertices=c.num_vertices,
            )
        )
        graph = fold(SubgroupPresentation(p.rank, tuple(gens)))
    psi = Automorphism(p.rank, tuple(moves))
    inv = psi.inverse()
    basis = tuple(
        inv.apply(Word.generator(p.rank, i), max_letters=max_total_length)
        for i in range(1, p.rank + 1)
    )
    return BasisCertificate(
        rank=p.rank,
        original_generators=p.generators,
        automorphism=psi,
        transformed_generators=tuple(gens),
        basis=basis,
        power_bound=compute_power_bound(graph),
        trace=tuple(trace),
    )


def to_transformed_coordinates(
    cert: BasisCertificate, w: Word, max_letters: int = DEFAULT_LENGTH_CAP
) -> Word:
    """psi(w): the expression of w with respect to the new basis, read as
    an ordinary word (substituting y_i for x_i in the result recovers w)."""
    return cert.automorphism.apply(w, max_letters=max_letters)


def transformed_syllables(
    cert: BasisCertificate, w: Word, max_letters: int = DEFAULT_LENGTH_CAP
) -> list[Syllable]:
    """Syllable form of psi(w) computed without expanding to letters;
    equal to syllables(to_transformed_coordinates(cert, w))."""
    return cert.automorphism.apply_syllables(syllables(w), max_letters=max_letters)


# --- certificate verification -------------------------------------------


@dataclass
class VerificationReport:
    """Three independent verdicts: (a) the transformed subgroup's core has
    no single-label cycles; (b) no small conjugate of H contains a small
    power of a basis word; (c) sampled H-elements respect the power bound."""

    structural_ok: bool
    conjugate_ok: bool
    conjugate_failures: list[tuple[Word, int, int]] = field(default_factory=list)
    conjugates_checked: int = 0
    subword_ok: bool = True
    subword_failures: list[tuple[Word, Syllable]] = field(default_factory=list)
    samples_checked: int = 0

    @property
    def all_ok(self) -> bool:
        return self.structural_ok and self.conjugate_ok and self.subword_ok

    def summary_lines(self) -> list[str]:
        return [
            f"structural (no single-label cycles): {'PASS' if self.structural_ok else 'FAIL'}",
            f"conjugate powers ({self.conjugates_checked} checks): "
            f"{'PASS' if self.conjugate_ok else 'FAIL ' + _fmt_conj(self.conjugate_failures)}",
            f"power bound on {self.samples_checked} samples: "
            f"{'PASS' if self.subword_ok else 'FAIL ' + _fmt_sub(self.subword_failures)}",
        ]


def _fmt_conj(failures: list[tuple[Word, int, int]]) -> str:
    w, i, m = failures[0]
    g = str(w) or "identity"
    return f"(y{i}^{m} lies in gHg^-1 for g = {g})"


def _fmt_sub(failures: list[tuple[Word, Syllable]]) -> str:
    w, (i, e) = failures[0]
    return f"(sample {w} maps to exponent {e} on x{i})"


def _reduced_ball(act: SchreierAction, rank: int, radius: int):
    """All reduced words of length <= radius with their action on the base
    state, in breadth-first order."""
    frontier = [((), act.base_state)]
    yield frontier[0]
    for _ in range(radius):
        new = []
        for letters, state in frontier:
            last = letters[-1] if letters else 0
            for i in range(1, rank + 1):
                for s in (i, -i):
                    if s == -last:
                        continue
                    nxt = act.apply_syllable(state, i, 1 if s > 0 else -1)
                    item = (letters + (s,), nxt)
                    yield item
                    new.append(item)
        frontier = new


def verify_certificate(
    p: SubgroupPresentation,
    cert: BasisCertificate,
    g_bound: int = 4,
    power_bound: int = 6,
    sample_count: int = 1000,
    rng: Optional[random.Random] = None,
) -> VerificationReport:
    """Check a certificate against the original presentation.

    (b) sweeps every reduced conjugator g with |g| <= g_bound and every
    basis power y_i^m, 1 <= m <= power_bound, testing membership of
    g^-1 y_i^m g in H.  Membership is evaluated through the free-group
    action on the completed Schreier graph, which agrees with tracing the
    reduced word but composes segment by segment.
    """
    if g_bound < 1 or power_bound < 1:
        raise ValueError("bounds must be positive")
    rng = rng if rng is not None else random.Random(0)

    transformed_graph = fold(SubgroupPresentation(cert.rank, cert.transformed_generators))
    structural_ok = not loop_union(core(transformed_graph))

    act = SchreierAction(fold(p))
    base = act.base_state
    y_sylls = [syllables(y) for y in cert.basis]
    y_maps: list[dict] = [dict() for _ in cert.basis]
    conjugate_failures: list[tuple[Word, int, int]] = []
    checked = 0
    for letters, state in _reduced_ball(act, p.rank, g_bound):
        g_word = ~free_reduce(p.rank, letters)  # enumerated words are g^-1
        inv_sylls = syllables(g_word)
        for bi in range(cert.rank):
            if not y_sylls[bi]:
                # a trivial basis word lies in every conjugate
                conjugate_failures.append((g_word, bi + 1, 1))
                checked += power_bound
                continue
            memo = y_maps[bi]
            s = state
            for m in range(1, power_bound + 1):
                nxt = memo.get(s)
                if nxt is None:
                    nxt = act.apply(s, y_sylls[bi])
                    memo[s] = nxt
                s = nxt
                checked += 1
                if act.apply(s, inv_sylls) == base:
                    conjugate_failures.append((g_word, bi + 1, m))

    samples: list[Word] = list(cert.original_generators)
    gens = cert.original_generators
    if gens:
        for _ in range(sample_count):
            w = Word.identity(p.rank)
            for _ in range(rng.randint(1, 10)):
                h = gens[rng.randrange(len(gens))]
                w = w * (h if rng.random() < 0.5 else ~h)
            samples.append(w)
    subword_failures: list[tuple[Word, Syllable]] = []
    for w in samples:
        for i, e in transformed_syllables(cert, w):
            if abs(e) >= cert.power_bound:
                subword_failures.append((w, (i, e)))
                break

    return VerificationReport(
        structural_ok=structural_ok,
        conjugate_ok=not conjugate_failures,
        conjugate_failures=conjugate_failures,
        conjugates_checked=checked,
        subword_ok=not subword_failures,
        subword_failures=subword_failures,
        samples_checked=len(samples),
    )
