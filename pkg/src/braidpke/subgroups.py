"""Commuting left/right subgroups with the hard-problem samplers and solvers.

For ``n = l + r`` strands the left subgroup is generated by σ_1..σ_{l-1} and
the right subgroup by σ_{l+1}..σ_{l+r-1}.  Index ``l`` belongs to neither, so
every left generator is at distance >= 2 from every right generator and the
two subgroups commute elementwise.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .braid import (
    BraidError,
    BraidWord,
    compose,
    deserialize_word,
    equals,
    inverse,
    left_canonical_form,
    random_word,
    random_word_over,
    serialize_word,
)

SEARCH_BUDGET = 10**7


class PreconditionError(ValueError):
    """An argument violates a documented precondition."""


class SearchBudgetExceeded(RuntimeError):
    """The requested brute-force enumeration is larger than the budget."""


@dataclass(frozen=True)
class SplitParams:
    l: int
    r: int

    def __post_init__(self) -> None:
        if self.l < 2 or self.r < 2:
            raise PreconditionError(f"need l >= 2 and r >= 2, got l={self.l}, r={self.r}")

    @property
    def n(self) -> int:
        return self.l + self.r

    @property
    def left_generators(self) -> range:
        return range(1, self.l)

    @property
    def right_generators(self) -> range:
        return range(self.l + 1, self.l + self.r)

    def is_left(self, w: BraidWord) -> bool:
        return w.n == self.n and all(abs(e) < self.l for e in w.letters)

    def is_right(self, w: BraidWord) -> bool:
        return w.n == self.n and all(abs(e) > self.l for e in w.letters)


def sample_left(p: SplitParams, length: int, rng: random.Random) -> BraidWord:
    return random_word_over(p.n, p.left_generators, length, rng)


def sample_right(p: SplitParams, length: int, rng: random.Random) -> BraidWord:
    return random_word_over(p.n, p.right_generators, length, rng)


def conjugate(a: BraidWord, g: BraidWord) -> BraidWord:
    """``a g a⁻¹``, freely reduced."""
    return compose(a, compose(g, inverse(a)))


def commute_check(p: SplitParams, x: BraidWord, y: BraidWord) -> bool:
    if not p.is_left(x):
        raise PreconditionError("x must use left-subgroup generators only")
    if not p.is_right(y):
        raise PreconditionError("y must use right-subgroup generators only")
    return equals(compose(x, y), compose(y, x))


@dataclass(frozen=True)
class SampleLengths:
    """Word lengths used when sampling g, x, y and z."""

    g: int = 32
    x: int = 32
    y: int = 32
    z: int = 32


@dataclass(frozen=True)
class DcsTuple:
    """A four-tuple drawn from the random (R) or conjugate (D) distribution.

    ``label`` and the witnesses ``x``, ``y``, ``z`` are for the harness only;
    a distinguisher sees ``g1..g4``.
    """

    g1: BraidWord
    g2: BraidWord
    g3: BraidWord
    g4: BraidWord
    label: bool
    x: BraidWord = field(repr=False, compare=False)
    y: BraidWord = field(repr=False, compare=False)
    z: Optional[BraidWord] = field(default=None, repr=False, compare=False)

    @property
    def public(self) -> tuple[BraidWord, BraidWord, BraidWord, BraidWord]:
        return (self.g1, self.g2, self.g3, self.g4)

    def dumps(self) -> str:
        lines = [f"g{i}:{serialize_word(w)}" for i, w in enumerate(self.public, 1)]
        lines.append(f"label:{'D' if self.label else 'R'}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> DcsTuple:
        fields: dict[str, str] = {}
        for line in text.splitlines():
            if line.strip():
                key, _, value = line.partition(":")
                fields[key.strip()] = value.strip()
        try:
            g = [deserialize_word(fields[f"g{i}"]) for i in range(1, 5)]
            label = {"D": True, "R": False}[fields["label"]]
        except KeyError as exc:
            raise BraidError(f"DCS tuple missing field {exc}") from exc
        ident = BraidWord.identity(g[0].n)
        return cls(*g, label=label, x=ident, y=ident)


def dcs_sample(p: SplitParams, real: bool, lengths: SampleLengths, rng: random.Random,
               *, x: Optional[BraidWord] = None, y: Optional[BraidWord] = None) -> DcsTuple:
    """Draw a D tuple (``real``) or an R tuple.

    ``x``/``y`` override the sampled subgroup elements (test hook).
    """
    g = random_word(p.n, lengths.g, rng)
    x = sample_left(p, lengths.x, rng) if x is None else x
    y = sample_right(p, lengths.y, rng) if y is None else y
    if real:
        z = None
        g4 = conjugate(compose(x, y), g)
    else:
        z = random_word(p.n, lengths.z, rng)
        g4 = conjugate(z, g)
    return DcsTuple(g, conjugate(x, g), conjugate(y, g), g4, real, x=x, y=y, z=z)


@dataclass(frozen=True)
class ConjugacyInstance:
    """Find ``a`` over ``generator_set`` with ``a x a⁻¹ = y`` and ``|a| <= bound``."""

    x: BraidWord
    y: BraidWord
    generator_set: tuple[int, ...]
    bound: int

    def __post_init__(self) -> None:
        if self.x.n != self.y.n:
            raise BraidError("strand-count mismatch in conjugacy instance")
        gens = tuple(sorted(set(self.generator_set)))
        if any(i < 1 or i > self.x.n - 1 for i in gens):
            raise PreconditionError("generator set outside 1..n-1")
        if self.bound < 0:
            raise PreconditionError("bound must be >= 0")
        object.__setattr__(self, "generator_set", gens)

    @classmethod
    def full(cls, x: BraidWord, y: BraidWord, bound: int) -> ConjugacyInstance:
        return cls(x, y, tuple(range(1, x.n)), bound)

    def candidate_count(self) -> int:
        return (2 * len(self.generator_set)) ** self.bound


def _enumerate_reduced(alphabet: tuple[int, ...], bound: int) -> Iterator[tuple[int, ...]]:
    # Words containing (e, -e) are skipped: their reduction was tried earlier.
    for length in range(bound + 1):
        for word in itertools.product(alphabet, repeat=length):
            if all(word[i] != -word[i + 1] for i in range(length - 1)):
                yield word


def brute_force_conjugacy_search(inst: ConjugacyInstance) -> Optional[BraidWord]:
    """First conjugator in length-then-lexicographic order, or None.

    The alphabet is ordered +1, -1, +2, -2, ...  Raises
    :class:`SearchBudgetExceeded` when ``(2|G|)^bound`` exceeds the budget.
    """
    if inst.candidate_count() > SEARCH_BUDGET:
        raise SearchBudgetExceeded(
            f"{inst.candidate_count()} candidates exceed the budget of {SEARCH_BUDGET}")
    n = inst.x.n
    target = left_canonical_form(inst.y)
    alphabet = tuple(e for i in inst.generator_set for e in (i, -i))
    for letters in _enumerate_reduced(alphabet, inst.bound):
        a = BraidWord(n, letters)
        if left_canonical_form(conjugate(a, inst.x)) == target:
            return a
    return None


class Verdict(enum.Enum):
    YES = "yes"
    NO_WITHIN_BOUND = "no-within-bound"


def conjugacy_decision_bounded(x: BraidWord, y: BraidWord, bound: int) -> Verdict:
    found = brute_force_conjugacy_search(ConjugacyInstance.full(x, y, bound))
    return Verdict.YES if found is not None else Verdict.NO_WITHIN_BOUND
