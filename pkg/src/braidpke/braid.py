"""Exact arithmetic in the Artin braid group B_n.

Braids are carried around as free words in signed Artin generators
(:class:`BraidWord`).  Equality and hashing go through the left canonical
(Garside) form ``Δ^k A_1 ... A_s`` where every ``A_i`` is a permutation braid,
none is the identity or ``Δ``, and each adjacent pair is left-weighted.

Permutation braids are stored as one-line permutation tuples with 0-based
values.  The permutation of a positive word ``σ_{i1} ... σ_{ik}`` is the
composite ``s_{i1} ∘ ... ∘ s_{ik}``, so right multiplication by ``σ_i`` swaps
the entries at positions ``i-1`` and ``i``, and left multiplication swaps the
values ``i-1`` and ``i``.
"""

from __future__ import annotations

import random
import re
import struct
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

try:
    from . import _kernel
except ImportError:  # numba missing: fall back to the pure-Python loop
    _kernel = None

MAX_STRANDS = 64

Perm = tuple[int, ...]


class BraidError(ValueError):
    """Malformed braid data or incompatible strand counts."""


@dataclass(frozen=True)
class BraidWord:
    """A word in the generators of B_n; ``+i`` is σ_i and ``-i`` is σ_i⁻¹."""

    n: int
    letters: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise BraidError(f"strand count must be >= 1, got {self.n!r}")
        letters = tuple(int(e) for e in self.letters)
        for e in letters:
            if e == 0 or abs(e) > self.n - 1:
                raise BraidError(f"letter {e} out of range for B_{self.n}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def identity(cls, n: int) -> BraidWord:
        return cls(n, ())

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: BraidWord) -> BraidWord:
        return compose(self, other)

    def inverse(self) -> BraidWord:
        return inverse(self)

    def is_identity(self) -> bool:
        return left_canonical_form(self).is_identity()

    def __str__(self) -> str:
        return serialize_word(self)


def _check_same_n(a: BraidWord, b: BraidWord) -> None:
    if a.n != b.n:
        raise BraidError(f"strand-count mismatch: B_{a.n} vs B_{b.n}")


def _reduce_letters(letters: Iterable[int]) -> list[int]:
    out: list[int] = []
    for e in letters:
        if out and out[-1] == -e:
            out.pop()
        else:
            out.append(e)
    return out


def free_reduce(a: BraidWord) -> BraidWord:
    """Delete adjacent ``(e, -e)`` pairs until none remain."""
    return BraidWord(a.n, tuple(_reduce_letters(a.letters)))


def compose(a: BraidWord, b: BraidWord) -> BraidWord:
    """Product ``ab`` as a freely reduced word (no normalization)."""
    _check_same_n(a, b)
    out = _reduce_letters(a.letters)
    for e in b.letters:
        if out and out[-1] == -e:
            out.pop()
        else:
            out.append(e)
    return BraidWord(a.n, tuple(out))


def compose_all(n: int, words: Iterable[BraidWord]) -> BraidWord:
    result = BraidWord.identity(n)
    for w in words:
        result = compose(result, w)
    return result


def inverse(a: BraidWord) -> BraidWord:
    return BraidWord(a.n, tuple(-e for e in reversed(a.letters)))


def fundamental_braid(n: int) -> BraidWord:
    """Δ_n via the recursion Δ_1 = 1, Δ_n = Δ_{n-1} σ_{n-1} σ_{n-2} ... σ_1."""
    if n < 1:
        raise BraidError(f"strand count must be >= 1, got {n}")
    letters: list[int] = []
    for m in range(2, n + 1):
        letters.extend(range(m - 1, 0, -1))
    return BraidWord(n, tuple(letters))


# -- permutation braids ------------------------------------------------------

def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def delta_perm(n: int) -> Perm:
    return tuple(range(n - 1, -1, -1))


def perm_inverse(p: Sequence[int]) -> Perm:
    inv = [0] * len(p)
    for i, v in enumerate(p):
        inv[v] = i
    return tuple(inv)


def perm_compose(p: Sequence[int], q: Sequence[int]) -> Perm:
    """``p ∘ q`` (apply q first)."""
    return tuple(p[v] for v in q)


def perm_of_positive_word(n: int, letters: Iterable[int]) -> Perm:
    """Permutation of a positive word; it is a permutation braid iff the word
    length equals the inversion count of the result."""
    p = list(range(n))
    for e in letters:
        if e <= 0:
            raise BraidError("positive word expected")
        p[e - 1], p[e] = p[e], p[e - 1]
    return tuple(p)


def inversion_count(p: Sequence[int]) -> int:
    n = len(p)
    return sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])


def finishing_set(p: Sequence[int]) -> frozenset[int]:
    """Generators σ_i with ``A = A'σ_i`` (right descents), 1-based."""
    return frozenset(i + 1 for i in range(len(p) - 1) if p[i] > p[i + 1])


def starting_set(p: Sequence[int]) -> frozenset[int]:
    """Generators σ_i with ``A = σ_i A'`` (left descents), 1-based."""
    return finishing_set(perm_inverse(p))


def is_left_weighted(a: Sequence[int], b: Sequence[int]) -> bool:
    return starting_set(b) <= finishing_set(a)


def perm_to_word(p: Sequence[int]) -> tuple[int, ...]:
    """A positive word of minimal length (a reduced expression) for p."""
    q = list(p)
    letters: list[int] = []
    n = len(q)
    while True:
        for i in range(n - 1):
            if q[i] > q[i + 1]:
                q[i], q[i + 1] = q[i + 1], q[i]
                letters.append(i + 1)
                break
        else:
            break
    letters.reverse()
    return tuple(letters)


def tau_perm(p: Sequence[int]) -> Perm:
    """Image under the flip σ_i ↦ σ_{n-i}, i.e. conjugation by Δ."""
    n = len(p)
    return tuple(n - 1 - p[n - 1 - j] for j in range(n))


def _make_left_weighted(a: list[int], binv: list[int]) -> bool:
    """Push generators from the front of B to the back of A in place.

    ``a`` is A in one-line form, ``binv`` is the inverse of B.  Afterwards
    every starting generator of B finishes A.  Returns True if anything moved.
    """
    moved = False
    last = len(a) - 1
    i = 0
    while i < last:
        if binv[i] > binv[i + 1] and a[i] < a[i + 1]:
            a[i], a[i + 1] = a[i + 1], a[i]
            binv[i], binv[i + 1] = binv[i + 1], binv[i]
            moved = True
            i = i - 1 if i else 0
        else:
            i += 1
    return moved


class _PositiveNormalizer:
    """Left-weighted factor list grown by right multiplication."""

    __slots__ = ("n", "factors", "deltas", "_ident", "_delta")

    def __init__(self, n: int) -> None:
        self.n = n
        self.factors: list[list[int]] = []
        self.deltas = 0
        self._ident = list(range(n))
        self._delta = list(range(n - 1, -1, -1))

    def append(self, s: list[int]) -> None:
        if s == self._ident:
            return
        factors = self.factors
        factors.append(s)
        j = len(factors) - 2
        while j >= 0:
            right = factors[j + 1]
            binv = [0] * self.n
            for pos, v in enumerate(right):
                binv[v] = pos
            if not _make_left_weighted(factors[j], binv):
                break
            for pos, v in enumerate(binv):
                right[v] = pos
            j -= 1
        while factors and factors[-1] == self._ident:
            factors.pop()
        while factors and factors[0] == self._delta:
            factors.pop(0)
            self.deltas += 1


@dataclass(frozen=True)
class CanonicalForm:
    """``Δ^k`` followed by left-weighted permutation braids (0-based tuples)."""

    n: int
    k: int
    factors: tuple[Perm, ...] = ()

    def is_identity(self) -> bool:
        return self.k == 0 and not self.factors

    def to_word(self) -> BraidWord:
        delta = fundamental_braid(self.n).letters
        if self.k >= 0:
            letters = list(delta) * self.k
        else:
            letters = [-e for e in reversed(delta)] * (-self.k)
        for f in self.factors:
            letters.extend(perm_to_word(f))
        return free_reduce(BraidWord(self.n, tuple(letters)))

    @property
    def canonical_length(self) -> int:
        return len(self.factors)

    def check(self) -> None:
        """Raise BraidError unless the factor list is a valid normal form."""
        ident, delta = identity_perm(self.n), delta_perm(self.n)
        for f in self.factors:
            if sorted(f) != list(range(self.n)):
                raise BraidError(f"not a permutation: {f}")
            if f == ident or f == delta:
                raise BraidError("identity or Δ inside factor list")
        for a, b in zip(self.factors, self.factors[1:]):
            if not is_left_weighted(a, b):
                raise BraidError(f"pair {a}, {b} is not left-weighted")


def left_canonical_form(w: BraidWord) -> CanonicalForm:
    """Left canonical form of the element represented by ``w``.

    Each σ_i⁻¹ is rewritten as Δ⁻¹·(Δσ_i⁻¹); all Δ⁻¹ are moved to the front,
    flipping the factors they pass over, and the remaining positive word is
    normalized one simple factor at a time.
    """
    if w.n == 1:
        return CanonicalForm(1, 0, ())
    if _kernel is None:
        return _left_canonical_form_python(w)
    k, fac = _kernel.canonical_kernel(np.asarray(w.letters, dtype=np.int64), w.n)
    return CanonicalForm(w.n, int(k), tuple(tuple(row) for row in fac.tolist()))


def _left_canonical_form_python(w: BraidWord) -> CanonicalForm:
    n = w.n
    if n == 1:
        return CanonicalForm(1, 0, ())
    letters = w.letters
    remaining = sum(1 for e in letters if e < 0)
    count = remaining
    norm = _PositiveNormalizer(n)
    for e in letters:
        i = abs(e)
        if e > 0:
            s = list(range(n))
        else:
            remaining -= 1
            # Δσ_i⁻¹ = w0 ∘ s_i: reversal with positions i-1, i swapped
            s = list(range(n - 1, -1, -1))
        s[i - 1], s[i] = s[i], s[i - 1]
        if remaining & 1:
            s = [n - 1 - s[n - 1 - j] for j in range(n)]
        norm.append(s)
    return CanonicalForm(n, norm.deltas - count, tuple(tuple(f) for f in norm.factors))


def equals(a: BraidWord, b: BraidWord) -> bool:
    _check_same_n(a, b)
    if a.letters == b.letters:
        return True
    return left_canonical_form(a) == left_canonical_form(b)


def normalize(w: BraidWord) -> BraidWord:
    """The word read back from the canonical form of ``w``."""
    return left_canonical_form(w).to_word()


def random_word(n: int, length: int, rng: random.Random) -> BraidWord:
    """``length`` letters drawn uniformly from {±1, ..., ±(n-1)}; not reduced."""
    if length < 0:
        raise BraidError("length must be >= 0")
    if length == 0:
        return BraidWord.identity(n)
    if n < 2:
        raise BraidError("B_1 has no generators")
    return random_word_over(n, range(1, n), length, rng)


def random_word_over(n: int, generators: Iterable[int], length: int,
                     rng: random.Random) -> BraidWord:
    alphabet = sorted({g for i in generators for g in (i, -i)}, key=lambda e: (abs(e), -e))
    if length and not alphabet:
        raise BraidError("empty generator set")
    return BraidWord(n, tuple(rng.choice(alphabet) for _ in range(length)))


# -- serialization ---------------------------------------------------------

_WORD_RE = re.compile(r"^B(\d+):((?:[+-]?\d+)(?:,[+-]?\d+)*)?$")


def serialize_word(a: BraidWord) -> str:
    return f"B{a.n}:" + ",".join(str(e) for e in a.letters)


def deserialize_word(text: str | bytes) -> BraidWord:
    if isinstance(text, bytes):
        try:
            text = text.decode("ascii")
        except UnicodeDecodeError as exc:
            raise BraidError("word text must be ASCII") from exc
    m = _WORD_RE.match(text.strip())
    if not m:
        raise BraidError(f"malformed braid word: {text!r}")
    n = int(m.group(1))
    if n > MAX_STRANDS:
        raise BraidError(f"strand count {n} exceeds {MAX_STRANDS}")
    body = m.group(2)
    letters = tuple(int(t) for t in body.split(",")) if body else ()
    return BraidWord(n, letters)


def word_to_bytes(a: BraidWord) -> bytes:
    """Binary form: u16 n, u32 letter count, i16 letters (all big-endian)."""
    if a.n > MAX_STRANDS:
        raise BraidError(f"strand count {a.n} exceeds {MAX_STRANDS}")
    return struct.pack(f">HI{len(a.letters)}h", a.n, len(a.letters), *a.letters)


def word_from_bytes(data: bytes) -> BraidWord:
    if len(data) < 6:
        raise BraidError("truncated braid header")
    n, count = struct.unpack_from(">HI", data)
    if len(data) != 6 + 2 * count:
        raise BraidError("braid payload length does not match letter count")
    if n < 1 or n > MAX_STRANDS:
        raise BraidError(f"strand count {n} out of range")
    return BraidWord(n, struct.unpack_from(f">{count}h", data, 6))


def serialize_canonical(cf: CanonicalForm) -> bytes:
    """``CF|n=<n>|k=<k>|`` then 1-based one-line factors joined by ``|``."""
    head = f"CF|n={cf.n}|k={cf.k}|"
    body = "|".join(" ".join(str(v + 1) for v in f) for f in cf.factors)
    return (head + body).encode("ascii")


def deserialize_canonical(data: bytes) -> CanonicalForm:
    text = data.decode("ascii")
    m = re.fullmatch(r"CF\|n=(\d+)\|k=(-?\d+)\|(.*)", text)
    if not m:
        raise BraidError(f"malformed canonical form: {text!r}")
    n, k, body = int(m.group(1)), int(m.group(2)), m.group(3)
    factors = tuple(tuple(int(v) - 1 for v in chunk.split()) for chunk in body.split("|")) if body else ()
    cf = CanonicalForm(n, k, factors)
    cf.check()
    return cf


def exponent_sum(w: BraidWord) -> int:
    """Image in the abelianization Z; a conjugacy invariant."""
    return sum(1 if e > 0 else -1 for e in w.letters)


def braid_permutation(w: BraidWord) -> Perm:
    """The induced strand permutation (σ_i and σ_i⁻¹ both act as s_i)."""
    p = list(range(w.n))
    for e in w.letters:
        i = abs(e)
        p[i - 1], p[i] = p[i], p[i - 1]
    return tuple(p)
