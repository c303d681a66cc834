"""Injective byte <-> braid encoding that survives normalization.

Every byte becomes a fixed number of base-(n-1) digits.  Each digit selects a
permutation braid from the n-1 chains ``σ_i σ_{i+1} ... σ_j`` (j >= i) and
``σ_i σ_{i-1} ... σ_j`` (j < i), where ``i`` is the smallest finishing
generator of the previous factor (1 for the first).  Every chain starts with
σ_i only, so consecutive factors are left-weighted by construction and the
encoded word is already in left canonical form.  Decoding reads the factors
of the canonical form back, so any word for the same element decodes.
"""

from __future__ import annotations

from functools import lru_cache

from .braid import (
    BraidError,
    BraidWord,
    Perm,
    finishing_set,
    left_canonical_form,
    perm_of_positive_word,
)


def digits_per_byte(n: int) -> int:
    base = n - 1
    count, span = 0, 1
    while span < 256:
        span *= base
        count += 1
    return count


@lru_cache(maxsize=None)
def _chains(n: int, i: int) -> tuple[tuple[tuple[int, ...], Perm], ...]:
    words = [tuple(range(i, j + 1)) for j in range(i, n)]
    words += [tuple(range(i, j - 1, -1)) for j in range(i - 1, 0, -1)]
    return tuple((w, perm_of_positive_word(n, w)) for w in words)


def _check_n(n: int) -> None:
    if n < 3:
        raise BraidError("byte codec needs at least 3 strands")


def bytes_to_braid(data: bytes, n: int) -> BraidWord:
    _check_n(n)
    base, per_byte = n - 1, digits_per_byte(n)
    letters: list[int] = []
    start = 1
    for byte in data:
        digits = []
        for _ in range(per_byte):
            byte, d = divmod(byte, base)
            digits.append(d)
        for d in reversed(digits):
            word, perm = _chains(n, start)[d]
            letters.extend(word)
            start = min(finishing_set(perm))
    return BraidWord(n, tuple(letters))


def braid_to_bytes(w: BraidWord) -> bytes:
    """Inverse of :func:`bytes_to_braid` on group elements in its image."""
    n = w.n
    _check_n(n)
    cf = left_canonical_form(w)
    per_byte = digits_per_byte(n)
    if cf.k != 0 or len(cf.factors) % per_byte:
        raise BraidError("braid is not in the image of the byte codec")
    out = bytearray()
    start = 1
    value = 0
    for idx, factor in enumerate(cf.factors):
        lookup = {perm: d for d, (_, perm) in enumerate(_chains(n, start))}
        if factor not in lookup:
            raise BraidError("braid is not in the image of the byte codec")
        value = value * (n - 1) + lookup[factor]
        start = min(finishing_set(factor))
        if idx % per_byte == per_byte - 1:
            if value > 255:
                raise BraidError("braid is not in the image of the byte codec")
            out.append(value)
            value = 0
    return bytes(out)
