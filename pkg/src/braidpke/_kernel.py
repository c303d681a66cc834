"""Compiled left-weighting loop behind :func:`braidpke.braid.left_canonical_form`."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _absorb(a, ainv, b, binv, n):
    # Move every σ_i that starts B but does not finish A across the boundary.
    moved = False
    i = 0
    while i < n - 1:
        if binv[i] > binv[i + 1] and a[i] < a[i + 1]:
            ai = a[i]
            a[i] = a[i + 1]
            a[i + 1] = ai
            ainv[a[i]] = i
            ainv[a[i + 1]] = i + 1
            bi = binv[i]
            binv[i] = binv[i + 1]
            binv[i + 1] = bi
            b[binv[i]] = i
            b[binv[i + 1]] = i + 1
            moved = True
            i = i - 1 if i > 0 else 0
        else:
            i += 1
    return moved


@njit(cache=True)
def canonical_kernel(letters, n):
    """Return (k, factors) with factors as a (s, n) int64 array of 0-based perms."""
    L = letters.shape[0]
    fac = np.empty((L + 1, n), dtype=np.int64)
    inv = np.empty((L + 1, n), dtype=np.int64)
    negatives = 0
    for idx in range(L):
        if letters[idx] < 0:
            negatives += 1
    remaining = negatives
    head = 0
    size = 0
    deltas = 0
    s = np.empty(n, dtype=np.int64)
    for idx in range(L):
        e = letters[idx]
        if e < 0:
            remaining -= 1
            i = -e
            for j in range(n):
                s[j] = n - 1 - j
        else:
            i = e
            for j in range(n):
                s[j] = j
        t = s[i - 1]
        s[i - 1] = s[i]
        s[i] = t
        if remaining & 1:
            # flip σ_i ↦ σ_{n-i}; i.e. conjugate by the reversal
            tmp = s.copy()
            for j in range(n):
                s[j] = n - 1 - tmp[n - 1 - j]
        top = head + size
        for j in range(n):
            fac[top, j] = s[j]
            inv[top, s[j]] = j
        size += 1
        j = top - 1
        while j >= head:
            if not _absorb(fac[j], inv[j], fac[j + 1], inv[j + 1], n):
                break
            j -= 1
        # drop trailing identities
        while size > 0:
            last = head + size - 1
            ident = True
            for q in range(n):
                if fac[last, q] != q:
                    ident = False
                    break
            if not ident:
                break
            size -= 1
        # absorb leading Δ factors into the exponent
        while size > 0:
            full = True
            for q in range(n):
                if fac[head, q] != n - 1 - q:
                    full = False
                    break
            if not full:
                break
            head += 1
            size -= 1
            deltas += 1
    return deltas - negatives, fac[head:head + size].copy()
