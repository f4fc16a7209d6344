"""Admissible periodic words over the generator alphabet.

A word (w_1, ..., w_n) codes the composition of inversions applied in that
order; admissibility forbids equal cyclically-adjacent symbols, since a
reflection never follows itself.  Words are grouped into rotation classes
(necklaces); all rotations of a word share one multiplier, so the zeta
sums run over classes weighted by the number of distinct rotations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Word = tuple[int, ...]


@dataclass(frozen=True)
class OrbitClass:
    representative: Word
    length: int
    rotation_count: int
    primitive_period: int


def is_admissible(word: Word) -> bool:
    n = len(word)
    if n == 0:
        return False
    return all(word[k] != word[(k + 1) % n] for k in range(n))


def canonical_rotation(word: Word) -> Word:
    return min(word[i:] + word[:i] for i in range(len(word)))


def word_count(L: int, n: int) -> int:
    """Number of admissible cyclic words: trace of the adjacency power,
    (L-1)^n + (L-1)(-1)^n."""
    if L < 2 or n < 1:
        raise ValueError(f"need L >= 2 and n >= 1, got L={L}, n={n}")
    return (L - 1) ** n + (L - 1) * (-1) ** n


def primitive_decomposition(word: Word) -> tuple[Word, int]:
    """Smallest root and repetition count with word = root * count."""
    n = len(word)
    for d in range(1, n + 1):
        if n % d:
            continue
        if word == word[:d] * (n // d):
            return word[:d], n // d
    raise AssertionError("unreachable: every word is its own period")


def class_matrix(L: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """All rotation classes of length n as arrays.

    Returns (reps, counts): reps is a (C, n) int array of lexicographically
    minimal representatives in ascending order, counts the number of
    distinct rotations of each (which equals its primitive period).
    """
    if L < 2 or n < 1:
        raise ValueError(f"need L >= 2 and n >= 1, got L={L}, n={n}")
    if n == 1:
        return np.empty((0, 1), dtype=np.int64), np.empty(0, dtype=np.int64)
    if n * np.log2(L) > 62:
        raise ValueError(f"word length {n} over {L} symbols exceeds the "
                         "64-bit encoding range")
    # Grow all admissible linear words in base-L integer encoding: each
    # step appends the L-1 symbols different from the last one.
    values = np.arange(L, dtype=np.int64)
    last = np.arange(L, dtype=np.int64)
    offsets = np.arange(1, L, dtype=np.int64)
    for _ in range(n - 1):
        nxt = (last[:, None] + offsets[None, :]) % L  # (R, L-1)
        values = (values[:, None] * L + nxt).reshape(-1)
        last = nxt.reshape(-1)
    powers = L ** np.arange(n - 1, -1, -1, dtype=np.int64)
    first = values // powers[0]
    values = values[first != last]
    # Rotating a word is modular arithmetic on its encoding.
    canon = values.copy()
    for k in range(1, n):
        split = L ** (n - k)
        rotated = (values % split) * (L**k) + values // split
        np.minimum(canon, rotated, out=canon)
    reps_vals, counts = np.unique(canon, return_counts=True)
    digits = (reps_vals[:, None] // powers[None, :]) % L
    return digits, counts


def enumerate_orbit_classes(L: int, n: int) -> list[OrbitClass]:
    """Rotation classes of admissible length-n words, ordered by
    representative."""
    reps, counts = class_matrix(L, n)
    return [
        OrbitClass(representative=tuple(int(s) for s in rep), length=n,
                   rotation_count=int(c), primitive_period=int(c))
        for rep, c in zip(reps, counts)
    ]
