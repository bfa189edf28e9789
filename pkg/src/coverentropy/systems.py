"""Symbolic dynamical systems: full shifts, subshifts of finite type, and
finite permutations, with a uniform word-enumeration interface.

Words are tuples of letters 0..k-1.  All admissible words of a given length
are enumerated once per (system, length) in lexicographic order and cached;
that enumeration order is the universe order every bitmask in the package
refers to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

FULL_SHIFT = "full_shift"
SFT = "sft"
PERMUTATION = "permutation"


class SystemError(ValueError):
    pass


@dataclass(frozen=True)
class SymbolicSystem:
    """Phase space + map.  Immutable; word kinds carry a 0/1 transition
    matrix (full shifts use the all-ones matrix), permutation systems carry
    the bijection table instead."""

    kind: str
    alphabet_size: int
    transition: Optional[tuple[tuple[int, ...], ...]] = None
    mapping: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.kind in (FULL_SHIFT, SFT):
            if self.alphabet_size < 1:
                raise SystemError("alphabet must have at least one letter")
            t = self.transition
            if t is None or len(t) != self.alphabet_size or any(
                len(row) != self.alphabet_size for row in t
            ):
                raise SystemError("transition matrix must be k x k")
            if any(v not in (0, 1) for row in t for v in row):
                raise SystemError("transition entries must be 0/1")
            if not _has_essential_part(t):
                raise SystemError(
                    "transition matrix admits no bi-infinite path "
                    "(essential part is empty)"
                )
        elif self.kind == PERMUTATION:
            m = self.mapping
            if m is None or sorted(m) != list(range(len(m))) or len(m) == 0:
                raise SystemError("permutation table must be a bijection on 0..n-1")
        else:
            raise SystemError(f"unknown system kind {self.kind!r}")

    @property
    def is_word_system(self) -> bool:
        return self.kind in (FULL_SHIFT, SFT)

    @property
    def point_count(self) -> int:
        if self.kind != PERMUTATION:
            raise SystemError("point_count only applies to permutation systems")
        return len(self.mapping)

    def transition_array(self) -> np.ndarray:
        return np.array(self.transition, dtype=np.int8)


def full_shift(k: int) -> SymbolicSystem:
    ones = tuple(tuple(1 for _ in range(k)) for _ in range(k))
    return SymbolicSystem(FULL_SHIFT, k, transition=ones)


def sft(transition) -> SymbolicSystem:
    t = tuple(tuple(int(v) for v in row) for row in transition)
    return SymbolicSystem(SFT, len(t), transition=t)


def permutation(mapping) -> SymbolicSystem:
    m = tuple(int(v) for v in mapping)
    return SymbolicSystem(PERMUTATION, 0, mapping=m)


def golden_mean() -> SymbolicSystem:
    """The SFT on {0,1} forbidding the word 11."""
    return sft([[1, 1], [1, 0]])


def _has_essential_part(transition) -> bool:
    # Trim states without outgoing or incoming edges until stable; a
    # bi-infinite path exists iff something survives.
    k = len(transition)
    alive = set(range(k))
    changed = True
    while changed and alive:
        changed = False
        for s in list(alive):
            if not any(transition[s][t] for t in alive) or not any(
                transition[t][s] for t in alive
            ):
                alive.discard(s)
                changed = True
    return bool(alive)


@dataclass(frozen=True, eq=False)
class WordUniverse:
    """All admissible length-n words of a system, in lexicographic order."""

    system: SymbolicSystem
    length: int
    array: np.ndarray          # (count, length) int8
    codes: np.ndarray          # radix codes, most-significant letter first
    code_to_index: np.ndarray  # size k^length, -1 where inadmissible

    @property
    def count(self) -> int:
        return len(self.array)

    def word(self, i: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.array[i])

    def index_of(self, word) -> int:
        code = 0
        k = self.system.alphabet_size
        for letter in word:
            code = code * k + int(letter)
        idx = int(self.code_to_index[code])
        if idx < 0:
            raise SystemError(f"word {word} is not admissible")
        return idx

    def indices_of_rows(self, rows: np.ndarray) -> np.ndarray:
        """Map an (m, length) array of letter rows to universe indices.
        Rows must all be admissible."""
        k = self.system.alphabet_size
        powers = k ** np.arange(self.length - 1, -1, -1, dtype=np.int64)
        codes = rows.astype(np.int64) @ powers
        idx = self.code_to_index[codes]
        if np.any(idx < 0):
            raise SystemError("inadmissible word encountered during recoding")
        return idx


@lru_cache(maxsize=None)
def word_universe(sys: SymbolicSystem, n: int) -> WordUniverse:
    if not sys.is_word_system:
        raise SystemError("permutation systems carry points, not words")
    if n < 1:
        raise SystemError("word length must be >= 1")
    k = sys.alphabet_size
    t = sys.transition_array()
    words = [(a,) for a in range(k)]
    for _ in range(n - 1):
        words = [w + (b,) for w in words for b in range(k) if t[w[-1], b]]
    arr = np.array(words, dtype=np.int8).reshape(len(words), n)
    powers = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
    codes = arr.astype(np.int64) @ powers
    c2i = np.full(k**n, -1, dtype=np.int64)
    c2i[codes] = np.arange(len(words))
    return WordUniverse(sys, n, arr, codes, c2i)


def admissible_words(sys: SymbolicSystem, n: int) -> list[tuple[int, ...]]:
    """Exactly the length-n transition-admissible words, lexicographically."""
    uni = word_universe(sys, n)
    return [tuple(int(v) for v in row) for row in uni.array]


def word_count_growth(sys: SymbolicSystem, n_max: int) -> float:
    """(1/n_max) log #(admissible n_max-words).

    An upper-bound proxy that converges to the log of the spectral radius of
    the transition matrix (subadditivity of log counts).
    """
    if n_max < 2:
        raise SystemError("n_max must be >= 2")
    count = word_universe(sys, n_max).count
    return math.log(count) / n_max


def power_system(sys: SymbolicSystem, M: int) -> SymbolicSystem:
    """The system for the M-th iterate of the map.

    Word systems are recoded on non-overlapping M-blocks: the new alphabet is
    the admissible M-words (in lexicographic order) and block u may be
    followed by block v iff the concatenation uv is admissible.  A power
    n-word therefore corresponds bijectively to a base (n*M)-word.
    Permutations compose M times.
    """
    if M < 1:
        raise SystemError("M must be >= 1")
    if M == 1:
        return sys
    if sys.kind == PERMUTATION:
        m = sys.mapping
        out = []
        for x in range(len(m)):
            y = x
            for _ in range(M):
                y = m[y]
            out.append(y)
        return permutation(out)
    blocks = word_universe(sys, M)
    t = sys.transition
    rows = []
    for u in blocks.array:
        last = int(u[-1])
        rows.append(tuple(int(t[last][int(v[0])]) for v in blocks.array))
    return sft(rows)


def power_letter_words(sys: SymbolicSystem, M: int) -> list[tuple[int, ...]]:
    """The base M-words behind each power-system letter, in letter order."""
    return admissible_words(sys, M)


def permutation_power_table(sys: SymbolicSystem, n: int) -> np.ndarray:
    """Array p with p[i] = T^n(i) for a permutation system."""
    if sys.kind != PERMUTATION:
        raise SystemError("not a permutation system")
    m = np.array(sys.mapping, dtype=np.int64)
    out = np.arange(len(m))
    for _ in range(n):
        out = m[out]
    return out


def permutation_cycles(sys: SymbolicSystem) -> list[tuple[int, ...]]:
    """Cycles of the bijection, each starting at its smallest member,
    ordered by that member."""
    m = sys.mapping
    seen = [False] * len(m)
    cycles = []
    for start in range(len(m)):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = m[x]
        cycles.append(tuple(cyc))
    return cycles


@dataclass(frozen=True)
class FactorMap:
    """Sliding-block code between word systems.

    `code[i]` is the codomain letter assigned to the i-th admissible
    block_length-word of the domain (domain universe order).  The code
    commutes with the shifts by construction; admissibility of images and
    surjectivity onto the codomain alphabet are checked here.
    """

    domain: SymbolicSystem
    codomain: SymbolicSystem
    block_length: int
    code: tuple[int, ...]

    def __post_init__(self):
        if not (self.domain.is_word_system and self.codomain.is_word_system):
            raise SystemError("factor maps are defined between word systems")
        blocks = word_universe(self.domain, self.block_length)
        if len(self.code) != blocks.count:
            raise SystemError(
                "code must assign a letter to every admissible "
                f"{self.block_length}-word ({blocks.count} of them)"
            )
        kc = self.codomain.alphabet_size
        if any(not (0 <= c < kc) for c in self.code):
            raise SystemError("code letters outside codomain alphabet")
        if set(self.code) != set(range(kc)):
            raise SystemError("code is not surjective onto the codomain alphabet")
        # every admissible (b+1)-window must map to an admissible letter pair
        windows = word_universe(self.domain, self.block_length + 1)
        t = self.codomain.transition
        for w in windows.array:
            a = self.code[blocks.index_of(tuple(w[:-1]))]
            b = self.code[blocks.index_of(tuple(w[1:]))]
            if not t[a][b]:
                raise SystemError(
                    "code image violates codomain admissibility on window "
                    f"{tuple(int(v) for v in w)}"
                )

    @property
    def is_injective(self) -> bool:
        return len(set(self.code)) == len(self.code)

    def is_onto_window(self, window: int) -> bool:
        """Whether every admissible codomain word of this length is the image
        of some domain word.  Letter surjectivity does not imply this; the
        counting side of factor invariance needs it."""
        hit = set(self.image_indices(window).tolist())
        return len(hit) == word_universe(self.codomain, window).count

    def image_indices(self, window: int) -> np.ndarray:
        """For each domain (window + b - 1)-word, the codomain universe index
        of its length-`window` image word."""
        b = self.block_length
        dom = word_universe(self.domain, window + b - 1)
        blocks = word_universe(self.domain, b)
        code = np.array(self.code, dtype=np.int64)
        letters = np.empty((dom.count, window), dtype=np.int8)
        for j in range(window):
            sub = dom.array[:, j : j + b]
            letters[:, j] = code[blocks.indices_of_rows(sub)]
        return word_universe(self.codomain, window).indices_of_rows(letters)


def identity_code(sys: SymbolicSystem) -> FactorMap:
    return FactorMap(sys, sys, 1, tuple(range(sys.alphabet_size)))
