"""Generalized Thue-Morse words t_{b,m}.

A word is fixed by a base ``b >= 2``, an alphabet size ``m >= 1``, a start
letter and a cyclic permutation of the alphabet.  Letters are the residues
``0..m-1``; the permutation acts as ``i -> (i + shift) mod m``.  Display
alphabets are applied with :func:`rename` at I/O boundaries only.

Two independent constructions are provided:

* :func:`letter_at` / :meth:`LazyWord.prefix` use the digit-sum formula
  ``t[n] = sigma^{s_b(n)}(start)``;
* :func:`prefix_by_morphism` iterates the uniform morphism
  ``mu(a) = a sigma(a) ... sigma^{b-1}(a)`` from the start letter.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "CyclicPermutation",
    "TMParams",
    "LazyWord",
    "digit_sum",
    "digit_sums",
    "letter_at",
    "prefix_by_morphism",
    "apply_morphism",
    "is_periodic",
    "is_sigma_cyclic",
    "block",
    "rename",
    "parse_rename",
]


@dataclass(frozen=True)
class CyclicPermutation:
    """The m-cycle ``i -> (i + shift) mod m`` on ``{0, ..., m-1}``."""

    m: int
    shift: int = 1

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"alphabet size must be >= 1, got {self.m}")
        if math.gcd(self.shift, self.m) != 1:
            raise ValueError(f"shift {self.shift} does not generate a single {self.m}-cycle")
        object.__setattr__(self, "shift", self.shift % self.m if self.m > 1 else 1)

    def __call__(self, letter: int, times: int = 1) -> int:
        return (letter + self.shift * times) % self.m

    @classmethod
    def from_mapping(cls, mapping: dict[int, int]) -> tuple["CyclicPermutation", list[int]]:
        """Canonicalize an arbitrary m-cycle given as ``{letter: image}``.

        Returns the canonical permutation and the relabelling ``order`` such
        that canonical residue ``i`` stands for letter ``order[i]``.
        """
        m = len(mapping)
        if sorted(mapping) != list(range(m)) or sorted(mapping.values()) != list(range(m)):
            raise ValueError("mapping must be a permutation of 0..m-1")
        order = [0]
        while len(order) < m:
            nxt = mapping[order[-1]]
            if nxt == 0:
                raise ValueError("mapping is not a single cycle")
            order.append(nxt)
        if m > 1 and mapping[order[-1]] != 0:
            raise ValueError("mapping is not a single cycle")
        return cls(m), order


@dataclass(frozen=True)
class TMParams:
    """Parameters ``(b, m, start, sigma)`` of one generalized Thue-Morse word."""

    b: int
    m: int
    start: int = 0
    sigma: CyclicPermutation = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.b < 2:
            raise ValueError(f"base b must be >= 2, got {self.b}")
        if self.m < 1:
            raise ValueError(f"alphabet size m must be >= 1, got {self.m}")
        if not 0 <= self.start < self.m:
            raise ValueError(f"start letter must lie in [0, {self.m}), got {self.start}")
        if self.sigma is None:
            object.__setattr__(self, "sigma", CyclicPermutation(self.m))
        elif self.sigma.m != self.m:
            raise ValueError("sigma acts on a different alphabet size")

    @property
    def periodic(self) -> bool:
        return (self.b - 1) % self.m == 0

    @property
    def overlap_case(self) -> bool:
        """Aperiodic with ``b > m`` (critical exponent ``2b/m``)."""
        return not self.periodic and self.b > self.m

    @property
    def square_case(self) -> bool:
        """Aperiodic with ``b <= m`` (critical exponent 2)."""
        return not self.periodic and self.b <= self.m

    def letter_dtype(self) -> np.dtype:
        return np.dtype(np.uint8) if self.m <= 256 else np.dtype(np.int64)


def digit_sum(n: int, b: int) -> int:
    """Sum of the base-``b`` digits of ``n``.

    >>> digit_sum(95, 10)
    14
    """
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    total = 0
    while n:
        n, d = divmod(n, b)
        total += d
    return total


def digit_sums(n: int, b: int, offset: int = 0) -> np.ndarray:
    """Vector of ``s_b(k)`` for ``k in [offset, offset + n)``."""
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    x = np.arange(offset, offset + n, dtype=np.int64)
    total = np.zeros(n, dtype=np.int64)
    while x.size and x.max() > 0:
        total += x % b
        x //= b
    return total


def letter_at(params: TMParams, n: int) -> int:
    return params.sigma(params.start, digit_sum(n, params.b))


def apply_morphism(params: TMParams, word: Sequence[int] | np.ndarray) -> np.ndarray:
    """Image of ``word`` under ``mu``; each letter becomes a sigma-cyclic block."""
    w = np.asarray(word, dtype=np.int64)
    steps = params.sigma.shift * np.arange(params.b, dtype=np.int64)
    return ((w[:, None] + steps[None, :]) % params.m).reshape(-1).astype(params.letter_dtype())


def prefix_by_morphism(params: TMParams, n: int) -> np.ndarray:
    """Length-``n`` prefix of ``mu^omega(start)``, built by iterating ``mu``."""
    if n < 0:
        raise ValueError(f"length must be non-negative, got {n}")
    word = np.array([params.start], dtype=params.letter_dtype())
    while word.size < n:
        word = apply_morphism(params, word)
    return word[:n].copy()


class LazyWord:
    """The infinite word of ``params``, addressable by position.

    Prefixes are materialized from the digit-sum formula and cached; the
    cache only grows, under a lock, so reads stay pure.
    """

    def __init__(self, params: TMParams) -> None:
        self.params = params
        self._cache = np.zeros(0, dtype=params.letter_dtype())
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        p = self.params
        return f"LazyWord(b={p.b}, m={p.m}, start={p.start})"

    def prefix(self, n: int) -> np.ndarray:
        """Read-only array holding the first ``n`` letters."""
        if n < 0:
            raise ValueError(f"length must be non-negative, got {n}")
        cache = self._cache
        if cache.size < n:
            with self._lock:
                cache = self._cache
                if cache.size < n:
                    size = max(n, 2 * cache.size)
                    p = self.params
                    tail = (p.start + p.sigma.shift * digit_sums(size - cache.size, p.b, cache.size)) % p.m
                    cache = np.concatenate([cache, tail.astype(cache.dtype)])
                    cache.flags.writeable = False
                    self._cache = cache
        return cache[:n]

    def __getitem__(self, key: int | slice):
        if isinstance(key, slice):
            if key.stop is None or key.stop < 0 or (key.start or 0) < 0:
                raise IndexError("slices of an infinite word need explicit non-negative bounds")
            return self.prefix(key.stop)[key]
        if key < 0:
            raise IndexError("negative positions are undefined")
        if key < self._cache.size:
            return int(self._cache[key])
        return letter_at(self.params, key)

    def block(self, k: int) -> np.ndarray:
        b = self.params.b
        return self.prefix((k + 1) * b)[k * b:(k + 1) * b]


def is_periodic(params: TMParams) -> tuple[bool, tuple[int, ...] | None]:
    """Whether the word is periodic, and its period word when it is."""
    if not params.periodic:
        return False, None
    period = tuple(params.sigma(params.start, i) for i in range(params.m))
    return True, period


def is_sigma_cyclic(w: Sequence[int], sigma: CyclicPermutation) -> bool:
    return all(sigma(w[i - 1]) == w[i] for i in range(1, len(w)))


def block(params: TMParams, k: int) -> tuple[int, ...]:
    """Letters at positions ``[kb, (k+1)b)``."""
    if k < 0:
        raise ValueError(f"block index must be non-negative, got {k}")
    first = letter_at(params, k * params.b)
    return tuple(params.sigma(first, i) for i in range(params.b))


def parse_rename(symbols: str, m: int) -> list[str]:
    """Split a rename string into ``m`` distinct display symbols."""
    out = list(symbols)
    if len(out) != m or len(set(out)) != m:
        raise ValueError(f"rename needs exactly {m} distinct symbols, got {symbols!r}")
    return out


def rename(word: Sequence[int] | np.ndarray, symbols: Sequence[str] | None = None) -> str:
    """Render letters as text; residues print as digits without ``symbols``."""
    if symbols is None:
        if all(0 <= int(a) < 10 for a in word):
            return "".join(str(int(a)) for a in word)
        return " ".join(str(int(a)) for a in word)
    return "".join(symbols[int(a)] for a in word)
