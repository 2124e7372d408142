"""Rational powers, indices of factors and maximal exponents of prefixes.

Exponents are exact: a :class:`fractions.Fraction` whose denominator
divides the period, or ``math.inf`` for periodic words.  ``Fraction``
compares exactly against ``math.inf``, so the two mix freely.

A period-``p`` repetition of length ``L + p`` inside a word ``x`` is a
maximal stretch ``x[i] == x[i + p]`` of ``L`` positions; its exponent is
``(L + p) / p``.  Two scanners compute the maximum of that over a prefix:

* :func:`max_exponent_naive` tries every period and every position
  (quadratic, numpy-vectorized per period) and is the reference;
* :func:`max_exponent_in_prefix` samples match positions at multiples of
  each period and extends around them.  Every stretch with ``L >= p``
  contains such a sample, so the result is exact whenever the maximal
  exponent is at least 2, which holds for all aperiodic words here once
  the horizon covers the first square.  Otherwise it falls back to the
  naive scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, TypeVar, Union

import numba
import numpy as np

from .words import LazyWord, TMParams

__all__ = [
    "Exponent",
    "INFINITE",
    "IndexResult",
    "CriticalExponentReport",
    "FactorNotFound",
    "format_exponent",
    "parse_exponent",
    "rational_power",
    "index_of_factor",
    "critical_exponent_closed_form",
    "max_exponent_naive",
    "max_exponent_in_prefix",
    "find_overlap",
    "find_overlap_naive",
    "find_squares",
]

Exponent = Union[Fraction, float]
INFINITE: float = math.inf

W = TypeVar("W", str, tuple, list)


class FactorNotFound(LookupError):
    """The queried factor does not occur inside the searched prefix."""


def format_exponent(e: Exponent) -> str:
    """``"p/q"`` for finite exponents (``"2"`` when integral), ``"inf"`` otherwise."""
    if e == INFINITE:
        return "inf"
    return str(Fraction(e))


def parse_exponent(text: str) -> Exponent:
    if text.strip().lower() in ("inf", "infinity", "∞"):
        return INFINITE
    return Fraction(text)


@dataclass(frozen=True)
class IndexResult:
    factor: tuple[int, ...]
    exponent: Exponent
    witness_position: int
    horizon: int
    truncated: bool = False  # the power reaches the end of the prefix and may extend past it


@dataclass(frozen=True)
class CriticalExponentReport:
    closed_form: Exponent
    empirical_max: Exponent
    critical_factor: tuple[int, ...]
    witness_position: int
    horizon: int
    truncated: bool = False

    @property
    def period(self) -> int:
        return len(self.critical_factor)

    @property
    def agrees(self) -> bool:
        return self.empirical_max == self.closed_form


def rational_power(w: W, r: Fraction | int) -> W:
    """``w`` repeated ``floor(r)`` times, then its prefix of length ``(r - floor(r))|w|``.

    >>> rational_power("abbacc", Fraction(5, 2))
    'abbaccabbaccabb'
    """
    if isinstance(r, float):
        raise TypeError("exponent must be exact (int or Fraction)")
    r = Fraction(r)
    if len(w) == 0:
        raise ValueError("cannot raise the empty word to a rational power")
    if r < 0:
        raise ValueError(f"exponent must be non-negative, got {r}")
    total = r * len(w)
    if total.denominator != 1:
        raise ValueError(f"{r} * {len(w)} is not an integer length")
    whole, rest = divmod(int(total), len(w))
    if isinstance(w, np.ndarray):
        return np.concatenate([np.tile(w, whole), w[:rest]])
    return w * whole + w[:rest]


def critical_exponent_closed_form(params: TMParams) -> Exponent:
    b, m = params.b, params.m
    if (b - 1) % m == 0:
        return INFINITE
    if b > m:
        return Fraction(2 * b, m)
    return Fraction(2)


def _as_prefix(word: LazyWord | np.ndarray | Sequence[int], horizon: int | None) -> np.ndarray:
    if isinstance(word, LazyWord):
        if horizon is None:
            raise ValueError("a horizon is required to scan an infinite word")
        return word.prefix(horizon)
    arr = np.asarray(word)
    return arr if horizon is None else arr[:horizon]


def _forward_runs(eq: np.ndarray) -> np.ndarray:
    """``out[i]`` = number of consecutive True values starting at ``i``."""
    n = eq.size
    idx = np.arange(n)
    nxt = np.where(eq, n, idx)
    nxt = np.minimum.accumulate(nxt[::-1])[::-1]
    return nxt - idx


def index_of_factor(word: LazyWord | np.ndarray, w: Sequence[int], horizon: int | None = None) -> IndexResult:
    """Largest exponent ``e`` with ``w^e`` inside the prefix, and its leftmost start."""
    x = _as_prefix(word, horizon)
    n = x.size
    factor = tuple(int(a) for a in w)
    ell = len(factor)
    if ell == 0:
        raise ValueError("factor must be non-empty")
    if ell > n:
        raise FactorNotFound(f"factor of length {ell} longer than horizon {n}")
    windows = np.lib.stride_tricks.sliding_window_view(x, ell)
    occ = np.flatnonzero((windows == np.asarray(factor, dtype=x.dtype)).all(axis=1))
    if occ.size == 0:
        raise FactorNotFound(f"factor {factor} does not occur in the first {n} letters")
    runs = np.zeros(n, dtype=np.int64)
    runs[:n - ell] = _forward_runs(x[:n - ell] == x[ell:])
    ext = runs[occ]
    best = int(np.argmax(ext))
    start, extra = int(occ[best]), int(ext[best])
    return IndexResult(
        factor=factor,
        exponent=Fraction(ell + extra, ell),
        witness_position=start,
        horizon=n,
        truncated=start + ell + extra == n,
    )


def _longest_true_run(eq: np.ndarray) -> tuple[int, int]:
    """Length and leftmost start of the longest stretch of True values."""
    if eq.size == 0 or not eq.any():
        return 0, -1
    d = np.diff(np.concatenate(([0], eq.view(np.int8), [0])))
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    lengths = ends - starts
    k = int(np.argmax(lengths))
    return int(lengths[k]), int(starts[k])


def max_exponent_naive(x: np.ndarray) -> tuple[Fraction, int, int]:
    """``(exponent, period, start)`` of the largest repetition in ``x``; O(n^2).

    Ties go to the smaller period, then the leftmost start.  A word with
    no repetition at all reports exponent 1 for the whole word.
    """
    x = np.asarray(x)
    n = x.size
    best, best_p, best_s = Fraction(1), n, 0
    for p in range(1, n):
        if Fraction(n, p) <= best:
            break
        length, start = _longest_true_run(x[:-p] == x[p:])
        if length and Fraction(length + p, p) > best:
            best, best_p, best_s = Fraction(length + p, p), p, start
    return best, best_p, best_s


@numba.njit(cache=True)
def _sampled_runs(x, pmax):  # pragma: no cover - compiled
    n = x.size
    best_len = np.zeros(pmax + 1, np.int64)
    best_start = np.full(pmax + 1, -1, np.int64)
    first_overlap = np.full(pmax + 1, -1, np.int64)
    for p in range(1, pmax + 1):
        limit = n - p
        j = 0
        while j < limit:
            if x[j] != x[j + p]:
                j += p
                continue
            s = j
            while s > 0 and x[s - 1] == x[s - 1 + p]:
                s -= 1
            e = j + 1
            while e < limit and x[e] == x[e + p]:
                e += 1
            length = e - s
            if length >= p:
                if length > best_len[p]:
                    best_len[p] = length
                    best_start[p] = s
                if length > p and first_overlap[p] < 0:
                    first_overlap[p] = s
            j = (e // p + 1) * p
    return best_len, best_start, first_overlap


@numba.njit(cache=True)
def _pick_max(best_len):  # pragma: no cover - compiled
    num, den, arg = 0, 1, -1
    for p in range(1, best_len.size):
        length = best_len[p]
        if length >= p and (length + p) * den > num * p:
            num, den, arg = length + p, p, p
    return arg


def _scan(x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    pmax = max(x.size // 2, 1)
    return _sampled_runs(np.ascontiguousarray(x), pmax)


def max_exponent_in_prefix(word: LazyWord, horizon: int) -> CriticalExponentReport:
    """Maximal exponent of a repetition inside the first ``horizon`` letters."""
    if horizon < 2:
        raise ValueError(f"horizon must be >= 2, got {horizon}")
    x = word.prefix(horizon)
    best_len, best_start, _ = _scan(x)
    p = int(_pick_max(best_len))
    if p > 0:
        length, start = int(best_len[p]), int(best_start[p])
        exponent = Fraction(length + p, p)
    else:
        exponent, p, start = max_exponent_naive(x)
        length = int(exponent * p) - p
    return CriticalExponentReport(
        closed_form=critical_exponent_closed_form(word.params),
        empirical_max=exponent,
        critical_factor=tuple(int(a) for a in x[start:start + p]),
        witness_position=start,
        horizon=horizon,
        truncated=start + length + p == horizon,
    )


def find_overlap(word: LazyWord | np.ndarray, horizon: int | None = None) -> tuple[int, tuple[int, ...]] | None:
    """Leftmost factor ``a u a u a`` in the prefix, as ``(position, factor)``."""
    x = _as_prefix(word, horizon)
    if x.size < 3:
        return None
    _, _, first = _scan(x)
    hits = np.flatnonzero(first >= 0)
    if hits.size == 0:
        return None
    k = int(np.argmin(first[hits]))  # argmin keeps the smallest period on ties
    p, pos = int(hits[k]), int(first[hits[k]])
    return pos, tuple(int(a) for a in x[pos:pos + 2 * p + 1])


def find_overlap_naive(x: Sequence[int] | np.ndarray) -> tuple[int, tuple[int, ...]] | None:
    """Direct check of every window ``x[i:i+2p+1]`` against its shift by ``p``."""
    x = list(np.asarray(x).tolist())
    n = len(x)
    for i in range(n):
        for p in range(1, (n - i - 1) // 2 + 1):
            if x[i:i + p + 1] == x[i + p:i + 2 * p + 1]:
                return i, tuple(x[i:i + 2 * p + 1])
    return None


def find_squares(word: LazyWord | np.ndarray, horizon: int, ell: int) -> list[int]:
    """Positions ``p < horizon - 2*ell`` where ``x[p:p+ell] == x[p+ell:p+2*ell]``."""
    if ell < 1:
        raise ValueError(f"square half-length must be >= 1, got {ell}")
    x = _as_prefix(word, horizon)
    top = horizon - 2 * ell
    if top <= 0:
        return []
    eq = x[:top - 1 + 2 * ell - ell] == x[ell:top - 1 + 2 * ell]
    runs = _forward_runs(eq)
    return [int(p) for p in np.flatnonzero(runs[:top] >= ell)]
