"""Positions of critical powers in aperiodic generalized Thue-Morse words.

Closed-form position sets (all positions are 0-based):

* ``bezout_set(g, x, y)``: ``{s >= 1 : g = s*x + t*y for some integer t}``;
* ``A = {k b^q - b : k >= 1, b does not divide k, q in S^m_{b-1,m}}``
  (overlap case, critical factors of length ``m``);
* ``B_N = {k b^q - N : k >= 1, b does not divide k, q in S^N_{b-1,m}}``
  (square case, critical factors of length ``N < b``);
* ``C = (8 B_1 + 3) | (8 B_1 + 7)``, the squares of period 3 in the
  Thue-Morse word.

Every enumeration takes an explicit position bound and is complete strictly
below it.  :func:`scan_power_occurrences` is the brute-force counterpart
used to cross-check them.
"""

from __future__ import annotations

import bisect
import heapq
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .repetition import Exponent, critical_exponent_closed_form
from .words import LazyWord, TMParams, digit_sum

__all__ = [
    "InadmissibleParameters",
    "OccurrenceSet",
    "max_positions",
    "bezout_set",
    "set_A",
    "set_B",
    "set_C",
    "critical_occurrences",
    "admissible_lengths",
    "digit_sum_identity_check",
    "critical_length_exists",
    "is_synchronized",
    "scan_power_occurrences",
    "first_critical_occurrence",
    "suggested_horizon",
]

DEFAULT_MAX_POSITIONS = 10**7


class InadmissibleParameters(ValueError):
    """Parameters outside the case an occurrence formula covers."""


def max_positions() -> int:
    return int(os.environ.get("TMLAB_MAX_POSITIONS", DEFAULT_MAX_POSITIONS))


@dataclass(frozen=True)
class OccurrenceSet:
    """Sorted, duplicate-free positions below ``bound``."""

    kind: str
    b: int
    m: int
    n: int | None
    scale: int
    bound: int
    positions: tuple[int, ...]

    def __iter__(self) -> Iterator[int]:
        return iter(self.positions)

    def __len__(self) -> int:
        return len(self.positions)

    def __contains__(self, p: object) -> bool:
        if not isinstance(p, int):
            return False
        i = bisect.bisect_left(self.positions, p)
        return i < len(self.positions) and self.positions[i] == p


def bezout_set(g: int, x: int, y: int, *, cap: int | None = None, count: int | None = None) -> list[int]:
    """Ascending ``s >= 1`` with ``s*x == g (mod y)``, up to ``cap`` or the first ``count``.

    >>> bezout_set(3, 4, 3, count=5)
    [3, 6, 9, 12, 15]
    """
    if min(g, x, y) < 1:
        raise ValueError("g, x and y must be positive")
    if (cap is None) == (count is None):
        raise ValueError("give exactly one of cap or count")
    d = math.gcd(x, y)
    if g % d:
        return []
    step = y // d
    s0 = (g // d) * pow(x // d, -1, step) % step if step > 1 else 0
    s0 = s0 or step
    if count is not None:
        return [s0 + k * step for k in range(count)]
    return list(range(s0, cap + 1, step))


def _check_budget(size: int) -> None:
    limit = max_positions()
    if size > limit:
        raise OverflowError(f"enumeration would exceed {limit} positions (TMLAB_MAX_POSITIONS)")


def _q_stream(b: int, q: int, offset: int, bound: int) -> Iterator[int]:
    step = b**q
    k = 1
    while True:
        pos = k * step - offset
        if pos >= bound:
            return
        if k % b:
            yield pos
        k += 1


def _progression_set(b: int, offset: int, qs: Iterator[int], bound: int) -> list[int]:
    """Merge ``{k b^q - offset}`` over ``q`` in ``qs`` (ascending) below ``bound``."""
    streams = []
    estimate = 0
    for q in qs:
        if b**q - offset >= bound:
            break
        estimate += bound // b**q + 1
        _check_budget(estimate)
        streams.append(_q_stream(b, q, offset, bound))
    out: list[int] = []
    for pos in heapq.merge(*streams):
        if not out or out[-1] != pos:
            out.append(pos)
    return out


def _bezout_stream(g: int, x: int, y: int) -> Iterator[int]:
    first = bezout_set(g, x, y, count=2)
    if not first:
        return
    s, step = first[0], first[1] - first[0]
    while True:
        yield s
        s += step


def _require_aperiodic(params: TMParams) -> None:
    if params.periodic:
        raise InadmissibleParameters(f"t_{{{params.b},{params.m}}} is periodic (m | b-1): no critical powers")


def _scaled(positions: list[int], b: int, scale: int, bound: int) -> tuple[int, ...]:
    factor = b**scale
    return tuple(p * factor for p in positions if p * factor < bound)


def _shrunk(bound: int, b: int, scale: int) -> int:
    # positions p with p * b^scale < bound
    return -(-bound // b**scale)


def set_A(params: TMParams, bound: int) -> OccurrenceSet:
    """Starts of the ``2b/m``-powers of length-``m`` factors (overlap case)."""
    _require_aperiodic(params)
    b, m = params.b, params.m
    if b <= m:
        raise InadmissibleParameters(f"set A needs b > m, got b={b}, m={m}")
    positions = _progression_set(b, b, _bezout_stream(m, b - 1, m), bound)
    return OccurrenceSet("A", b, m, m, 0, bound, tuple(positions))


def set_B(params: TMParams, n: int, bound: int) -> OccurrenceSet:
    """Starts of squares of length-``n`` factors, ``1 <= n < b`` (square case)."""
    _require_aperiodic(params)
    b, m = params.b, params.m
    if b > m:
        raise InadmissibleParameters(f"set B needs b <= m, got b={b}, m={m}")
    if not 1 <= n < b:
        raise InadmissibleParameters(f"set B is defined for 1 <= N < b, got N={n}, b={b}")
    positions = _progression_set(b, n, _bezout_stream(n, b - 1, m), bound)
    return OccurrenceSet(f"B_{n}", b, m, n, 0, bound, tuple(positions))


def set_C(bound: int) -> OccurrenceSet:
    """Starts of the period-3 squares of the Thue-Morse word."""
    b1 = set_B(TMParams(2, 2), 1, max((bound - 3) // 8 + 1, 0)).positions
    positions = sorted(p for p in {8 * s + r for s in b1 for r in (3, 7)} if p < bound)
    return OccurrenceSet("C", 2, 2, 3, 0, bound, tuple(positions))


def admissible_lengths(params: TMParams) -> list[int]:
    """Base lengths ``N`` (with ``b`` not dividing ``N``) that a critical factor may have.

    Lengths whose position set is empty are included; they are valid
    queries with an empty answer.
    """
    _require_aperiodic(params)
    b, m = params.b, params.m
    if b > m:
        return [m]
    if (b, m) == (2, 2):
        return [1, 3]
    return list(range(1, b))


def critical_occurrences(params: TMParams, n: int, scale: int, bound: int, *, union: bool = False) -> OccurrenceSet:
    """Starts below ``bound`` of critical powers whose factor has length ``n * b**scale``.

    For ``b = m = 2`` the lengths 1 and 3 are kept apart (``B_1`` and ``C``);
    ``union=True`` returns ``b^scale (B_1 | C)`` regardless of ``n``.
    """
    _require_aperiodic(params)
    b, m = params.b, params.m
    if scale < 0:
        raise ValueError(f"scale exponent must be >= 0, got {scale}")
    if n < 1 or n % b == 0:
        raise InadmissibleParameters(f"base length N must be positive and not divisible by b={b}, got {n}")
    inner = _shrunk(bound, b, scale)
    if b > m:
        if n != m:
            raise InadmissibleParameters(f"in the overlap case critical factors have length m={m}, got N={n}")
        base, kind = set_A(params, inner).positions, "A"
    elif (b, m) == (2, 2):
        if union:
            base = tuple(sorted(set(set_B(params, 1, inner).positions) | set(set_C(inner).positions)))
            kind = "B_1|C"
        elif n == 1:
            base, kind = set_B(params, 1, inner).positions, "B_1"
        elif n == 3:
            base, kind = set_C(inner).positions, "C"
        else:
            raise InadmissibleParameters(f"the Thue-Morse word has critical factors of base length 1 or 3 only, got {n}")
    else:
        if n > b:
            raise InadmissibleParameters(f"for (b, m) = ({b}, {m}) critical factors have base length < b, got {n}")
        base, kind = set_B(params, n, inner).positions, f"B_{n}"
    positions = _scaled(list(base), b, scale, bound)
    if scale:
        kind = f"{b}^{scale}*{kind}"
    return OccurrenceSet(kind, b, m, n, scale, bound, positions)


def digit_sum_identity_check(b: int, k: int, q: int, n: int) -> bool:
    """Check ``s_b(k b^q - n) - s_b(k b^q) == q(b-1) - n``."""
    if b < 2 or k < 1 or k % b == 0 or q < 1 or not 1 <= n < b:
        raise ValueError(f"need b >= 2, k >= 1 with b not dividing k, q >= 1, 1 <= N < b; got {(b, k, q, n)}")
    top = k * b**q
    return digit_sum(top - n, b) - digit_sum(top, b) == q * (b - 1) - n


def critical_length_exists(params: TMParams, ell: int) -> bool:
    """Whether some critical factor has length ``ell`` (square case, ``b`` not dividing ``ell``)."""
    _require_aperiodic(params)
    b, m = params.b, params.m
    if b > m:
        raise InadmissibleParameters(f"length criterion applies to the square case b <= m, got b={b}, m={m}")
    if ell < 1 or ell % b == 0:
        raise InadmissibleParameters(f"length must be positive and not divisible by b={b}, got {ell}")
    if ell > b:
        return (b, m) == (2, 2) and ell == 3
    return ell % math.gcd(b - 1, m) == 0


def is_synchronized(params: TMParams, position: int, length: int) -> bool:
    b = params.b
    return position % b == 0 and (position + length) % b == 0


def scan_power_occurrences(word: LazyWord | np.ndarray, period: int, exponent: Exponent, bound: int) -> list[int]:
    """Brute force: every ``p < bound`` where ``x[p : p + exponent*period]`` has period ``period``.

    A ``LazyWord`` is read far enough for powers starting just below
    ``bound`` to fit; a finite array is used as given.
    """
    e = Fraction(exponent)
    length = e * period
    if length.denominator != 1 or e < 1:
        raise ValueError(f"{e}-power of period {period} has no integer length")
    length = int(length)
    if isinstance(word, LazyWord):
        x = word.prefix(bound + length - 1)
    else:
        x = np.asarray(word)
    gap = length - period  # consecutive matches x[i] == x[i + period] required
    n_starts = min(bound, x.size - length + 1)
    if n_starts <= 0:
        return []
    if gap == 0:
        return list(range(n_starts))
    eq = (x[:x.size - period] == x[period:]).astype(np.int64)
    csum = np.concatenate(([0], np.cumsum(eq)))
    starts = np.arange(n_starts)
    full = csum[starts + gap] - csum[starts] == gap
    return [int(p) for p in np.flatnonzero(full)]


def first_critical_occurrence(params: TMParams) -> tuple[int, int] | None:
    """``(position, power length)`` of the earliest critical power, or None if periodic."""
    if params.periodic:
        return None
    e = critical_exponent_closed_form(params)
    b = params.b
    best: tuple[int, int] | None = None
    bound = 2 * b
    while best is None:
        for n in admissible_lengths(params):
            occ = critical_occurrences(params, n, 0, bound)
            if occ.positions:
                cand = (occ.positions[0], int(e * n))
                best = cand if best is None or cand < best else best
        bound *= b
    return best


def suggested_horizon(params: TMParams) -> int:
    """Prefix length that covers the first critical power (periodic words: a few periods)."""
    first = first_critical_occurrence(params)
    if first is None:
        return max(4 * params.m, 2)
    pos, length = first
    return max(pos + length, 2)
