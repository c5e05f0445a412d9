"""Exact multi-index arithmetic and graded-lexicographic enumeration.

A multi-index is a fixed-width tuple of nonnegative integers.  The width is
the number of derivation slots of the ambient structure and never changes
under arithmetic; mixing widths is a caller bug and raises.  All counting
functions return exact Python ints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product
from typing import Iterator


@dataclass(frozen=True)
class MultiIndex:
    """Exponent tuple driving binomial weights and truncation bookkeeping."""

    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("multi-index needs at least one slot")
        if any(not isinstance(e, int) or e < 0 for e in self.entries):
            raise ValueError(f"multi-index entries must be nonnegative ints: {self.entries!r}")

    @classmethod
    def of(cls, *entries: int) -> MultiIndex:
        return cls(tuple(entries))

    @classmethod
    def zero(cls, width: int) -> MultiIndex:
        return cls((0,) * width)

    @classmethod
    def unit(cls, width: int, slot: int) -> MultiIndex:
        """The index with a single 1 in ``slot`` (0-based)."""
        if not 0 <= slot < width:
            raise ValueError(f"slot {slot} out of range for width {width}")
        return cls(tuple(1 if i == slot else 0 for i in range(width)))

    @property
    def width(self) -> int:
        return len(self.entries)

    @cached_property
    def degree(self) -> int:
        """Total degree, the sum of all entries."""
        return sum(self.entries)

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)

    def _same_width(self, other: MultiIndex) -> None:
        if self.width != other.width:
            raise ValueError(f"width mismatch: {self.entries} vs {other.entries}")

    def le(self, other: MultiIndex) -> bool:
        """Componentwise comparison; the partial order of the summation lattice."""
        self._same_width(other)
        return all(a <= b for a, b in zip(self.entries, other.entries))

    def __add__(self, other: MultiIndex) -> MultiIndex:
        self._same_width(other)
        return MultiIndex(tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: MultiIndex) -> MultiIndex:
        self._same_width(other)
        if not other.le(self):
            raise ValueError(f"{other.entries} is not componentwise <= {self.entries}")
        return MultiIndex(tuple(a - b for a, b in zip(self.entries, other.entries)))

    def factorial(self) -> int:
        out = 1
        for e in self.entries:
            out *= math.factorial(e)
        return out

    def binomial(self, lower: MultiIndex) -> int:
        """Product of componentwise binomials; requires ``lower`` <= self."""
        self._same_width(lower)
        if not lower.le(self):
            raise ValueError(f"binomial needs {lower.entries} componentwise <= {self.entries}")
        out = 1
        for n, k in zip(self.entries, lower.entries):
            out *= math.comb(n, k)
        return out

    def __getitem__(self, slot: int) -> int:
        return self.entries[slot]

    def __iter__(self) -> Iterator[int]:
        return iter(self.entries)

    def __repr__(self) -> str:
        return f"MultiIndex{self.entries!r}"


def grlex_key(alpha: MultiIndex) -> tuple[int, tuple[int, ...]]:
    """Sort key for graded-lex order: by total degree, then earlier slots first.

    Within a grade the order puts weight on the leading slots, so for width 2
    the grade-1 indices come as (1,0) then (0,1).
    """
    return (alpha.degree, tuple(-e for e in alpha.entries))


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


@lru_cache(maxsize=None)
def enumerate_upto(width: int, bound: int) -> tuple[MultiIndex, ...]:
    """All indices of total degree <= bound in graded-lex order."""
    if width < 1:
        raise ValueError("width must be at least 1")
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    out: list[MultiIndex] = []
    for grade in range(bound + 1):
        out.extend(MultiIndex(c) for c in _compositions(grade, width))
    return tuple(out)


def count_upto(width: int, bound: int) -> int:
    """Number of indices of total degree <= bound: binom(bound + width, width)."""
    return math.comb(bound + width, width)


@lru_cache(maxsize=None)
def iter_dominated(alpha: MultiIndex) -> tuple[MultiIndex, ...]:
    """All beta componentwise <= alpha, in a fixed deterministic order."""
    return tuple(
        MultiIndex(entries)
        for entries in product(*(range(e + 1) for e in alpha.entries))
    )
