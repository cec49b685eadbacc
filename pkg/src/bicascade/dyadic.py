"""Symbolic dynamics on the binary tree.

A finite word ``w = w_1 ... w_j`` over {0,1} addresses the half-open dyadic
interval ``I_w = [x_w, x_w + 2^-j)`` of generation ``j``, where
``x_w = sum_l w_l 2^-l``.  Generation indices are 1-based.  Words and
generation index sets are immutable; everything here is pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional


@dataclass(frozen=True)
class Word:
    """A finite binary word, most significant digit first."""

    bits: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"word digits must be 0 or 1, got {self.bits!r}")

    @classmethod
    def from_string(cls, s: str) -> "Word":
        return cls(tuple(int(c) for c in s))

    @classmethod
    def from_index(cls, k: int, j: int) -> "Word":
        """Word of length ``j`` with x_w = k * 2^-j."""
        if not 0 <= k < (1 << j):
            raise ValueError(f"index {k} out of range for generation {j}")
        return cls(tuple((k >> (j - 1 - i)) & 1 for i in range(j)))

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    @property
    def index(self) -> int:
        """Position of I_w among the 2^j cells of its generation."""
        k = 0
        for b in self.bits:
            k = (k << 1) | b
        return k

    def value(self) -> Fraction:
        """x_w as an exact dyadic rational."""
        j = len(self.bits)
        return Fraction(self.index, 1 << j) if j else Fraction(0)

    def neighbors(self) -> tuple[Optional["Word"], Optional["Word"]]:
        """Codings of I_w - 2^-j and I_w + 2^-j, ``None`` when outside [0,1)."""
        j = len(self.bits)
        if j == 0:
            raise ValueError("no generation: the empty word has no neighbors")
        k = self.index
        left = Word.from_index(k - 1, j) if k > 0 else None
        right = Word.from_index(k + 1, j) if k + 1 < (1 << j) else None
        return left, right

    def digit_counts(self) -> tuple[int, int]:
        """(N0, N1): number of zeros and ones."""
        n1 = sum(self.bits)
        return len(self.bits) - n1, n1

    def concat(self, other: "Word") -> "Word":
        return Word(self.bits + other.bits)


@dataclass(frozen=True)
class GenIndexSet:
    """Subset of the generations 1..j_max, as a membership mask."""

    membership: tuple[bool, ...]

    @classmethod
    def from_indices(cls, indices: Iterable[int], j_max: int) -> "GenIndexSet":
        idx = set(indices)
        bad = [i for i in idx if not 1 <= i <= j_max]
        if bad:
            raise ValueError(f"generation indices out of range 1..{j_max}: {bad}")
        return cls(tuple(i in idx for i in range(1, j_max + 1)))

    @classmethod
    def from_bitstring(cls, s: str) -> "GenIndexSet":
        return cls(tuple(c == "1" for c in s))

    @classmethod
    def full(cls, j_max: int) -> "GenIndexSet":
        return cls((True,) * j_max)

    @classmethod
    def empty(cls, j_max: int) -> "GenIndexSet":
        return cls((False,) * j_max)

    def __len__(self) -> int:
        return len(self.membership)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i + 1 for i, m in enumerate(self.membership) if m)

    def count_upto(self, j: int) -> int:
        """j^B = #(B intersect {1..j})."""
        return sum(self.membership[:j])

    def complement(self) -> "GenIndexSet":
        return GenIndexSet(tuple(not m for m in self.membership))

    def restrict(self, w: Word) -> Word:
        """w^B: the subsequence of letters of w at generations in B."""
        if len(w) > len(self.membership):
            raise ValueError(
                f"index set defined up to {len(self.membership)}, word has length {len(w)}"
            )
        return Word(tuple(b for b, m in zip(w.bits, self.membership) if m))

    def to_bitstring(self) -> str:
        return "".join("1" if m else "0" for m in self.membership)

    def to_runs(self) -> list[list[int]]:
        """Member generations as inclusive [start, end] runs."""
        runs: list[list[int]] = []
        for i in self.indices:
            if runs and runs[-1][1] == i - 1:
                runs[-1][1] = i
            else:
                runs.append([i, i])
        return runs

    @classmethod
    def from_runs(cls, runs: Iterable[Iterable[int]], j_max: int) -> "GenIndexSet":
        idx: list[int] = []
        for a, b in runs:
            idx.extend(range(a, b + 1))
        return cls.from_indices(idx, j_max)


def value(w: Word) -> Fraction:
    """x_w, exactly."""
    return w.value()


def neighbors(w: Word) -> tuple[Optional[Word], Optional[Word]]:
    """Left and right neighbor words of the same generation."""
    return w.neighbors()


def restrict(w: Word, index_set: GenIndexSet) -> Word:
    return index_set.restrict(w)


def digit_counts(w: Word) -> tuple[int, int]:
    return w.digit_counts()
