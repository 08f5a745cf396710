"""Partitions, standard tableaux, irrep dimensions and symmetric-group characters.

Everything here is exact integer arithmetic.  Partitions are listed in
reverse lexicographic order, which is also the block order used for every
direct sum over ``lambda |- n`` elsewhere in the package.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import DimensionMismatchError, EmptyInputError


class Partition(tuple):
    """An integer partition, stored as a weakly decreasing tuple of positive parts."""

    def __new__(cls, parts: Iterable[int] = ()):
        parts = tuple(int(p) for p in parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"partition parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"partition parts must be non-increasing: {parts}")
        return super().__new__(cls, parts)

    @property
    def n(self) -> int:
        return sum(self)

    @property
    def parts(self) -> tuple[int, ...]:
        return tuple(self)

    def conjugate(self) -> "Partition":
        if not self:
            return Partition()
        return Partition(sum(1 for p in self if p > c) for c in range(self[0]))

    def boxes(self):
        """Yield ``(row, col)`` for every box, row-major, 0-indexed."""
        for r, length in enumerate(self):
            for c in range(length):
                yield r, c

    def __repr__(self):
        return "[" + ",".join(str(p) for p in self) + "]"

    __str__ = __repr__

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Parse the command-line form ``"2,1"``."""
        return cls(int(t) for t in text.replace(" ", "").split(",") if t)


CycleType = Partition


def partitions(n: int) -> list[Partition]:
    """All partitions of ``n`` in reverse lexicographic order."""
    if n < 1:
        raise EmptyInputError("partitions() needs n >= 1")
    return [Partition(p) for p in _partitions(n, n)]


@lru_cache(maxsize=None)
def _partitions(n: int, largest: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        out.extend((first,) + rest for rest in _partitions(n - first, first))
    return tuple(out)


@dataclass(frozen=True)
class StandardTableau:
    """A standard Young tableau; ``rows`` hold the entries ``1..n``."""

    shape: Partition
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if tuple(len(r) for r in self.rows) != tuple(self.shape):
            raise ValueError("row lengths do not match the shape")
        n = self.shape.n
        if sorted(e for r in self.rows for e in r) != list(range(1, n + 1)):
            raise ValueError("entries must be 1..n exactly once")
        for r, row in enumerate(self.rows):
            for c, e in enumerate(row):
                if c and row[c - 1] >= e:
                    raise ValueError("rows must increase")
                if r and self.rows[r - 1][c] >= e:
                    raise ValueError("columns must increase")

    @property
    def n(self) -> int:
        return self.shape.n

    def position(self, entry: int) -> tuple[int, int]:
        for r, row in enumerate(self.rows):
            if entry in row:
                return r, row.index(entry)
        raise KeyError(entry)

    def content(self, entry: int) -> int:
        r, c = self.position(entry)
        return c - r

    def swap(self, a: int, b: int) -> "StandardTableau | None":
        """Exchange entries ``a`` and ``b``; ``None`` if the result is not standard."""
        rows = tuple(tuple(b if e == a else a if e == b else e for e in row) for row in self.rows)
        try:
            return StandardTableau(self.shape, rows)
        except ValueError:
            return None


def standard_tableaux(shape: Sequence[int]) -> list[StandardTableau]:
    """Standard tableaux of ``shape`` in last-letter order.

    The entry ``n`` is placed in the removable corners from the bottom row
    upward, recursively, so the first tableau has ``n`` in the lowest
    possible row.  For ``[2,1]`` this gives ``[[1,2],[3]]`` then ``[[1,3],[2]]``.
    """
    shape = Partition(shape)
    return [StandardTableau(shape, rows) for rows in _tableaux(tuple(shape))]


@lru_cache(maxsize=None)
def _tableaux(shape: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], ...], ...]:
    n = sum(shape)
    if n == 0:
        return ((),)
    out = []
    for r in range(len(shape) - 1, -1, -1):
        if r + 1 < len(shape) and shape[r + 1] == shape[r]:
            continue
        smaller = list(shape)
        smaller[r] -= 1
        if smaller[r] == 0:
            smaller.pop()
        for rows in _tableaux(tuple(smaller)):
            rows = list(rows) + [()] * (len(shape) - len(rows))
            rows[r] = rows[r] + (n,)
            out.append(tuple(rows))
    return tuple(out)


def hook_lengths(shape: Sequence[int]) -> list[list[int]]:
    shape = Partition(shape)
    conj = shape.conjugate()
    return [[shape[r] - c + conj[c] - r - 1 for c in range(shape[r])] for r in range(len(shape))]


def sym_dim(shape: Sequence[int]) -> int:
    """Dimension ``m_lambda`` of the symmetric-group irrep, by the hook-length formula."""
    shape = Partition(shape)
    denom = math.prod(h for row in hook_lengths(shape) for h in row)
    return math.factorial(shape.n) // denom


def unitary_dim(shape: Sequence[int], d: int) -> int:
    """Dimension ``d_lambda(d)`` of the U(d) irrep, by the Weyl dimension formula."""
    shape = Partition(shape)
    if d < 1:
        raise ValueError("d must be positive")
    if len(shape) > d:
        return 0
    lam = list(shape) + [0] * (d - len(shape))
    num = den = 1
    for i in range(d):
        for j in range(i + 1, d):
            num *= lam[i] - lam[j] + j - i
            den *= j - i
    return num // den


def dimension_table(n: int, d: int) -> list[tuple[Partition, int, int]]:
    """Rows ``(lambda, m_lambda, d_lambda(d))`` for every ``lambda |- n``."""
    return [(lam, sym_dim(lam), unitary_dim(lam, d)) for lam in partitions(n)]


def class_size(cycle_type: Sequence[int]) -> int:
    """Number of permutations with the given cycle type."""
    cycle_type = Partition(cycle_type)
    z = 1
    for length, mult in Counter(cycle_type).items():
        z *= length**mult * math.factorial(mult)
    return math.factorial(cycle_type.n) // z


def character(shape: Sequence[int], cycle_type: Sequence[int]) -> int:
    """Irreducible character ``chi_lambda`` on a conjugacy class (Murnaghan-Nakayama)."""
    shape, cycle_type = Partition(shape), Partition(cycle_type)
    if shape.n != cycle_type.n:
        raise DimensionMismatchError(f"{shape} and {cycle_type} partition different integers")
    return _mn(tuple(shape), tuple(cycle_type))


@lru_cache(maxsize=None)
def _mn(shape: tuple[int, ...], cycle_type: tuple[int, ...]) -> int:
    if not cycle_type:
        return 1
    k, rest = cycle_type[0], cycle_type[1:]
    length = len(shape)
    beta = [p + length - 1 - i for i, p in enumerate(shape)]
    beta_set = set(beta)
    total = 0
    for b in beta:
        target = b - k
        if target < 0 or target in beta_set:
            continue
        height = sum(1 for x in beta if target < x < b)
        new_beta = sorted((beta_set - {b}) | {target}, reverse=True)
        new_shape = tuple(x - (length - 1 - i) for i, x in enumerate(new_beta))
        new_shape = tuple(p for p in new_shape if p > 0)
        total += (-1) ** height * _mn(new_shape, rest)
    return total
