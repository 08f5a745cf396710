"""Permutations and the representations of S_n used throughout the package.

Conventions
-----------
* A :class:`Permutation` is a tuple in 0-indexed one-line notation,
  ``sigma[j] = sigma(j)``.  ``sigma * tau`` applies ``tau`` first.
* ``permutation_action(sigma, d)`` moves tensor factor ``j`` to position
  ``sigma(j)``, i.e. ``|i_1 ... i_n> -> |i_{sigma^-1(1)} ... i_{sigma^-1(n)}>``,
  so that ``pi(sigma) pi(tau) = pi(sigma * tau)``.
* The group register uses the lexicographic rank of the one-line notation.
* The QFT output register is the flattened triple ``(lambda, i, j)``:
  blocks in reverse-lex partition order, ``i`` major and ``j`` minor, and
  the amplitude of ``|lambda, i, j>`` in ``QFT|sigma>`` is
  ``sqrt(m_lambda / n!) [g_lambda(sigma)]_{j i}``.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .combinatorics import Partition, partitions, standard_tableaux, sym_dim
from .errors import DimensionMismatchError


class Permutation(tuple):
    """A permutation of ``{0, ..., n-1}`` in one-line notation."""

    def __new__(cls, images: Iterable[int]):
        images = tuple(int(x) for x in images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation: {images}")
        return super().__new__(cls, images)

    @property
    def n(self) -> int:
        return len(self)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))

    @classmethod
    def from_cycles(cls, n: int, *cycles: Sequence[int]) -> "Permutation":
        """Build from 1-indexed cycles, e.g. ``from_cycles(3, (1, 2))`` is (12)."""
        images = list(range(n))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + type(cyc)(cyc[:1])):
                images[a - 1] = b - 1
        return cls(images)

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self)
        for j, s in enumerate(self):
            inv[s] = j
        return Permutation(inv)

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for start in range(len(self)):
            if start in seen:
                continue
            cyc, j = [], start
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = self[j]
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> Partition:
        return Partition(sorted((len(c) for c in self.cycles()), reverse=True))

    def sign(self) -> int:
        return (-1) ** (len(self) - len(self.cycles()))

    def adjacent_word(self) -> list[int]:
        """Indices ``k`` with ``self = s_{k_1} s_{k_2} ... s_{k_m}``, ``s_k = (k, k+1)``.

        Obtained by bubble sort: swapping positions ``p, p+1`` of the one-line
        array is right multiplication by ``s_p``.
        """
        arr = list(self)
        swaps = []
        for end in range(len(arr) - 1, 0, -1):
            for p in range(end):
                if arr[p] > arr[p + 1]:
                    arr[p], arr[p + 1] = arr[p + 1], arr[p]
                    swaps.append(p)
        return swaps[::-1]


def compose(sigma: Sequence[int], tau: Sequence[int]) -> Permutation:
    """``sigma`` after ``tau``: ``(sigma * tau)(j) = sigma(tau(j))``."""
    if len(sigma) != len(tau):
        raise DimensionMismatchError(f"cannot compose S_{len(sigma)} with S_{len(tau)}")
    return Permutation(sigma[t] for t in tau)


@lru_cache(maxsize=None)
def all_permutations(n: int) -> tuple[Permutation, ...]:
    """``S_n`` in lexicographic order; position in this tuple is the register index."""
    return tuple(Permutation(p) for p in itertools.permutations(range(n)))


@lru_cache(maxsize=None)
def _rank_table(n: int) -> dict:
    return {p: k for k, p in enumerate(all_permutations(n))}


def permutation_index(sigma: Sequence[int]) -> int:
    return _rank_table(len(sigma))[tuple(sigma)]


# --------------------------------------------------------------------------
# Young's orthogonal form


@lru_cache(maxsize=None)
def _adjacent_matrices(shape: tuple[int, ...]) -> tuple[np.ndarray, ...]:
    tabs = standard_tableaux(shape)
    index = {t.rows: k for k, t in enumerate(tabs)}
    n, m = sum(shape), len(tabs)
    mats = []
    for k in range(n - 1):
        a, b = k + 1, k + 2
        mat = np.zeros((m, m))
        for col, t in enumerate(tabs):
            inv_axial = 1.0 / (t.content(b) - t.content(a))
            mat[col, col] = inv_axial
            swapped = t.swap(a, b)
            if swapped is not None:
                mat[index[swapped.rows], col] = math.sqrt(1.0 - inv_axial**2)
        mat.flags.writeable = False
        mats.append(mat)
    return tuple(mats)


def young_orthogonal_rep(shape: Sequence[int], sigma: Sequence[int]) -> np.ndarray:
    """Real orthogonal matrix ``g_lambda(sigma)`` in the Young-Yamanouchi basis.

    Rows and columns follow :func:`standard_tableaux` (last-letter order).
    """
    shape = Partition(shape)
    sigma = Permutation(sigma)
    if shape.n != sigma.n:
        raise DimensionMismatchError(f"{shape} is not a partition of {sigma.n}")
    gens = _adjacent_matrices(tuple(shape))
    out = np.eye(sym_dim(shape))
    for k in sigma.adjacent_word():
        out = out @ gens[k]
    return out


@lru_cache(maxsize=64)
def irrep_matrices(shape: tuple[int, ...]) -> np.ndarray:
    """Stack ``g_lambda(sigma)`` for all ``sigma`` in register order, shape ``(n!, m, m)``."""
    shape = Partition(shape)
    mats = np.array([young_orthogonal_rep(shape, s) for s in all_permutations(shape.n)])
    mats.flags.writeable = False
    return mats


# --------------------------------------------------------------------------
# Action on (C^d)^{\otimes n}


def permutation_indices(sigma: Sequence[int], d: int) -> np.ndarray:
    """Index map ``idx`` with ``pi(sigma) e_x = e_{idx[x]}``."""
    sigma = Permutation(sigma)
    n = sigma.n
    axes = np.indices((d,) * n).reshape(n, -1)
    # output digit at position sigma(j) is input digit j
    out_digits = np.empty_like(axes)
    out_digits[list(sigma)] = axes
    return np.ravel_multi_index(tuple(out_digits), (d,) * n) if n else np.zeros(1, dtype=int)


def permutation_action(sigma: Sequence[int], d: int) -> np.ndarray:
    """Permutation matrix ``pi(sigma)`` on ``(C^d)^{\\otimes n}``."""
    idx = permutation_indices(sigma, d)
    mat = np.zeros((len(idx), len(idx)))
    mat[idx, np.arange(len(idx))] = 1.0
    return mat


# --------------------------------------------------------------------------
# Group register, QFT and controlled permutations


def plus_state(n: int) -> np.ndarray:
    """Uniform superposition over ``S_n`` on the group register."""
    size = math.factorial(n)
    return np.full(size, 1.0 / math.sqrt(size))


def qft_labels(n: int) -> list[tuple[Partition, int, int]]:
    """Row labels ``(lambda, i, j)`` of :func:`qft_sn` in order."""
    return [(lam, i, j) for lam in partitions(n) for i in range(sym_dim(lam)) for j in range(sym_dim(lam))]


@lru_cache(maxsize=None)
def _qft(n: int) -> np.ndarray:
    size = math.factorial(n)
    rows = []
    for lam in partitions(n):
        m = sym_dim(lam)
        g = irrep_matrices(tuple(lam))  # (sigma, row, col)
        block = math.sqrt(m / size) * np.transpose(g, (2, 1, 0))  # [i, j, sigma] = g[sigma, j, i]
        rows.append(block.reshape(m * m, size))
    out = np.vstack(rows)
    out.flags.writeable = False
    return out


def qft_sn(n: int) -> np.ndarray:
    """Quantum Fourier transform over ``S_n`` as an ``n! x n!`` real orthogonal matrix."""
    return _qft(n).copy()


def ctrl_pi(n: int, d: int) -> np.ndarray:
    """``sum_sigma |sigma><sigma| (x) pi(sigma)``; group register first."""
    return _controlled(n, d, transpose=False)


def ctrl_pi_transpose(n: int, d: int) -> np.ndarray:
    """``sum_sigma |sigma><sigma| (x) pi(sigma)^T``."""
    return _controlled(n, d, transpose=True)


def _controlled(n: int, d: int, transpose: bool) -> np.ndarray:
    perms = all_permutations(n)
    block = d**n
    out = np.zeros((len(perms) * block, len(perms) * block))
    cols = np.arange(block)
    for k, sigma in enumerate(perms):
        idx = permutation_indices(sigma.inverse() if transpose else sigma, d)
        out[k * block + idx, k * block + cols] = 1.0
    return out


def left_regular_rep(sigma: Sequence[int]) -> np.ndarray:
    """``L(sigma)|tau> = |sigma tau>`` on the group register."""
    sigma = Permutation(sigma)
    perms = all_permutations(sigma.n)
    out = np.zeros((len(perms), len(perms)))
    for k, tau in enumerate(perms):
        out[permutation_index(sigma * tau), k] = 1.0
    return out
