"""Dense quantum Schur transform, Young projectors and generalized phase estimation.

The Schur basis vector ``|lambda, u, i>`` is built from the matrix units
``E^lambda_{i1} = (m_lambda / n!) sum_sigma [g_lambda(sigma)]_{i1} pi(sigma)``:
an orthonormal basis ``{|lambda, u, 1>}`` of the range of ``E^lambda_{11}``
is fixed first and then transported, ``|lambda, u, i> = E^lambda_{i1} |lambda, u, 1>``.
This makes ``pi(sigma)`` act on the ``i`` label by exactly
:func:`~rdilation.symrep.young_orthogonal_rep`, not merely an equivalent
representation.  The basis inside the range of ``E^lambda_{11}`` is fixed by
Gram-Schmidt over computational basis columns taken in decreasing weight
order; downstream results only depend on it being a fixed orthonormal basis.

Row layout of ``SchurTransform.unitary``: partition blocks in reverse-lex
order (blocks with ``d_lambda(d) = 0`` are omitted), ``u`` major, ``i`` minor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .combinatorics import Partition, character, partitions, sym_dim, unitary_dim
from .errors import NotUnitaryError, NumericalError, SizeBudgetError
from .symrep import all_permutations, irrep_matrices, permutation_index, permutation_indices

DEFAULT_BUDGET = 4096
ORDERING_VERSION = "rdilation-schur-v1"


def intertwiner_basis(
    rep: np.ndarray, shape: Partition, multiplicity: int, candidates: Sequence[int] | None = None, tol: float = 1e-8
) -> np.ndarray:
    """Orthonormal vectors ``v[u, i]`` spanning the ``shape``-isotypic part of ``rep``.

    ``rep`` stacks the representation matrices in group-register order.
    The result has shape ``(multiplicity, m_lambda, D)`` and satisfies
    ``rep(sigma) v[u, j] = sum_i g_lambda(sigma)[i, j] v[u, i]``.
    """
    m = sym_dim(shape)
    g = irrep_matrices(tuple(shape))
    scale = m / rep.shape[0]
    e11 = scale * np.einsum("s,sab->ab", g[:, 0, 0], rep)
    dim = rep.shape[1]
    order = range(dim) if candidates is None else candidates
    slot1: list[np.ndarray] = []
    if multiplicity:
        for x in order:
            v = e11[:, x].copy()
            for _ in range(2):
                for b in slot1:
                    v -= (b @ v) * b
            nrm = np.linalg.norm(v)
            if nrm > tol:
                slot1.append(v / nrm)
                if len(slot1) == multiplicity:
                    break
    if len(slot1) != multiplicity:
        raise NumericalError(f"found {len(slot1)} multiplicity vectors for {shape}, expected {multiplicity}")
    out = np.empty((multiplicity, m, dim))
    for u, v in enumerate(slot1):
        nz = np.flatnonzero(np.abs(v) > 1e-12)
        if v[nz[0]] < 0:
            v = -v
        out[u, 0] = v
    for i in range(1, m):
        ei1 = scale * np.einsum("s,sab->ab", g[:, i, 0], rep)
        out[:, i] = out[:, 0] @ ei1.T
    return out


@dataclass(frozen=True)
class SchurTransform:
    n: int
    d: int
    unitary: np.ndarray = field(repr=False)
    labels: tuple[tuple[Partition, int, int], ...] = field(repr=False)
    blocks: dict = field(repr=False)  # lambda -> (offset, d_lambda, m_lambda)

    def row(self, shape: Sequence[int], u: int, i: int) -> int:
        offset, _, m = self.blocks[Partition(shape)]
        return offset + u * m + i

    def block_slice(self, shape: Sequence[int]) -> slice:
        offset, dl, m = self.blocks[Partition(shape)]
        return slice(offset, offset + dl * m)

    @property
    def shapes(self) -> list[Partition]:
        return list(self.blocks)


def _weight_order(n: int, d: int) -> list[int]:
    digits = np.indices((d,) * n).reshape(n, -1).T
    weights = [tuple(np.bincount(row, minlength=d)) for row in digits]
    return sorted(range(d**n), key=lambda x: (tuple(-w for w in weights[x]), x))


def permutation_stack(n: int, d: int) -> np.ndarray:
    """All ``pi(sigma)`` on ``(C^d)^{\\otimes n}`` in group-register order."""
    size = d**n
    out = np.zeros((math.factorial(n), size, size))
    cols = np.arange(size)
    for k, sigma in enumerate(all_permutations(n)):
        out[k, permutation_indices(sigma, d), cols] = 1.0
    return out


@lru_cache(maxsize=32)
def _schur(n: int, d: int) -> SchurTransform:
    rep = permutation_stack(n, d)
    order = _weight_order(n, d)
    rows, labels, blocks = [], [], {}
    offset = 0
    for lam in partitions(n):
        dl, m = unitary_dim(lam, d), sym_dim(lam)
        if dl == 0:
            continue
        vecs = intertwiner_basis(rep, lam, dl, candidates=order)
        rows.append(vecs.reshape(dl * m, -1))
        labels.extend((lam, u, i) for u in range(dl) for i in range(m))
        blocks[lam] = (offset, dl, m)
        offset += dl * m
    unitary = np.vstack(rows)
    unitary.flags.writeable = False
    return SchurTransform(n, d, unitary, tuple(labels), blocks)


def schur_transform(n: int, d: int, budget: int = DEFAULT_BUDGET) -> SchurTransform:
    """The Schur transform ``U_Sch^{(n,d)}``; rows are the Schur basis vectors."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    if d**n > budget:
        raise SizeBudgetError(f"d^n = {d**n} exceeds budget {budget}")
    return _schur(n, d)


def block_diagonal_target_pi(st: SchurTransform, sigma) -> np.ndarray:
    """``(+)_lambda 1_{d_lambda} (x) g_lambda(sigma)`` in the layout of ``st``."""
    k = permutation_index(sigma)
    out = np.zeros((st.d**st.n,) * 2)
    for lam, (offset, dl, m) in st.blocks.items():
        sl = slice(offset, offset + dl * m)
        out[sl, sl] = np.kron(np.eye(dl), irrep_matrices(tuple(lam))[k])
    return out


def young_projector_character(shape: Sequence[int], d: int) -> np.ndarray:
    """``Pi_lambda = (m_lambda / n!) sum_sigma chi_lambda(sigma) pi(sigma)``."""
    shape = Partition(shape)
    n = shape.n
    size = d**n
    out = np.zeros((size, size))
    cols = np.arange(size)
    m = sym_dim(shape)
    for sigma in all_permutations(n):
        out[permutation_indices(sigma, d), cols] += character(shape, sigma.cycle_type())
    return out * (m / math.factorial(n))


def young_projector_schur(shape: Sequence[int], d: int) -> np.ndarray:
    """``Pi_lambda = U_Sch^dagger (|lambda><lambda| (x) 1 (x) 1) U_Sch``."""
    shape = Partition(shape)
    st = schur_transform(shape.n, d)
    if shape not in st.blocks:
        return np.zeros((d**shape.n,) * 2)
    rows = st.unitary[st.block_slice(shape)]
    return rows.T @ rows


def young_projector(shape: Sequence[int], n: int, d: int, tol: float = 1e-10) -> np.ndarray:
    """Young projector onto the ``lambda``-isotypic subspace of ``(C^d)^{\\otimes n}``.

    Computed by the character average and cross-checked against the Schur
    transform block.  A partition with more than ``d`` rows yields the zero
    projector.
    """
    shape = Partition(shape)
    if shape.n != n:
        raise ValueError(f"{shape} is not a partition of {n}")
    by_char = young_projector_character(shape, d)
    by_schur = young_projector_schur(shape, d)
    gap = np.abs(by_char - by_schur).max()
    if gap > tol:
        raise NumericalError(f"Young projector constructions disagree by {gap:.3e}")
    return by_char


def _tensor_power(mat: np.ndarray, n: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=mat.dtype)
    for _ in range(n):
        out = np.kron(out, mat)
    return out


def irrep_block(mat: np.ndarray, shape: Sequence[int]) -> np.ndarray:
    """``f_lambda(X)``: the ``U_lambda`` block of ``U_Sch X^{(x)n} U_Sch^dagger`` at ``i = 0``.

    Works for any square ``X`` (the polynomial extension of ``f_lambda``).
    """
    shape = Partition(shape)
    mat = np.asarray(mat)
    d = mat.shape[0]
    st = schur_transform(shape.n, d)
    if shape not in st.blocks:
        return np.zeros((0, 0), dtype=mat.dtype)
    offset, dl, m = st.blocks[shape]
    rows = offset + np.arange(dl) * m
    u = st.unitary[rows]
    return u @ _tensor_power(mat, shape.n) @ u.T


def unitary_irrep_block(mat: np.ndarray, shape: Sequence[int], tol: float = 1e-9) -> np.ndarray:
    """``f_lambda(U)`` for a unitary ``U``."""
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise NotUnitaryError("expected a square matrix")
    gap = np.abs(mat.conj().T @ mat - np.eye(mat.shape[0])).max()
    if gap > tol:
        raise NotUnitaryError(f"input is not unitary (residual {gap:.3e})")
    return irrep_block(mat, shape)


def phase_estimation_probabilities(state: np.ndarray, n: int, d: int) -> dict[Partition, float]:
    """``Tr(Pi_lambda rho)`` for every ``lambda |- n`` (zero for too many rows)."""
    rho = np.asarray(state)
    st = schur_transform(n, d)
    out = {}
    for lam in partitions(n):
        if lam in st.blocks:
            rows = st.unitary[st.block_slice(lam)]
            out[lam] = float(np.real(np.trace(rows @ rho @ rows.T)))
        else:
            out[lam] = 0.0
    return out


def generalized_phase_estimation(state: np.ndarray, n: int, d: int, rng_seed=None, tol: float = 1e-12):
    """Measure the Young label: sample ``lambda`` and return the post-measurement state."""
    rho = np.asarray(state)
    probs = phase_estimation_probabilities(rho, n, d)
    labels = list(probs)
    weights = np.array([max(probs[lam], 0.0) for lam in labels])
    if weights.sum() < tol:
        raise NumericalError("all outcome probabilities underflow")
    rng = np.random.default_rng(rng_seed)
    lam = labels[rng.choice(len(labels), p=weights / weights.sum())]
    proj = young_projector_schur(lam, d)
    post = proj @ rho @ proj
    return lam, post / np.real(np.trace(post))
