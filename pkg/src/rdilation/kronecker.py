"""Kronecker coefficients and the S_n Clebsch-Gordan ("Kronecker") transform.

``KroneckerTransform.unitary`` maps ``S_mu (x) S_nu`` (row-major pair
``(i_mu, i_nu)``) to ``(+)_lambda S_lambda (x) C^{g_{mu nu lambda}}`` with rows
``(lambda, i, a)``: partition blocks in reverse-lex order, ``i`` major,
``a`` minor.  Conjugating ``g_mu(sigma) (x) g_nu(sigma)`` by it gives
``(+)_lambda g_lambda(sigma) (x) 1`` with ``g_lambda`` exactly the Young
orthogonal matrices.

Two transforms exist for each pair of labels:

* the *canonical* one, built by the intertwiner method of
  :func:`rdilation.schur.intertwiner_basis`;
* the *relation* one, whose ``mu``-block is defined from the canonical
  ``CG_{mu nu}`` through the coefficient identity
  ``<i_mu, a| CG_{lambda nu} |i_lambda, i_nu> = sqrt(m_mu/m_lambda) <i_lambda, a| CG_{mu nu} |i_mu, i_nu>``.
  It is again a valid Kronecker transform (checked by
  :func:`relation_covariance_residual`) and is the version the Kronecker
  form of the random dilation superchannel needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .combinatorics import Partition, character, class_size, partitions, sym_dim
from .errors import DimensionMismatchError, LeakageError, NotApplicableError, NumericalError
from .schur import intertwiner_basis
from .symrep import irrep_matrices


def kronecker_coefficient(mu: Sequence[int], nu: Sequence[int], lam: Sequence[int]) -> int:
    """Multiplicity ``g_{mu nu lambda}`` of ``g_lambda`` inside ``g_mu (x) g_nu``."""
    mu, nu, lam = Partition(mu), Partition(nu), Partition(lam)
    if not mu.n == nu.n == lam.n:
        raise DimensionMismatchError("Kronecker coefficients need three partitions of the same n")
    return _kron_coeff(mu, nu, lam)


@lru_cache(maxsize=None)
def _kron_coeff(mu: Partition, nu: Partition, lam: Partition) -> int:
    n = mu.n
    total = sum(
        class_size(c) * character(mu, c) * character(nu, c) * character(lam, c) for c in partitions(n)
    )
    value = total / math.factorial(n)
    rounded = round(value)
    if abs(value - rounded) > 1e-6:
        raise NumericalError(f"non-integral Kronecker coefficient {value}")
    return int(rounded)


def kronecker_table(n: int) -> list[tuple[Partition, Partition, Partition, int]]:
    """All ``(mu, nu, lambda, g)`` with ``g > 0``, in global partition order."""
    parts = partitions(n)
    return [
        (mu, nu, lam, g)
        for mu in parts
        for nu in parts
        for lam in parts
        if (g := kronecker_coefficient(mu, nu, lam))
    ]


@dataclass(frozen=True)
class KroneckerTransform:
    mu: Partition
    nu: Partition
    unitary: np.ndarray = field(repr=False)
    labels: tuple[tuple[Partition, int, int], ...] = field(repr=False)
    blocks: dict = field(repr=False)  # lambda -> (offset, m_lambda, g)

    def row(self, lam: Sequence[int], i: int, a: int) -> int:
        offset, _, g = self.blocks[Partition(lam)]
        return offset + i * g + a

    def block(self, lam: Sequence[int]) -> np.ndarray:
        """Rows of the ``lambda`` block as an array ``[i, a, i_mu, i_nu]``."""
        offset, m, g = self.blocks[Partition(lam)]
        rows = self.unitary[offset : offset + m * g]
        return rows.reshape(m, g, sym_dim(self.mu), sym_dim(self.nu))


def tensor_rep(mu: Sequence[int], nu: Sequence[int]) -> np.ndarray:
    """``g_mu(sigma) (x) g_nu(sigma)`` stacked over the group register."""
    gm, gn = irrep_matrices(tuple(mu)), irrep_matrices(tuple(nu))
    return np.einsum("sab,scd->sacbd", gm, gn).reshape(gm.shape[0], gm.shape[1] * gn.shape[1], -1)


def _assemble(mu, nu, blocks_by_lam) -> KroneckerTransform:
    rows, labels, blocks = [], [], {}
    offset = 0
    for lam, arr in blocks_by_lam:  # arr[i, a, :]
        m, g = arr.shape[:2]
        rows.append(arr.reshape(m * g, -1))
        labels.extend((lam, i, a) for i in range(m) for a in range(g))
        blocks[lam] = (offset, m, g)
        offset += m * g
    unitary = np.vstack(rows)
    unitary.flags.writeable = False
    return KroneckerTransform(Partition(mu), Partition(nu), unitary, tuple(labels), blocks)


@lru_cache(maxsize=None)
def _canonical(mu: Partition, nu: Partition) -> KroneckerTransform:
    rep = tensor_rep(mu, nu)
    out = []
    for lam in partitions(mu.n):
        g = kronecker_coefficient(mu, nu, lam)
        if g:
            vecs = intertwiner_basis(rep, lam, g)  # [a, i, :]
            out.append((lam, vecs.transpose(1, 0, 2)))
    return _assemble(mu, nu, out)


def kronecker_transform(mu: Sequence[int], nu: Sequence[int]) -> KroneckerTransform:
    """Canonical Kronecker transform ``CG_{mu nu}``."""
    mu, nu = Partition(mu), Partition(nu)
    if mu.n != nu.n:
        raise DimensionMismatchError("mu and nu must partition the same n")
    return _canonical(mu, nu)


@lru_cache(maxsize=None)
def _relation(lam: Partition, nu: Partition) -> KroneckerTransform:
    ml = sym_dim(lam)
    out = []
    for mu in partitions(lam.n):
        g = kronecker_coefficient(mu, nu, lam)
        if not g:
            continue
        source = _canonical(mu, nu).block(lam)  # [j, a, i, l]
        scale = math.sqrt(sym_dim(mu) / ml)
        out.append((mu, scale * source.transpose(2, 1, 0, 3).reshape(sym_dim(mu), g, -1)))
    return _assemble(lam, nu, out)


def relation_kronecker_transform(lam: Sequence[int], nu: Sequence[int]) -> KroneckerTransform:
    """``CG_{lambda nu}`` with multiplicity bases defined through the coefficient identity.

    Its ``mu`` block is ``sqrt(m_mu / m_lambda)`` times the canonical
    ``CG_{mu nu}`` block for ``lambda`` with the ``i_mu`` and ``i_lambda``
    indices exchanged.
    """
    lam, nu = Partition(lam), Partition(nu)
    if lam.n != nu.n:
        raise DimensionMismatchError("lambda and nu must partition the same n")
    return _relation(lam, nu)


def covariance_residual(kt: KroneckerTransform) -> float:
    """``max_sigma || CG (g_mu (x) g_nu)(sigma) CG^T - (+) g_lambda(sigma) (x) 1 ||_max``."""
    rep = tensor_rep(kt.mu, kt.nu)
    size = rep.shape[1]
    worst = 0.0
    for k in range(rep.shape[0]):
        target = np.zeros((size, size))
        for lam, (offset, m, g) in kt.blocks.items():
            sl = slice(offset, offset + m * g)
            target[sl, sl] = np.kron(irrep_matrices(tuple(lam))[k], np.eye(g))
        worst = max(worst, np.abs(kt.unitary @ rep[k] @ kt.unitary.T - target).max())
    return float(worst)


def relation_covariance_residual(lam: Sequence[int], nu: Sequence[int]) -> float:
    """Unitarity and covariance residual of :func:`relation_kronecker_transform`."""
    kt = relation_kronecker_transform(lam, nu)
    u = kt.unitary
    return max(covariance_residual(kt), float(np.abs(u @ u.T - np.eye(u.shape[0])).max()))


def cg_coefficient_relation_check(lam: Sequence[int], mu: Sequence[int], nu: Sequence[int]) -> float:
    """Max deviation of the Clebsch-Gordan coefficient identity after canonicalization.

    Compares the canonical ``CG_{lambda nu}`` (its ``mu`` block) with
    ``sqrt(m_mu/m_lambda)`` times the canonical ``CG_{mu nu}`` (its ``lambda``
    block, indices bent).  The two multiplicity bases are independent
    choices, so the best orthogonal change of multiplicity basis is applied
    first (orthogonal Procrustes; for ``g = 1`` this is a single sign).  The
    relation-defined transform is also checked to be a genuine intertwiner;
    the larger of the two residuals is returned.
    """
    lam, mu, nu = Partition(lam), Partition(mu), Partition(nu)
    g = kronecker_coefficient(mu, nu, lam)
    if g == 0:
        raise NotApplicableError(f"g_{{{lam}{nu}{mu}}} = 0, the identity is vacuous")
    direct = kronecker_transform(lam, nu).block(mu)  # [i_mu, a, j, l]
    bent = relation_kronecker_transform(lam, nu).block(mu)
    a_mat = direct.transpose(1, 0, 2, 3).reshape(g, -1)
    b_mat = bent.transpose(1, 0, 2, 3).reshape(g, -1)
    left, _, right = np.linalg.svd(a_mat @ b_mat.T)
    rotation = left @ right
    fit = float(np.abs(a_mat - rotation @ b_mat).max())
    return max(fit, relation_covariance_residual(lam, nu))


# --------------------------------------------------------------------------
# Controlled Kronecker gate on padded registers


@dataclass(frozen=True)
class PaddedLayout:
    """Register layout ``label_1 (x) label_2 (x) payload_1 (x) payload_2``.

    Labels index :func:`partitions` ``(n)``; each payload register has
    dimension ``max m_lambda``.  For labels ``(alpha, beta)`` the valid
    payload subspace is ``i < m_alpha, l < m_beta``, encoded as the
    flattened index ``i * m_beta + l``.
    """

    n: int
    shapes: tuple[Partition, ...]
    width: int

    @property
    def dim(self) -> int:
        return len(self.shapes) ** 2 * self.width**2

    def index(self, alpha, beta, i: int, l: int) -> int:
        p, w = len(self.shapes), self.width
        a, b = self.shapes.index(Partition(alpha)), self.shapes.index(Partition(beta))
        return ((a * p + b) * w + i) * w + l

    def valid_mask(self) -> np.ndarray:
        mask = np.zeros(self.dim, dtype=bool)
        for alpha in self.shapes:
            for beta in self.shapes:
                for i in range(sym_dim(alpha)):
                    for l in range(sym_dim(beta)):
                        mask[self.index(alpha, beta, i, l)] = True
        return mask


def padded_layout(n: int) -> PaddedLayout:
    shapes = tuple(partitions(n))
    return PaddedLayout(n, shapes, max(sym_dim(s) for s in shapes))


@lru_cache(maxsize=None)
def _gate(n: int, variant: str) -> np.ndarray:
    layout = padded_layout(n)
    gate = np.eye(layout.dim)
    for alpha in layout.shapes:
        for beta in layout.shapes:
            kt = kronecker_transform(alpha, beta) if variant == "canonical" else relation_kronecker_transform(alpha, beta)
            mb = sym_dim(beta)
            idx = [layout.index(alpha, beta, f // mb, f % mb) for f in range(kt.unitary.shape[0])]
            gate[np.ix_(idx, idx)] = kt.unitary
    gate.flags.writeable = False
    return gate


def controlled_kronecker_gate(n: int, variant: str = "canonical") -> np.ndarray:
    """Apply ``CG_{alpha beta}`` to the payload, conditioned on the label registers.

    Output rows of the transform are written back in the same flattened
    payload encoding; the padding subspace is left untouched.  ``variant``
    selects the canonical or the relation-defined transforms.
    """
    if variant not in ("canonical", "relation"):
        raise ValueError(f"unknown variant {variant!r}")
    return _gate(n, variant)


def kronecker_leakage(state: np.ndarray, n: int) -> float:
    """Weight of ``state`` (vector or density matrix) outside the valid payload subspace."""
    state = np.asarray(state)
    bad = ~padded_layout(n).valid_mask()
    if state.ndim == 1:
        return float(np.sum(np.abs(state[bad]) ** 2))
    return float(np.real(np.trace(state[np.ix_(bad, bad)])))


def apply_controlled_kronecker(state: np.ndarray, n: int, variant: str = "canonical", check: bool = True, tol: float = 1e-10):
    """Apply the gate to a vector or density matrix, flagging padding leakage."""
    state = np.asarray(state)
    if check:
        leak = kronecker_leakage(state, n)
        if leak > tol:
            raise LeakageError(f"payload has weight {leak:.3e} on the padding subspace")
    gate = controlled_kronecker_gate(n, variant)
    if state.ndim == 1:
        return gate @ state
    return gate @ state @ gate.T
