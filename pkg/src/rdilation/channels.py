"""Quantum channel and comb calculus on dense matrices.

Conventions
-----------
* Tensor products put the first factor in the most significant position
  (``numpy.kron`` order).
* Choi matrices are unnormalized, input system first:
  ``J = sum_{ij} |i><j| (x) Lambda(|i><j|)``, so ``Tr J = d_in``.
* A dilation isometry ``V`` maps ``C^{d_in}`` to ``E (x) O`` with the
  environment first.
* Comb Choi matrices are laid out ``I_1 O_1 I_2 O_2 ... I_k O_k``.
"""

from __future__ import annotations

import logging
import string
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    CausalityError,
    DimensionMismatchError,
    FormulaAssumptionError,
    NumericalError,
    PromiseViolationError,
)
from .tensorops import max_entangled, partial_trace, permute_systems, tensor_power  # noqa: F401

log = logging.getLogger(__name__)

POSITIVITY_FLOOR = 1e-10


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _psd_sqrt(mat: np.ndarray, power: float = 0.5) -> np.ndarray:
    vals, vecs = np.linalg.eigh((mat + mat.conj().T) / 2)
    vals = np.clip(vals, 0, None)
    with np.errstate(divide="ignore"):
        scaled = np.where(vals > 1e-14, vals**power, 0.0)
    return (vecs * scaled) @ vecs.conj().T


# --------------------------------------------------------------------------
# States


class DensityOperator:
    """A validated density matrix.

    Eigenvalues down to ``-POSITIVITY_FLOOR`` are accepted, clipped to zero
    and the result renormalized.
    """

    __array_priority__ = 10

    def __init__(self, matrix, tol: float = POSITIVITY_FLOOR):
        mat = np.array(matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatchError("density operator must be a square matrix")
        if np.abs(mat - mat.conj().T).max() > tol:
            raise ValueError("density operator must be Hermitian")
        if abs(np.trace(mat) - 1) > tol:
            raise ValueError(f"density operator must have unit trace, got {np.trace(mat).real:.6g}")
        vals, vecs = np.linalg.eigh((mat + mat.conj().T) / 2)
        if vals.min() < -tol:
            raise ValueError(f"density operator is not positive (eigenvalue {vals.min():.3e})")
        if vals.min() < 0:
            log.debug("clipping eigenvalue %.3e of a density operator", vals.min())
            vals = np.clip(vals, 0, None)
            vals /= vals.sum()
            mat = (vecs * vals) @ vecs.conj().T
        self.matrix = mat
        self.matrix.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self):
        return f"DensityOperator(dim={self.dim})"


def canonical_purification(rho, r: int, tol: float = 1e-10) -> np.ndarray:
    """Canonical purification ``|rho_0>`` in ``C^r (x) C^d`` (environment first).

    Eigenvalues are taken in descending order and each eigenvector's first
    non-negligible component is made real positive.
    """
    rho = np.asarray(rho)
    d = rho.shape[0]
    vals, vecs = np.linalg.eigh((rho + rho.conj().T) / 2)
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    scale = max(abs(np.trace(rho)), 1.0)
    rank = int(np.sum(vals > tol * scale))
    if rank > r:
        raise PromiseViolationError(f"rank {rank} exceeds the promised bound {r}")
    out = np.zeros((r, d), dtype=complex)
    for k in range(rank):
        v = vecs[:, k]
        lead = v[np.flatnonzero(np.abs(v) > 1e-8)[0]]
        out[k] = np.sqrt(vals[k]) * v * (abs(lead) / lead)
    return out.reshape(-1)


# --------------------------------------------------------------------------
# Channels


class QuantumChannel:
    """A CPTP map ``L(C^{d_in}) -> L(C^{d_out})`` stored by its Choi matrix.

    Channels built with :meth:`from_kraus` keep their Kraus operators and
    only materialize the Choi matrix when asked, which keeps large
    constructions affordable.
    """

    def __init__(self, choi, d_in: int, d_out: int, validate: bool = True, tol: float = 1e-9):
        choi = np.asarray(choi, dtype=complex)
        if choi.shape != (d_in * d_out,) * 2:
            raise DimensionMismatchError(f"Choi matrix shape {choi.shape} does not match {d_in}x{d_out}")
        self.d_in, self.d_out = int(d_in), int(d_out)
        self._choi = choi
        self._kraus = None
        if validate:
            self.validate(tol)

    @classmethod
    def from_kraus(cls, kraus: Sequence[np.ndarray], validate: bool = True, tol: float = 1e-9) -> "QuantumChannel":
        kraus = np.asarray(kraus, dtype=complex)
        if kraus.ndim == 2:
            kraus = kraus[None]
        obj = cls.__new__(cls)
        obj.d_out, obj.d_in = kraus.shape[1], kraus.shape[2]
        obj._kraus = kraus
        obj._choi = None
        if validate:
            gap = np.abs(np.einsum("kai,kaj->ij", kraus.conj(), kraus) - np.eye(obj.d_in)).max()
            if gap > tol:
                raise NumericalError(f"Kraus operators are not trace preserving (residual {gap:.3e})")
        return obj

    @classmethod
    def from_isometry(cls, iso: np.ndarray) -> "QuantumChannel":
        return cls.from_kraus(np.asarray(iso)[None])

    @property
    def choi(self) -> np.ndarray:
        if self._choi is None:
            vecs = self._kraus.transpose(0, 2, 1).reshape(len(self._kraus), -1)  # [k, (i, o)]
            self._choi = vecs.T @ vecs.conj()
        return self._choi

    def kraus(self, tol: float = 1e-12) -> np.ndarray:
        if self._kraus is not None:
            return self._kraus
        vals, vecs = np.linalg.eigh(self.choi)
        order = np.argsort(vals)[::-1]
        keep = [k for k in order if vals[k] > tol]
        ops = [np.sqrt(vals[k]) * vecs[:, k].reshape(self.d_in, self.d_out).T for k in keep]
        self._kraus = np.array(ops) if ops else np.zeros((1, self.d_out, self.d_in), dtype=complex)
        return self._kraus

    def has_kraus(self) -> bool:
        return self._kraus is not None

    def validate(self, tol: float = 1e-9) -> None:
        choi = self.choi
        if np.abs(choi - choi.conj().T).max() > tol:
            raise NumericalError("Choi matrix is not Hermitian")
        low = np.linalg.eigvalsh((choi + choi.conj().T) / 2).min()
        if low < -tol:
            raise NumericalError(f"Choi matrix is not positive (eigenvalue {low:.3e})")
        gap = np.abs(partial_trace(choi, (self.d_in, self.d_out), [1]) - np.eye(self.d_in)).max()
        if gap > tol:
            raise NumericalError(f"channel is not trace preserving (residual {gap:.3e})")

    def __call__(self, rho):
        return apply(self, rho)

    def __repr__(self):
        return f"QuantumChannel(d_in={self.d_in}, d_out={self.d_out})"


def identity_channel(d: int) -> QuantumChannel:
    return QuantumChannel.from_kraus(np.eye(d)[None])


def unitary_channel(u: np.ndarray) -> QuantumChannel:
    return QuantumChannel.from_kraus(np.asarray(u)[None])


def apply(channel: QuantumChannel, rho) -> np.ndarray:
    """``Lambda(rho)``; uses Kraus operators when available, else Choi contraction."""
    rho = np.asarray(rho)
    if rho.shape != (channel.d_in, channel.d_in):
        raise DimensionMismatchError(f"input of shape {rho.shape} for a channel with d_in={channel.d_in}")
    if channel.has_kraus():
        k = channel.kraus()
        left = (k @ rho).transpose(1, 0, 2).reshape(channel.d_out, -1)  # [a, (k, j)]
        right = k.conj().transpose(0, 2, 1).reshape(-1, channel.d_out)  # [(k, j), b]
        return left @ right
    choi = channel.choi.reshape(channel.d_in, channel.d_out, channel.d_in, channel.d_out)
    return np.einsum("ij,iajb->ab", rho, choi)


def apply_map(choi: np.ndarray, d_in: int, d_out: int, x: np.ndarray) -> np.ndarray:
    """Apply the linear map with Choi matrix ``choi`` (no CPTP assumption)."""
    tensor = np.asarray(choi).reshape(d_in, d_out, d_in, d_out)
    return np.einsum("ij,iajb->ab", np.asarray(x), tensor)


def compose(second: QuantumChannel, first: QuantumChannel) -> QuantumChannel:
    """``second o first``."""
    if first.d_out != second.d_in:
        raise DimensionMismatchError(f"cannot feed d_out={first.d_out} into d_in={second.d_in}")
    if first.has_kraus() and second.has_kraus():
        ops = np.einsum("kab,lbc->klac", second.kraus(), first.kraus())
        return QuantumChannel.from_kraus(ops.reshape(-1, second.d_out, first.d_in), validate=False)
    choi, _ = link_product(
        first.choi, [("in", first.d_in), ("mid", first.d_out)], second.choi, [("mid", second.d_in), ("out", second.d_out)]
    )
    return QuantumChannel(choi, first.d_in, second.d_out, validate=False)


def tensor(*channels: QuantumChannel) -> QuantumChannel:
    """Tensor product channel, factors in the given order."""
    if all(c.has_kraus() for c in channels):
        ops = np.ones((1, 1, 1), dtype=complex)
        for c in channels:
            k = c.kraus()
            ops = np.einsum("xab,ycd->xyacbd", ops, k).reshape(
                ops.shape[0] * k.shape[0], ops.shape[1] * k.shape[1], ops.shape[2] * k.shape[2]
            )
        return QuantumChannel.from_kraus(ops, validate=False)
    choi = np.ones((1, 1), dtype=complex)
    d_in = d_out = 1
    for c in channels:
        choi = np.kron(choi, c.choi)
        dims = (d_in, d_out, c.d_in, c.d_out)
        choi = permute_systems(choi, dims, (0, 2, 1, 3))
        d_in, d_out = d_in * c.d_in, d_out * c.d_out
    return QuantumChannel(choi, d_in, d_out, validate=False)


def channel_power(channel: QuantumChannel, n: int) -> QuantumChannel:
    return tensor(*([channel] * n))


def kraus_rank(channel: QuantumChannel, tol: float = 1e-9) -> int:
    vals = np.linalg.eigvalsh(channel.choi)
    return int(np.sum(vals > tol * max(1.0, vals.max())))


@dataclass(frozen=True)
class Isometry:
    """``V : C^{d_in} -> C^{env} (x) C^{d_out}`` with orthonormal columns."""

    matrix: np.ndarray = field(repr=False)
    env_dim: int
    d_out: int

    def __post_init__(self):
        v = self.matrix
        if v.shape[0] != self.env_dim * self.d_out:
            raise DimensionMismatchError("isometry rows must equal env_dim * d_out")
        gap = np.abs(v.conj().T @ v - np.eye(v.shape[1])).max()
        if gap > 1e-9:
            raise NumericalError(f"columns are not orthonormal (residual {gap:.3e})")

    @property
    def d_in(self) -> int:
        return self.matrix.shape[1]

    def channel(self) -> QuantumChannel:
        """The isometry channel ``V . V^dagger`` with output ``E (x) O``."""
        return QuantumChannel.from_isometry(self.matrix)

    def choi_vector(self) -> np.ndarray:
        """``|V>> = (1 (x) V)|1>>`` on ``I (x) E (x) O``."""
        return self.matrix.T.reshape(-1)


def choi_purification_to_isometry(channel: QuantumChannel, r: int, tol: float = 1e-9) -> Isometry:
    """Canonical Stinespring dilation with environment dimension ``r``.

    Built from the canonical purification of the Choi matrix: its Choi
    vector ``|V>>`` satisfies ``Tr_E |V>><<V| = J_Lambda``.
    """
    rank = kraus_rank(channel, tol)
    if rank > r:
        raise PromiseViolationError(f"Kraus rank {rank} exceeds the promised bound {r}")
    vec = canonical_purification(channel.choi, r, tol=tol / max(1, channel.d_in))  # [e, (i, o)]
    tensor3 = vec.reshape(r, channel.d_in, channel.d_out)
    matrix = tensor3.transpose(0, 2, 1).reshape(r * channel.d_out, channel.d_in)
    return Isometry(matrix, r, channel.d_out)


def trace_out_environment(channel: QuantumChannel, env_dim: int) -> QuantumChannel:
    """Compose with ``Tr_E`` where the output is ``E (x) O``."""
    d_out = channel.d_out // env_dim
    choi = partial_trace(channel.choi, (channel.d_in, env_dim, d_out), [1])
    return QuantumChannel(choi, channel.d_in, d_out, validate=False)


# --------------------------------------------------------------------------
# Adjoint and Petz recovery


def adjoint_channel(channel: QuantumChannel) -> QuantumChannel:
    """Hilbert-Schmidt adjoint ``Lambda^dagger`` (unital, generally not trace preserving)."""
    choi = channel.choi
    swapped = permute_systems(choi.T, (channel.d_in, channel.d_out), (1, 0))
    return QuantumChannel(swapped, channel.d_out, channel.d_in, validate=False)


def petz_general(channel: QuantumChannel, reference=None) -> QuantumChannel:
    """Petz map ``sigma^1/2 Lambda^dagger(Lambda(sigma)^-1/2 . Lambda(sigma)^-1/2) sigma^1/2``.

    Evaluated directly on a matrix-unit basis; ``reference`` defaults to the
    maximally mixed state.
    """
    d_in, d_out = channel.d_in, channel.d_out
    sigma = np.eye(d_in) / d_in if reference is None else np.asarray(reference)
    root = _psd_sqrt(sigma)
    inv_root = _psd_sqrt(apply(channel, sigma), -0.5)
    adj = adjoint_channel(channel)
    choi = np.zeros((d_out * d_in,) * 2, dtype=complex)
    for a in range(d_out):
        for b in range(d_out):
            unit = np.zeros((d_out, d_out))
            unit[a, b] = 1.0
            inner = inv_root @ unit @ inv_root
            out = root @ apply_map(adj.choi, d_out, d_in, inner) @ root
            choi[a * d_in : (a + 1) * d_in, b * d_in : (b + 1) * d_in] = out
    return QuantumChannel(choi, d_out, d_in, validate=False)


def petz_recovery(channel: QuantumChannel, tol: float = 1e-9) -> QuantumChannel:
    """Petz recovery map for the maximally mixed reference, via ``(1/r) Lambda^dagger``.

    Requires ``d_in = r d_out`` with Kraus rank at most ``r`` and
    ``Lambda(pi_in) = pi_out``.  The result is checked against
    :func:`petz_general` and for CPTP.
    """
    d_in, d_out = channel.d_in, channel.d_out
    if d_in % d_out:
        raise FormulaAssumptionError("d_in must be a multiple of d_out", float(d_in % d_out))
    r = d_in // d_out
    rank = kraus_rank(channel, tol)
    if rank > r:
        raise PromiseViolationError(f"Kraus rank {rank} exceeds d_in/d_out = {r}")
    image = apply(channel, np.eye(d_in) / d_in)
    gap = float(np.abs(image - np.eye(d_out) / d_out).max())
    if gap > tol:
        raise FormulaAssumptionError("Lambda(pi_in) differs from pi_out", gap)
    special = QuantumChannel(adjoint_channel(channel).choi / r, d_out, d_in, validate=False)
    general = petz_general(channel)
    diff = float(np.abs(special.choi - general.choi).max())
    if diff > tol:
        raise NumericalError(f"(1/r) Lambda^dagger and the Petz formula disagree by {diff:.3e}")
    special.validate(tol)
    return special


# --------------------------------------------------------------------------
# Link product and combs


def link_product(a, a_systems, b, b_systems):
    """Link product ``A * B`` over the systems whose labels appear in both.

    ``a_systems`` and ``b_systems`` are sequences of ``(label, dim)`` in the
    tensor order of each matrix.  Returns ``(matrix, systems)`` where the
    output systems are A's unshared ones followed by B's unshared ones.
    """
    a_lab = [s for s, _ in a_systems]
    b_lab = [s for s, _ in b_systems]
    dims = {}
    for lab, dim in list(a_systems) + list(b_systems):
        if dims.setdefault(lab, dim) != dim:
            raise DimensionMismatchError(f"system {lab!r} has dimensions {dims[lab]} and {dim}")
    shared = [s for s in a_lab if s in b_lab]
    letters = iter(string.ascii_letters)
    row = {lab: next(letters) for lab in dims}
    col = {lab: next(letters) for lab in dims}
    a_t = np.asarray(a).reshape([dims[s] for s in a_lab] * 2)
    b_t = np.asarray(b).reshape([dims[s] for s in b_lab] * 2)
    out_lab = [s for s in a_lab if s not in shared] + [s for s in b_lab if s not in shared]
    spec = (
        "".join(row[s] for s in a_lab)
        + "".join(col[s] for s in a_lab)
        + ","
        + "".join(row[s] for s in b_lab)
        + "".join(col[s] for s in b_lab)
        + "->"
        + "".join(row[s] for s in out_lab)
        + "".join(col[s] for s in out_lab)
    )
    result = np.einsum(spec, a_t, b_t, optimize=True)
    size = int(np.prod([dims[s] for s in out_lab]))
    return result.reshape(size, size), [(s, dims[s]) for s in out_lab]


@dataclass(frozen=True)
class Comb:
    """A ``k``-comb: Choi matrix on ``I_1 O_1 ... I_k O_k``."""

    teeth: tuple[tuple[int, int], ...]
    choi: np.ndarray = field(repr=False)

    @property
    def k(self) -> int:
        return len(self.teeth)

    @property
    def dims(self) -> list[int]:
        return [x for pair in self.teeth for x in pair]

    def systems(self) -> list[tuple[str, int]]:
        out = []
        for t, (di, do) in enumerate(self.teeth, start=1):
            out += [(f"I{t}", di), (f"O{t}", do)]
        return out


def reduced_combs(comb: Comb) -> list[np.ndarray]:
    """``[J^(1), ..., J^(k)]`` with ``Tr_{O_t} J^(t) = 1_{I_t} (x) J^(t-1)`` when causal."""
    out = [np.asarray(comb.choi)]
    dims = comb.dims
    for t in range(comb.k, 1, -1):
        cur = out[0]
        d = dims[: 2 * t]
        no_out = partial_trace(cur, d, [2 * t - 1])
        out.insert(0, partial_trace(no_out, d[:-1], [2 * t - 2]) / d[2 * t - 2])
    return out


def validate_comb(comb: Comb, tol: float = 1e-8) -> None:
    """Check positivity and the recursive causality conditions; raise :class:`CausalityError`."""
    choi = np.asarray(comb.choi)
    low = np.linalg.eigvalsh((choi + choi.conj().T) / 2).min()
    if low < -tol:
        raise CausalityError(comb.k, -low)
    dims = comb.dims
    reduced = reduced_combs(comb)
    for t in range(comb.k, 0, -1):
        cur = reduced[t - 1]
        d = dims[: 2 * t]
        no_out = partial_trace(cur, d, [2 * t - 1])
        prev = reduced[t - 2] if t > 1 else np.ones((1, 1))
        expected = np.kron(prev, np.eye(d[2 * t - 2]))
        gap = float(np.abs(no_out - expected).max())
        if gap > tol:
            raise CausalityError(t, gap)


def is_valid_comb(comb: Comb, tol: float = 1e-8) -> bool:
    try:
        validate_comb(comb, tol)
    except CausalityError:
        return False
    return True


def comb_from_channels(channels: Sequence[QuantumChannel], teeth: Sequence[tuple[int, int]], memory: Sequence[int]) -> Comb:
    """Comb of teeth ``Lambda_t : I_t (x) A_{t-1} -> O_t (x) A_t`` joined over the memories.

    ``memory`` lists ``dim A_1 ... dim A_{k-1}``; ``A_0`` and ``A_k`` are trivial.
    """
    k = len(teeth)
    if len(channels) != k or len(memory) != k - 1:
        raise DimensionMismatchError("need k channels and k-1 memory dimensions")
    mem = [1] + list(memory) + [1]
    acc, acc_sys = np.ones((1, 1)), []
    for t, (chan, (di, do)) in enumerate(zip(channels, teeth), start=1):
        if chan.d_in != di * mem[t - 1] or chan.d_out != do * mem[t]:
            raise DimensionMismatchError(f"tooth {t} has dimensions {chan.d_in}->{chan.d_out}")
        systems = [(f"I{t}", di), (f"A{t - 1}", mem[t - 1]), (f"O{t}", do), (f"A{t}", mem[t])]
        acc, acc_sys = link_product(acc, acc_sys, chan.choi, systems)
    labels = [s for s, _ in acc_sys]
    dims = [d for _, d in acc_sys]
    order = [labels.index(f"{p}{t}") for t in range(1, k + 1) for p in "IO"]
    rest = [j for j in range(len(labels)) if j not in order]  # trivial A_0, A_k
    choi = permute_systems(acc, dims, order + rest)
    return Comb(tuple((int(a), int(b)) for a, b in teeth), choi)


def comb_apply(comb: Comb, channels: Sequence[QuantumChannel]) -> QuantumChannel:
    """Plug ``Phi_t : O_t -> I_{t+1}`` into the comb; returns the channel ``I_1 -> O_k``."""
    if len(channels) != comb.k - 1:
        raise DimensionMismatchError(f"a {comb.k}-comb takes {comb.k - 1} channels")
    acc, acc_sys = comb.choi, comb.systems()
    for t, chan in enumerate(channels, start=1):
        acc, acc_sys = link_product(acc, acc_sys, chan.choi, [(f"O{t}", chan.d_in), (f"I{t + 1}", chan.d_out)])
    d_in, d_out = comb.teeth[0][0], comb.teeth[-1][1]
    return QuantumChannel(acc, d_in, d_out, validate=False)


@dataclass(frozen=True)
class CombPurification:
    """A purified comb: isometric teeth ``V_t : I_t (x) B_{t-1} -> O_t (x) B_t``.

    ``vector`` is the pure Choi vector on ``I_1 O_1 ... I_k E O_k``
    (environment just before the last output); ``B_k = E``.
    """

    comb: Comb
    vector: np.ndarray = field(repr=False)
    teeth: tuple[np.ndarray, ...] = field(repr=False)
    memory: tuple[int, ...]
    env_dim: int

    def traced(self) -> np.ndarray:
        """``Tr_E`` of the purified Choi matrix."""
        dims = self.comb.dims[:-1] + [self.env_dim, self.comb.teeth[-1][1] // self.env_dim]
        return partial_trace(self.comb.choi, dims, [len(dims) - 2])


def comb_purify(comb: Comb, r: int | None = None, tol: float = 1e-9) -> CombPurification:
    """Purify a comb and split the purification into isometric teeth.

    The Choi matrix is purified canonically with environment dimension ``r``
    (default: its rank), and each tooth is recovered by matching the
    purification of ``J^(t)`` against ``|P_{t-1}> (x) |1>>_{I_t}``.
    """
    validate_comb(comb)
    reduced = reduced_combs(comb)
    dims = comb.dims
    rank = int(np.sum(np.linalg.eigvalsh(comb.choi) > tol * max(1.0, np.trace(comb.choi).real)))
    r = rank if r is None else r
    purifications, memory = [np.ones((1, 1))], [1]
    for t in range(1, comb.k + 1):
        mat = reduced[t - 1]
        if t < comb.k:
            b = int(np.sum(np.linalg.eigvalsh(mat) > tol * max(1.0, np.trace(mat).real)))
        else:
            b = r
        vec = canonical_purification(mat, b, tol=tol / max(1.0, np.trace(mat).real))
        purifications.append(vec.reshape(b, -1).T)  # [sys, b]
        memory.append(b)
    teeth = []
    for t in range(1, comb.k + 1):
        di, do = dims[2 * t - 2], dims[2 * t - 1]
        prev, cur = purifications[t - 1], purifications[t]
        bp, bc = memory[t - 1], memory[t]
        ref = np.einsum("ab,ij->aijb", prev, np.eye(di)).reshape(prev.shape[0] * di, di * bp)
        target = cur.reshape(prev.shape[0] * di, do * bc)
        vt = np.linalg.pinv(ref) @ target  # [(i', b_prev), (o, b)]
        if np.abs(ref @ vt - target).max() > 1e-7:
            raise NumericalError(f"tooth {t} could not be recovered from the purification")
        teeth.append(vt.T)
    full = permute_systems(
        purifications[-1].reshape(-1), dims + [r], list(range(2 * comb.k - 1)) + [2 * comb.k, 2 * comb.k - 1]
    )
    teeth_dims = list(comb.teeth[:-1]) + [(comb.teeth[-1][0], r * comb.teeth[-1][1])]
    pure = Comb(tuple(teeth_dims), np.outer(full, full.conj()))
    return CombPurification(pure, full, tuple(teeth), tuple(memory[1:-1]), r)


def teeth_comb(purified: CombPurification) -> np.ndarray:
    """Link the teeth isometries back into a Choi matrix on ``I_1 O_1 ... I_k O_k B_k``."""
    acc, acc_sys = np.ones((1, 1)), []
    mem = [1] + list(purified.memory) + [purified.env_dim]
    for t, v in enumerate(purified.teeth, start=1):
        di, do = purified.comb.teeth[t - 1][0], (purified.comb.teeth[t - 1][1] if t < len(purified.teeth) else purified.comb.teeth[-1][1] // purified.env_dim)
        vec = v.T.reshape(-1)  # Choi vector on (I_t, B_{t-1}, O_t, B_t)
        systems = [(f"I{t}", di), (f"B{t - 1}", mem[t - 1]), (f"O{t}", do), (f"B{t}", mem[t])]
        acc, acc_sys = link_product(acc, acc_sys, np.outer(vec, vec.conj()), systems)
    labels = [s for s, _ in acc_sys]
    dims = [d for _, d in acc_sys]
    k = len(purified.teeth)
    order = [labels.index(f"{p}{t}") for t in range(1, k + 1) for p in "IO"] + [labels.index(f"B{k}")]
    rest = [j for j in range(len(labels)) if j not in order]
    return permute_systems(acc, dims, order + rest)


# --------------------------------------------------------------------------
# Samplers


def haar_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-random unitary: Ginibre matrix, QR, diagonal phases of ``R`` removed."""
    rng = as_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def haar_isometry(d_in: int, d_out: int, seed=None) -> np.ndarray:
    if d_out < d_in:
        raise ValueError(f"no isometry from dimension {d_in} into {d_out}")
    return haar_unitary(d_out, seed)[:, :d_in]


def random_rank_r_state(d: int, r: int, seed=None) -> np.ndarray:
    """``Tr_{C^r} |psi><psi|`` for a Haar vector ``psi`` in ``C^d (x) C^r``."""
    if not 1 <= r <= d:
        raise ValueError(f"rank {r} is invalid for dimension {d}")
    rng = as_rng(seed)
    psi = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    psi /= np.linalg.norm(psi)
    return psi @ psi.conj().T


def random_kraus_rank_r_channel(d_in: int, d_out: int, r: int, seed=None) -> QuantumChannel:
    """``Tr_E (V . V^dagger)`` for a Haar isometry ``V : C^{d_in} -> C^r (x) C^{d_out}``."""
    if r < 1 or r * d_out < d_in or r > d_in * d_out:
        raise ValueError(f"Kraus rank {r} is invalid for a {d_in}->{d_out} channel")
    v = haar_isometry(d_in, r * d_out, seed)
    return QuantumChannel.from_kraus(v.reshape(r, d_out, d_in))


# --------------------------------------------------------------------------
# Distances


def trace_distance(rho, sigma) -> float:
    """``(1/2) || rho - sigma ||_1``."""
    diff = np.asarray(rho) - np.asarray(sigma)
    if diff.ndim != 2 or diff.shape[0] != diff.shape[1]:
        raise DimensionMismatchError("trace distance needs square matrices of equal size")
    return 0.5 * float(np.sum(np.linalg.svd(diff, compute_uv=False)))


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``."""
    root = _psd_sqrt(np.asarray(rho))
    inner = root @ np.asarray(sigma) @ root
    vals = np.clip(np.linalg.eigvalsh((inner + inner.conj().T) / 2), 0, None)
    return float(np.sum(np.sqrt(vals)) ** 2)
