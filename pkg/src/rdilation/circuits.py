"""End-to-end constructions: random purification channel, random dilation
superchannel (Fourier and Kronecker forms), the isometry-to-channel lift and the
random dilation supersuperchannel, plus the verification driver.

Register layout
---------------
* The group register (``n!``-dimensional, also the memory of both
  superchannel forms) comes first, then the system registers in query order.
* Every construction outputs ``E^n (x) S^n``: the ``n`` environment copies
  grouped in front of the ``n`` system copies.  Oracles produced by
  :mod:`rdilation.haar_oracle` use the interleaved tensor-power layout and are
  reordered before comparison.
* ``Choi(Xi[M])`` is laid out ``I^n, E^n, O^n``.

Channels are carried as Kraus operators; Choi matrices are only formed for
comparison.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .channels import (
    Comb,
    QuantumChannel,
    apply,
    as_rng,
    channel_power,
    comb_from_channels,
    compose,
    haar_isometry,
    identity_channel,
    kraus_rank,
    random_kraus_rank_r_channel,
    random_rank_r_state,
    tensor,
    trace_distance,
    trace_out_environment,
)
from .combinatorics import Partition, partitions, sym_dim
from .errors import DimensionMismatchError, SizeBudgetError
from .haar_oracle import comb_purification_average_oracle, dilation_average_oracle, purification_average_oracle
from .kronecker import (
    controlled_kronecker_gate,
    kronecker_transform,
    padded_layout,
    relation_kronecker_transform,
)
from .schur import schur_transform
from .symrep import ctrl_pi, ctrl_pi_transpose, plus_state, qft_sn
from .tensorops import grouped_to_interleaved, partial_trace, permute_systems, tensor_power

DEFAULT_BUDGET = 4096


def _check_budget(n: int, d: int, budget: int) -> None:
    size = d**n * math.factorial(n)
    if size > budget:
        raise SizeBudgetError(f"d^n * n! = {size} exceeds budget {budget}")


def group_offsets(n: int) -> dict[Partition, int]:
    """Offset of each ``lambda`` block in the flattened ``(lambda, i, j)`` register."""
    out, offset = {}, 0
    for lam in partitions(n):
        out[lam] = offset
        offset += sym_dim(lam) ** 2
    return out


# --------------------------------------------------------------------------
# Random purification channel


def environment_kraus(n: int, r: int) -> np.ndarray:
    """Kraus operators of the tail ``(lambda, i, j) -> (C^r)^{(x)n}``.

    For each ``lambda`` the ``i`` register is traced out and ``j`` is joined
    with a maximally mixed ``U_lambda`` register through
    ``U_Sch^{(n,r) dagger}``.  Labels with ``d_lambda(r) = 0`` are sent to
    ``|0...0>`` (they carry no weight on in-promise inputs).
    """
    st = schur_transform(n, r)
    offsets = group_offsets(n)
    size = math.factorial(n)
    ops = []
    for lam in partitions(n):
        m, q = sym_dim(lam), offsets[lam]
        if lam in st.blocks:
            off, dl, _ = st.blocks[lam]
            for i in range(m):
                for w in range(dl):
                    k = np.zeros((r**n, size))
                    k[:, q + i * m : q + (i + 1) * m] = st.unitary[off + w * m : off + (w + 1) * m].T / math.sqrt(dl)
                    ops.append(k)
        else:
            for col in range(q, q + m * m):
                k = np.zeros((r**n, size))
                k[0, col] = 1.0
                ops.append(k)
    return np.array(ops)


def _post_kraus(tail: np.ndarray, front: np.ndarray, sys_dim: int) -> np.ndarray:
    """``(K (x) 1_sys) front`` for every tail Kraus operator ``K``."""
    g = tail.shape[2]
    front = front.reshape(g, sys_dim, front.shape[1])
    out = np.einsum("keg,gsx->kesx", tail, front)
    return out.reshape(tail.shape[0], tail.shape[1] * sys_dim, -1)


def random_purification_channel(n: int, d: int, r: int, budget: int = DEFAULT_BUDGET) -> QuantumChannel:
    """``Phi : (C^d)^{(x)n} -> (C^r)^{(x)n} (x) (C^d)^{(x)n}``.

    Adjoin ``|+>`` on the group register, apply ``ctrl-pi``, the QFT over
    ``S_n`` and the environment tail.
    """
    _check_budget(n, d, budget)
    if r**n > budget:
        raise SizeBudgetError(f"r^n = {r**n} exceeds budget {budget}")
    size = d**n
    front = np.kron(qft_sn(n), np.eye(size)) @ ctrl_pi(n, d) @ np.kron(plus_state(n)[:, None], np.eye(size))
    return QuantumChannel.from_kraus(_post_kraus(environment_kraus(n, r), front, size), validate=False)


def purification_closed_form(rho: np.ndarray, n: int, r: int) -> np.ndarray:
    """``sum_lambda sum_{jj'} U^dag(lambda, pi_U, |j><j'|)U (x) U^dag(lambda, f_lambda(rho), |j><j'|)U``."""
    rho = np.asarray(rho)
    d = rho.shape[0]
    st_r, st_d = schur_transform(n, r), schur_transform(n, d)
    rotated = st_d.unitary @ tensor_power(rho, n) @ st_d.unitary.T
    out = np.zeros((r**n * d**n,) * 2, dtype=complex)
    for lam in partitions(n):
        if lam not in st_r.blocks or lam not in st_d.blocks:
            continue
        off_r, dr, m = st_r.blocks[lam]
        off_d, dd, _ = st_d.blocks[lam]
        rows_d = off_d + np.arange(dd) * m
        f_rho = rotated[np.ix_(rows_d, rows_d)]
        for j in range(m):
            for jp in range(m):
                env_rows = st_r.unitary[off_r + np.arange(dr) * m + j]
                env_cols = st_r.unitary[off_r + np.arange(dr) * m + jp]
                env = env_rows.T @ env_cols / dr
                sys = st_d.unitary[off_d + np.arange(dd) * m + j].T @ f_rho @ st_d.unitary[off_d + np.arange(dd) * m + jp]
                out += np.kron(env, sys)
    return out


# --------------------------------------------------------------------------
# Parallel superchannels


@dataclass(frozen=True)
class ParallelSuperchannel:
    """``M -> post o (id_mem (x) M) o pre`` for ``M : I^n -> O^n``.

    ``pre`` maps the outer input to ``mem (x) I^n`` and ``post`` maps
    ``mem (x) O^n`` to the outer output.
    """

    n: int
    slot_in: int
    slot_out: int
    mem_dim: int
    pre: QuantumChannel = field(repr=False)
    post: QuantumChannel = field(repr=False)
    name: str = ""

    def __post_init__(self):
        if self.pre.d_out != self.mem_dim * self.slot_in**self.n:
            raise DimensionMismatchError("pre-processing output must be mem (x) I^n")
        if self.post.d_in != self.mem_dim * self.slot_out**self.n:
            raise DimensionMismatchError("post-processing input must be mem (x) O^n")

    @property
    def outer_in(self) -> int:
        return self.pre.d_in

    @property
    def outer_out(self) -> int:
        return self.post.d_out

    def apply(self, queries: QuantumChannel) -> QuantumChannel:
        """Action on a (possibly non-product) channel ``I^n -> O^n``."""
        if (queries.d_in, queries.d_out) != (self.slot_in**self.n, self.slot_out**self.n):
            raise DimensionMismatchError(f"queries must map {self.slot_in}^{self.n} -> {self.slot_out}^{self.n}")
        queries.kraus()
        middle = tensor(identity_channel(self.mem_dim), queries)
        return compose(self.post, compose(middle, self.pre))

    def apply_power(self, channel: QuantumChannel) -> QuantumChannel:
        return self.apply(channel_power(channel, self.n))

    def validate(self, tol: float = 1e-9) -> None:
        for part in (self.pre, self.post):
            k = part.kraus()
            gap = np.abs(np.einsum("kai,kaj->ij", k.conj(), k) - np.eye(part.d_in)).max()
            if gap > tol:
                raise DimensionMismatchError(f"{self.name} has a non trace-preserving part (residual {gap:.3e})")


def _check_slots(n: int, d_in: int, d_out: int, r: int, budget: int) -> None:
    _check_budget(n, d_in * d_out, budget)
    if r**n > budget:
        raise SizeBudgetError(f"r^n = {r**n} exceeds budget {budget}")


def random_dilation_superchannel(n: int, d_in: int, d_out: int, r: int, budget: int = DEFAULT_BUDGET) -> ParallelSuperchannel:
    """Fourier form: ``ctrl-pi^T`` before the queries, ``ctrl-pi``, QFT and tail after."""
    _check_slots(n, d_in, d_out, r, budget)
    size_i, size_o = d_in**n, d_out**n
    g = math.factorial(n)
    pre = ctrl_pi_transpose(n, d_in) @ np.kron(plus_state(n)[:, None], np.eye(size_i))
    front = np.kron(qft_sn(n), np.eye(size_o)) @ ctrl_pi(n, d_out)
    post = _post_kraus(environment_kraus(n, r), front, size_o)
    return ParallelSuperchannel(
        n,
        d_in,
        d_out,
        g,
        QuantumChannel.from_kraus(pre, validate=False),
        QuantumChannel.from_kraus(post, validate=False),
        "fourier",
    )


def kronecker_pre(n: int, d_in: int) -> np.ndarray:
    """Isometry ``I^n -> mem (x) I^n`` of the Kronecker form.

    ``|mu, u, i> -> m_mu^{-1/2} sum_k |mu, i, k>_mem (x) |mu, u, k>``: the
    ``S_mu`` register moves to memory and is replaced by half of
    ``|phi^+_{S_mu}>``.
    """
    st = schur_transform(n, d_in)
    offsets = group_offsets(n)
    size = d_in**n
    out = np.zeros((math.factorial(n), size, size))
    for mu, (off, dl, m) in st.blocks.items():
        for u in range(dl):
            for i in range(m):
                col = off + u * m + i
                for k in range(m):
                    out[offsets[mu] + i * m + k, off + u * m + k, col] = 1 / math.sqrt(m)
    # computational basis on both sides
    return np.einsum("gab,bx->gax", np.einsum("ay,gab->gyb", st.unitary, out), st.unitary).reshape(-1, size)


def kronecker_post_maps(n: int, d_out: int) -> dict[Partition, np.ndarray]:
    """``A[lambda][c, e, out, mem, in]`` on Schur-basis output registers.

    For memory ``|mu, i, k>`` and output ``|nu, v, l>``: the controlled
    canonical ``CG_{mu nu}`` sends ``(k, l)`` to ``(lambda, c, x)``; then the
    inverse of the controlled relation-defined ``CG_{lambda nu}`` sends
    ``(mu, i, x)`` to ``(e, l')``.  ``c`` is the register that will be traced.
    """
    st = schur_transform(n, d_out)
    offsets = group_offsets(n)
    layout = padded_layout(n)
    canonical = controlled_kronecker_gate(n, "canonical")
    relation = controlled_kronecker_gate(n, "relation")
    size, g = d_out**n, math.factorial(n)
    maps = {lam: np.zeros((sym_dim(lam), sym_dim(lam), size, g, size)) for lam in partitions(n)}
    for nu, (off, dn, mn) in st.blocks.items():
        for mu in partitions(n):
            mm = sym_dim(mu)
            kt = kronecker_transform(mu, nu)
            for k in range(mm):
                for l in range(mn):
                    col = canonical[:, layout.index(mu, nu, k, l)]
                    for f in range(mm * mn):
                        amp = col[layout.index(mu, nu, f // mn, f % mn)]
                        if abs(amp) < 1e-15:
                            continue
                        lam, c, x = kt.labels[f]
                        rel = relation_kronecker_transform(lam, nu)
                        ml = sym_dim(lam)
                        for i in range(mm):
                            f2 = rel.row(mu, i, x)
                            back = relation[layout.index(lam, nu, f2 // mn, f2 % mn)]  # row of gate = column of gate^T
                            for e in range(ml):
                                for l2 in range(mn):
                                    amp2 = back[layout.index(lam, nu, e, l2)]
                                    if amp2 == 0:
                                        continue
                                    for v in range(dn):
                                        maps[lam][c, e, off + v * mn + l2, offsets[mu] + i * mm + k, off + v * mn + l] += amp * amp2
    return maps


def random_dilation_kronecker(n: int, d_in: int, d_out: int, r: int, budget: int = DEFAULT_BUDGET) -> ParallelSuperchannel:
    """Kronecker form built from Schur transforms, controlled Kronecker gates and ``|phi^+>``."""
    _check_slots(n, d_in, d_out, r, budget)
    st_o, st_r = schur_transform(n, d_out), schur_transform(n, r)
    size_o, g = d_out**n, math.factorial(n)
    maps = kronecker_post_maps(n, d_out)
    ops = []
    for lam in partitions(n):
        m = sym_dim(lam)
        a = maps[lam].reshape(m, m * size_o, g * size_o)
        if lam in st_r.blocks:
            off, dl, _ = st_r.blocks[lam]
            envs = [st_r.unitary[off + w * m : off + (w + 1) * m].T / math.sqrt(dl) for w in range(dl)]
        else:
            envs = []
            for e in range(m):
                env = np.zeros((r**n, m))
                env[0, e] = 1.0
                envs.append(env)
        left = [np.kron(env, st_o.unitary.T) for env in envs]
        right = np.kron(np.eye(g), st_o.unitary)
        for c in range(m):
            core = a[c] @ right
            ops.extend(lm @ core for lm in left)
    pre = kronecker_pre(n, d_in)
    return ParallelSuperchannel(
        n,
        d_in,
        d_out,
        g,
        QuantumChannel.from_kraus(pre, validate=False),
        QuantumChannel.from_kraus(np.array(ops), validate=False),
        "kronecker",
    )


def choi_io(channel: QuantumChannel) -> np.ndarray:
    return channel.choi


def xi_choi_from_phi(choi_m: np.ndarray, n: int, d_in: int, d_out: int, r: int) -> np.ndarray:
    """``Phi(J_M)`` reordered to the ``I^n, E^n, O^n`` layout of ``Choi(Xi[M])``.

    ``J_M`` (on ``I^n O^n``) is first regrouped to ``(I O)^n`` so that
    :func:`random_purification_channel` with ``d = d_in d_out`` applies.
    """
    per_copy = permute_systems(choi_m, [d_in] * n + [d_out] * n, [c + s * n for c in range(n) for s in range(2)])
    phi = random_purification_channel(n, d_in * d_out, r, budget=max(DEFAULT_BUDGET, (d_in * d_out) ** n * math.factorial(n)))
    out = apply(phi, per_copy)  # E^n (I O)^n
    dims = [r] * n + [d_in, d_out] * n
    perm = [n + 2 * c for c in range(n)] + list(range(n)) + [n + 2 * c + 1 for c in range(n)]
    return permute_systems(out, dims, perm)


# --------------------------------------------------------------------------
# Isometry-to-channel lift


def regroup_unitary(n: int, env: int, out: int) -> np.ndarray:
    """Permutation matrix taking ``E^n O^n`` to ``(E O)^n``."""
    size = (env * out) ** n
    return np.array([grouped_to_interleaved(col, n, (env, out)) for col in np.eye(size)]).T


def lift_isometry_superchannel(
    c: ParallelSuperchannel, n: int, d_in: int, d_out: int, r: int, budget: int = DEFAULT_BUDGET
) -> ParallelSuperchannel:
    """Lift ``C`` over isometry slots ``I -> E (x) O`` to ``C'`` over channel slots.

    ``C'[Lambda^{(x)n}] = E_V C[V^{(x)n}]``, obtained by running the random
    dilation superchannel inside ``C`` with the memories concatenated.
    """
    if c.n != n or c.slot_in != d_in or c.slot_out != r * d_out:
        raise DimensionMismatchError("C must have n slots of type I -> E (x) O")
    xi = random_dilation_superchannel(n, d_in, d_out, r, budget)
    pre = compose(tensor(identity_channel(c.mem_dim), xi.pre), c.pre)
    regroup = QuantumChannel.from_kraus(regroup_unitary(n, r, d_out)[None], validate=False)
    inner = compose(regroup, xi.post)
    post = compose(c.post, tensor(identity_channel(c.mem_dim), inner))
    return ParallelSuperchannel(n, d_in, d_out, c.mem_dim * xi.mem_dim, pre, post, "lifted")


def random_parallel_superchannel(
    n: int, slot_in: int, slot_out: int, outer_in: int, outer_out: int, mem_dim: int, seed=None
) -> ParallelSuperchannel:
    """Random test superchannel: isometric pre-processing, random post-processing channel."""
    rng = as_rng(seed)
    pre = haar_isometry(outer_in, mem_dim * slot_in**n, rng)
    post_in = mem_dim * slot_out**n
    rank = -(-post_in // outer_out)
    post = random_kraus_rank_r_channel(post_in, outer_out, rank, rng)
    return ParallelSuperchannel(n, slot_in, slot_out, mem_dim, QuantumChannel.from_kraus(pre, validate=False), post, "random")


def fixed_input_superchannel(psi: np.ndarray, slot_out: int) -> ParallelSuperchannel:
    """``C[V] = V psi V^dagger`` for a single query (trivial outer input)."""
    psi = np.asarray(psi, dtype=complex).reshape(-1, 1)
    pre = QuantumChannel.from_kraus(psi[None], validate=False)
    return ParallelSuperchannel(1, psi.shape[0], slot_out, 1, pre, identity_channel(slot_out), "fixed-input")


def swap_superchannel(slot_in: int, slot_out: int) -> ParallelSuperchannel:
    """Two queries with their inputs swapped beforehand."""
    swap = permute_systems(np.eye(slot_in**2), [slot_in, slot_in], [1, 0])
    pre = QuantumChannel.from_kraus(swap[None], validate=False)
    return ParallelSuperchannel(2, slot_in, slot_out, 1, pre, identity_channel(slot_out**2), "swap")


# --------------------------------------------------------------------------
# Random dilation supersuperchannel


@dataclass(frozen=True)
class AveragedComb:
    """``E[J_pur^{(x)n}]`` in the ``E^n (x) S^n`` layout, ``S = I_1 O_1 ... I_k O_k``."""

    comb: Comb
    n: int
    env_dim: int
    choi: np.ndarray = field(repr=False)

    def interleaved(self) -> np.ndarray:
        """Same operator on ``(S (x) E)^{(x)n}``."""
        sys = int(np.prod(self.comb.dims))
        n = self.n
        dims = [self.env_dim] * n + [sys] * n
        perm = [x for c in range(n) for x in (n + c, c)]
        return permute_systems(self.choi, dims, perm)


def random_dilation_supersuperchannel(
    comb: Comb, n: int, r: int | None = None, budget: int = DEFAULT_BUDGET, tol: float = 1e-9
) -> AveragedComb:
    """Apply ``Phi`` to the normalized comb Choi matrix and restore the scale ``Tr(J_C)^n``."""
    choi = np.asarray(comb.choi)
    scale = float(np.trace(choi).real)
    if r is None:
        vals = np.linalg.eigvalsh(choi)
        r = int(np.sum(vals > tol * max(1.0, scale)))
    sys = int(np.prod(comb.dims))
    phi = random_purification_channel(n, sys, r, budget)
    out = apply(phi, tensor_power(choi / scale, n)) * scale**n
    return AveragedComb(comb, n, r, out)


def random_test_comb(teeth: Sequence[tuple[int, int]], memory: Sequence[int], ranks: Sequence[int], seed=None) -> Comb:
    rng = as_rng(seed)
    mem = [1] + list(memory) + [1]
    chans = []
    for t, ((di, do), rk) in enumerate(zip(teeth, ranks), start=1):
        chans.append(random_kraus_rank_r_channel(di * mem[t - 1], do * mem[t], rk, rng))
    return comb_from_channels(chans, teeth, memory)


# --------------------------------------------------------------------------
# Verification


@dataclass
class CircuitReport:
    construction: str
    params: dict
    target: str
    residual: float
    tolerance: float
    passed: bool
    runtime_s: float
    seed: int | None
    in_promise: bool = True
    note: str = ""

    def __post_init__(self):
        self.passed = bool(self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        return asdict(self)


def _report(construction, params, target, residual, tol, start, seed, in_promise=True, note="") -> CircuitReport:
    return CircuitReport(construction, dict(params), target, float(residual), tol, True, time.perf_counter() - start, seed, in_promise, note)


def grouped_oracle(oracle: np.ndarray, n: int, env: int, sys: int) -> np.ndarray:
    """Interleaved ``(E S)^n`` to ``E^n S^n``."""
    return permute_systems(oracle, [env, sys] * n, [2 * c for c in range(n)] + [2 * c + 1 for c in range(n)])


def oracle_as_xi_layout(oracle: QuantumChannel, n: int, d_in: int, d_out: int, r: int) -> np.ndarray:
    """Oracle Choi ``I^n (E O)^n`` reordered to ``I^n E^n O^n``."""
    dims = [d_in] * n + [r, d_out] * n
    perm = list(range(n)) + [n + 2 * c for c in range(n)] + [n + 2 * c + 1 for c in range(n)]
    return permute_systems(oracle.choi, dims, perm)


def verify_purification(grid, seed: int = 0, tol: float = 1e-8, samples: int = 20) -> list[CircuitReport]:
    reports = []
    root = np.random.SeedSequence(seed)
    for (n, d, r), child in zip(grid, root.spawn(len(grid))):
        start = time.perf_counter()
        rng = np.random.default_rng(child)
        phi = random_purification_channel(n, d, r)
        worst = 0.0
        for _ in range(samples):
            rho = random_rank_r_state(d, min(r, d), rng)
            out = apply(phi, tensor_power(rho, n))
            ref = grouped_oracle(purification_average_oracle(rho, r, n), n, r, d)
            worst = max(worst, trace_distance(out, ref))
        reports.append(_report("thm1", {"n": n, "d": d, "r": r}, "purification_average_oracle", worst, tol, start, seed))
    return reports


def _xi_grid_run(construction, grid, seed, tol, samples, builder, target_fn, target_name):
    reports = []
    root = np.random.SeedSequence(seed)
    for (d_in, d_out, r, n), child in zip(grid, root.spawn(len(grid))):
        start = time.perf_counter()
        rng = np.random.default_rng(child)
        sc = builder(n, d_in, d_out, r)
        worst = 0.0
        for _ in range(samples):
            lam = random_kraus_rank_r_channel(d_in, d_out, r, rng)
            got = sc.apply_power(lam).choi
            worst = max(worst, trace_distance(got, target_fn(lam, n, d_in, d_out, r)))
        params = {"d_in": d_in, "d_out": d_out, "r": r, "n": n}
        reports.append(_report(construction, params, target_name, worst, tol, start, seed))
    return reports


def _dilation_target(lam, n, d_in, d_out, r):
    return oracle_as_xi_layout(dilation_average_oracle(lam, r, n), n, d_in, d_out, r)


def verify_dilation(grid, seed: int = 0, tol: float = 1e-8, samples: int = 20, form: str = "fourier") -> list[CircuitReport]:
    builder = random_dilation_superchannel if form == "fourier" else random_dilation_kronecker
    name = "thm2" if form == "fourier" else "thm2-kronecker"
    return _xi_grid_run(name, grid, seed, tol, samples, builder, _dilation_target, "dilation_average_oracle")


def verify_form_agreement(grid, seed: int = 0, tol: float = 1e-8, samples: int = 20) -> list[CircuitReport]:
    """Kronecker form against Fourier form on random channels and on random non-product queries."""
    reports = []
    root = np.random.SeedSequence(seed)
    for (d_in, d_out, r, n), child in zip(grid, root.spawn(len(grid))):
        start = time.perf_counter()
        rng = np.random.default_rng(child)
        fourier = random_dilation_superchannel(n, d_in, d_out, r)
        kron = random_dilation_kronecker(n, d_in, d_out, r)
        worst = 0.0
        for s in range(samples):
            if s % 2 == 0:
                queries = channel_power(random_kraus_rank_r_channel(d_in, d_out, r, rng), n)
            else:
                size_i, size_o = d_in**n, d_out**n
                queries = random_kraus_rank_r_channel(size_i, size_o, max(1, -(-size_i // size_o)), rng)
            worst = max(worst, trace_distance(fourier.apply(queries).choi, kron.apply(queries).choi))
        params = {"d_in": d_in, "d_out": d_out, "r": r, "n": n}
        reports.append(_report("fig3-vs-fig2a", params, "random_dilation_superchannel", worst, tol, start, seed,
                               note="odd samples use non-product query channels"))
    return reports


def verify_lift(grid, seed: int = 0, tol: float = 1e-8, samples: int = 10) -> list[CircuitReport]:
    reports = []
    root = np.random.SeedSequence(seed)
    for (d_in, d_out, r, n), child in zip(grid, root.spawn(len(grid))):
        start = time.perf_counter()
        rng = np.random.default_rng(child)
        worst = env_worst = 0.0
        xi = random_dilation_superchannel(n, d_in, d_out, r)
        for _ in range(samples):
            c = random_parallel_superchannel(n, d_in, r * d_out, 2, 2, 2, rng)
            lifted = lift_isometry_superchannel(c, n, d_in, d_out, r)
            lam = random_kraus_rank_r_channel(d_in, d_out, r, rng)
            got = lifted.apply_power(lam).choi
            ref = c.apply(dilation_average_oracle(lam, r, n)).choi
            worst = max(worst, trace_distance(got, ref))
            traced = trace_out_environment(xi.apply_power(lam), r**n).choi
            env_worst = max(env_worst, trace_distance(traced, channel_power(lam, n).choi))
        params = {"d_in": d_in, "d_out": d_out, "r": r, "n": n}
        reports.append(_report("thm3", params, "C applied to dilation_average_oracle", worst, tol, start, seed))
        reports.append(_report("thm3-env-trace", params, "Lambda^n", env_worst, tol, start, seed))
    return reports


def verify_supersuperchannel(grid, seed: int = 0, tol: float = 1e-7, reduction_tol: float = 1e-9) -> list[CircuitReport]:
    """``grid`` entries are ``(k, n)``; qubit slots, memory dimension 2 for ``k = 2``."""
    reports = []
    root = np.random.SeedSequence(seed)
    for (k, n), child in zip(grid, root.spawn(len(grid))):
        start = time.perf_counter()
        rng = np.random.default_rng(child)
        if k == 1:
            lam = random_kraus_rank_r_channel(2, 2, 2, rng)
            comb = comb_from_channels([lam], [(2, 2)], [])
        else:
            comb = random_test_comb([(2, 2)] * k, [2] * (k - 1), [1] + [2] * (k - 1), rng)
        avg = random_dilation_supersuperchannel(comb, n)
        oracle = comb_purification_average_oracle(comb, n, avg.env_dim)
        residual = trace_distance(avg.interleaved(), oracle)
        params = {"k": k, "n": n, "r": avg.env_dim}
        reports.append(_report("thm7", params, "comb_purification_average_oracle", residual, tol, start, seed))
        if k == 1:
            start = time.perf_counter()
            xi = random_dilation_superchannel(n, 2, 2, avg.env_dim).apply_power(lam).choi
            dims = [avg.env_dim] * n + [2, 2] * n
            perm = [n + 2 * c for c in range(n)] + list(range(n)) + [n + 2 * c + 1 for c in range(n)]
            residual = trace_distance(permute_systems(avg.choi, dims, perm), xi)
            reports.append(_report("thm7-k1-reduction", params, "random_dilation_superchannel", residual, reduction_tol, start, seed))
    return reports


PURIFICATION_GRID = [(n, d, r) for n in (1, 2, 3) for d in (1, 2, 3) for r in (1, 2)]
DILATION_GRID = [(2, 2, 1, 2), (2, 2, 2, 2), (2, 2, 2, 3), (2, 1, 2, 2)]
LIFT_GRID = [(2, 2, 2, 1), (2, 2, 2, 2)]
COMB_GRID = [(1, 1), (1, 2), (2, 1), (2, 2)]

VERIFIERS = {
    "thm1": (verify_purification, PURIFICATION_GRID),
    "thm2": (verify_dilation, DILATION_GRID),
    "thm2-kronecker": (lambda grid, **kw: verify_dilation(grid, form="kronecker", **kw), DILATION_GRID),
    "fig3-vs-fig2a": (verify_form_agreement, DILATION_GRID),
    "thm3": (verify_lift, LIFT_GRID),
    "thm7": (verify_supersuperchannel, COMB_GRID),
}


def verify(construction: str, grid=None, seed: int = 0, tol: float | None = None, **kwargs) -> list[CircuitReport]:
    """Run the comparisons for ``construction`` over ``grid`` (default grid if omitted).

    Promise violations are not raised: a channel of too high Kraus rank would
    simply be reported as out of promise.
    """
    if construction not in VERIFIERS:
        raise KeyError(f"unknown construction {construction!r}; choose from {sorted(VERIFIERS)}")
    fn, default = VERIFIERS[construction]
    if tol is not None:
        kwargs["tol"] = tol
    return fn(list(default if grid is None else grid), seed=seed, **kwargs)


def out_of_promise_residual(channel: QuantumChannel, n: int, r: int, form: str = "fourier") -> tuple[float, int]:
    """Residual against the rank-``r`` truncated oracle for a channel beyond the promise.

    No claim is attached to this number; it is reported for information.
    """
    rank = kraus_rank(channel)
    builder = random_dilation_superchannel if form == "fourier" else random_dilation_kronecker
    sc = builder(n, channel.d_in, channel.d_out, r)
    vals, vecs = np.linalg.eigh(channel.choi)
    keep = vecs[:, -r:] * vals[-r:]
    trunc = keep @ vecs[:, -r:].conj().T
    rest = partial_trace(trunc, (channel.d_in, channel.d_out), [1])
    w, u = np.linalg.eigh(rest)
    fix = np.kron((u / np.sqrt(w)) @ u.conj().T, np.eye(channel.d_out))  # restore trace preservation
    trunc = fix @ trunc @ fix.conj().T
    oracle = dilation_average_oracle(QuantumChannel(trunc, channel.d_in, channel.d_out, validate=False), r, n)
    got = sc.apply_power(channel).choi
    return trace_distance(got, oracle_as_xi_layout(oracle, n, channel.d_in, channel.d_out, r)), rank
