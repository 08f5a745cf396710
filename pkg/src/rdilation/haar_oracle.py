"""Exact and Monte Carlo Haar averages, independent of the Schur machinery.

Permutation operators are generated here directly from ``numpy`` axis
transpositions and the Weingarten matrix is the pseudo-inverse of their Gram
matrix, so nothing in this module shares code with the representation-theory
constructions it is used to check.

Output layouts follow the natural tensor-power order: ``n`` copies of
``C^r (x) C^d`` interleaved, environment first in each copy.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .channels import (
    QuantumChannel,
    canonical_purification,
    choi_purification_to_isometry,
    comb_purify,
    teeth_comb,
)
from .errors import DimensionMismatchError, SizeBudgetError
from .tensorops import grouped_to_interleaved, interleaved_to_grouped, permute_systems

MAX_N = 5
PINV_CUTOFF = 1e-10


def _cycle_type(perm: tuple[int, ...]) -> tuple[int, ...]:
    seen, lengths = set(), []
    for start in range(len(perm)):
        if start in seen:
            continue
        length, j = 0, start
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


def permutation_operators(n: int, d: int) -> np.ndarray:
    """Operators permuting ``n`` tensor factors of ``C^d``, stacked, shape ``(n!, d^n, d^n)``."""
    size = d**n
    basis = np.eye(size).reshape((d,) * n + (size,))
    ops = []
    for perm in itertools.permutations(range(n)):
        ops.append(np.transpose(basis, list(perm) + [n]).reshape(size, size))
    return np.array(ops)


@dataclass(frozen=True)
class WeingartenTable:
    """Weingarten data for ``U(d)`` acting on ``n`` tensor factors.

    ``matrix[s, t]`` is ``Wg(s t^-1)``, the pseudo-inverse of ``gram``; ``values``
    maps cycle types to ``Wg``.
    """

    n: int
    d: int
    perms: tuple[tuple[int, ...], ...] = field(repr=False)
    operators: np.ndarray = field(repr=False)
    gram: np.ndarray = field(repr=False)
    matrix: np.ndarray = field(repr=False)
    values: dict = field(repr=False)

    def value(self, cycle_type) -> float:
        return self.values[tuple(cycle_type)]


@lru_cache(maxsize=32)
def weingarten_table(n: int, d: int, max_n: int = MAX_N) -> WeingartenTable:
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    if n > max_n:
        raise SizeBudgetError(f"n = {n} exceeds the Weingarten bound {max_n}")
    perms = tuple(itertools.permutations(range(n)))
    ops = permutation_operators(n, d)
    flat = ops.reshape(len(perms), -1)
    gram = flat @ flat.T  # Tr(P_s^T P_t) = d^{#cycles}
    matrix = np.linalg.pinv(gram, rcond=PINV_CUTOFF, hermitian=True)
    identity = perms.index(tuple(range(n)))
    values = {}
    for k, p in enumerate(perms):
        values.setdefault(_cycle_type(p), float(matrix[k, identity]))
    for arr in (ops, gram, matrix):
        arr.flags.writeable = False
    return WeingartenTable(n, d, perms, ops, gram, matrix, values)


def weingarten_closed_form_n2(d: int) -> dict:
    """``Wg`` for two factors: ``1/(d^2-1)`` and ``-1/(d(d^2-1))`` (``d >= 2``)."""
    return {(1, 1): 1.0 / (d * d - 1), (2,): -1.0 / (d * (d * d - 1))}


def twirl_exact(x: np.ndarray, n: int, d: int) -> np.ndarray:
    """``E_U [U^{(x)n} X U^{dagger (x)n}]`` as the projection onto the permutation span."""
    x = np.asarray(x)
    if x.shape != (d**n, d**n):
        raise DimensionMismatchError(f"expected a {d**n}x{d**n} matrix, got {x.shape}")
    return partial_twirl(x, n, d, 1)


def partial_twirl(x: np.ndarray, n: int, d: int, rest: int) -> np.ndarray:
    """Twirl the leading ``(C^d)^{(x)n}`` factor of an operator on ``(C^d)^{(x)n} (x) C^rest``."""
    table = weingarten_table(n, d)
    size = d**n
    x = np.asarray(x)
    if x.shape != (size * rest, size * rest):
        raise DimensionMismatchError(f"expected a {size * rest}-dimensional operator, got {x.shape}")
    blocks = x.reshape(size, rest, size, rest)
    # coeff[t] = Tr_1[(P_t^T (x) 1) X]
    coeff = np.einsum("tab,aibj->tij", table.operators, blocks, optimize=True)
    mixed = np.einsum("st,tij->sij", table.matrix, coeff)
    out = np.einsum("sab,sij->aibj", table.operators, mixed, optimize=True)
    return out.reshape(size * rest, size * rest)


def twirl_factors(x: np.ndarray, n: int, dims: tuple[int, ...], which: int) -> np.ndarray:
    """Twirl factor ``which`` of each copy in an interleaved ``n``-copy operator."""
    grouped = interleaved_to_grouped(x, n, dims)
    k = len(dims)
    order = [which] + [f for f in range(k) if f != which]
    moved_dims = [dims[f] for f in range(k) for _ in range(n)]
    perm = [f * n + c for f in order for c in range(n)]
    front = permute_systems(grouped, moved_dims, perm)
    rest = int(np.prod([dims[f] for f in order[1:]])) ** n
    twirled = partial_twirl(front, n, dims[which], rest)
    inv = [0] * len(perm)
    for pos, p in enumerate(perm):
        inv[p] = pos
    back = permute_systems(twirled, [moved_dims[p] for p in perm], inv)
    return grouped_to_interleaved(back, n, dims)


def purification_average_oracle(rho: np.ndarray, r: int, n: int) -> np.ndarray:
    """``E_{psi ~ Pur(rho)} [psi^{(x)n}]`` on ``(C^r (x) C^d)^{(x)n}`` (interleaved)."""
    rho = np.asarray(rho)
    d = rho.shape[0]
    vec = canonical_purification(rho, r)
    state = np.outer(vec, vec.conj())
    full = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        full = np.kron(full, state)
    return twirl_factors(full, n, (r, d), 0)


def dilation_average_oracle(channel: QuantumChannel, r: int, n: int) -> QuantumChannel:
    """``E_{V ~ Dil(Lambda)} [V^{(x)n}]`` as a channel ``I^n -> (E (x) O)^n``.

    The Choi matrix of the canonical ``V_0^{(x)n}`` is twirled over ``U(r)``
    on its ``n`` environment factors.
    """
    iso = choi_purification_to_isometry(channel, r)
    d_in, d_out = channel.d_in, channel.d_out
    vec = iso.choi_vector()  # I, E, O
    pure = np.outer(vec, vec.conj())
    full = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        full = np.kron(full, pure)
    twirled = twirl_factors(full, n, (d_in, r, d_out), 1)
    # (I E O)^n -> I^n (E O)^n
    dims = [d_in, r * d_out] * n
    perm = [2 * c for c in range(n)] + [2 * c + 1 for c in range(n)]
    choi = permute_systems(twirled, dims, perm)
    return QuantumChannel(choi, d_in**n, (r * d_out) ** n)


def comb_purification_average_oracle(comb, n: int, r: int | None = None) -> np.ndarray:
    """``E [J_pur^{(x)n}]`` for the purified comb, built by linking its isometric teeth.

    Returned on ``((I_1 O_1 ... I_k O_k) (x) E)^{(x)n}`` interleaved, so each
    copy carries its environment last.
    """
    purified = comb_purify(comb, r)
    pure = teeth_comb(purified)  # I_1 ... O_k E
    sys_dim = int(np.prod(comb.dims))
    full = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        full = np.kron(full, pure)
    return twirl_factors(full, n, (sys_dim, purified.env_dim), 1)


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: np.ndarray
    stderr: np.ndarray  # real part stderr + 1j * imaginary part stderr
    trials: int

    def max_sigma(self, exact: np.ndarray, floor: float = 1e-12) -> float:
        """Largest entrywise deviation from ``exact`` in units of standard error."""
        diff = self.mean - np.asarray(exact)
        re = np.abs(diff.real) / np.maximum(self.stderr.real, floor)
        im = np.abs(diff.imag) / np.maximum(self.stderr.imag, floor)
        return float(max(re.max(), im.max()))


def monte_carlo_average(
    sampler: Callable[[np.random.Generator], np.ndarray],
    f: Callable[[np.ndarray], np.ndarray],
    trials: int,
    seed=None,
) -> MonteCarloEstimate:
    """Empirical mean of ``f(sampler(rng))`` with per-entry standard errors."""
    if trials < 2:
        raise ValueError("need at least two trials")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    total = total_sq_re = total_sq_im = None
    for _ in range(trials):
        val = np.asarray(f(sampler(rng)), dtype=complex)
        if total is None:
            total = np.zeros_like(val)
            total_sq_re = np.zeros(val.shape)
            total_sq_im = np.zeros(val.shape)
        total += val
        total_sq_re += val.real**2
        total_sq_im += val.imag**2
    mean = total / trials
    var_re = np.clip(total_sq_re / trials - mean.real**2, 0, None) * trials / (trials - 1)
    var_im = np.clip(total_sq_im / trials - mean.imag**2, 0, None) * trials / (trials - 1)
    stderr = np.sqrt(var_re / trials) + 1j * np.sqrt(var_im / trials)
    return MonteCarloEstimate(mean, stderr, trials)


def class_function_residual(table: WeingartenTable) -> float:
    """Spread of ``Wg`` over each conjugacy class; zero for a class function."""
    spread = 0.0
    identity = table.perms.index(tuple(range(table.n)))
    groups: dict = {}
    for k, p in enumerate(table.perms):
        groups.setdefault(_cycle_type(p), []).append(table.matrix[k, identity])
    for vals in groups.values():
        spread = max(spread, float(np.ptp(vals)))
    return spread


def cycle_type_counts(n: int) -> Counter:
    return Counter(_cycle_type(p) for p in itertools.permutations(range(n)))


def haar_moment_check(n: int, d: int) -> float:
    """``|| G W G - G ||_max``; the pseudo-inverse identity that holds for any ``d``."""
    t = weingarten_table(n, d)
    return float(np.abs(t.gram @ t.matrix @ t.gram - t.gram).max()) / max(1.0, math.factorial(n))
