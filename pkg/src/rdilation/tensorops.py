"""Tensor-factor bookkeeping: reordering, partial traces and copy layouts.

Factors follow ``numpy.kron`` order (first factor most significant).  For
``n`` copies of a ``k``-factor system the *interleaved* layout is
``(A_1 B_1 ...)(A_2 B_2 ...)...`` and the *grouped* layout is
``A_1 A_2 ... B_1 B_2 ...``.
"""

from __future__ import annotations

import string
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError


def permute_systems(mat: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors of a vector or square matrix.

    Factor ``perm[k]`` of the input becomes factor ``k`` of the output.
    """
    mat = np.asarray(mat)
    dims = tuple(int(x) for x in dims)
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(len(dims))):
        raise ValueError(f"{perm} is not a permutation of {len(dims)} factors")
    size = int(np.prod(dims))
    k = len(dims)
    if mat.ndim == 1:
        if mat.shape[0] != size:
            raise DimensionMismatchError(f"vector of length {mat.shape[0]} does not match dims {dims}")
        return mat.reshape(dims).transpose(perm).reshape(-1)
    if mat.shape != (size, size):
        raise DimensionMismatchError(f"matrix of shape {mat.shape} does not match dims {dims}")
    tensor = mat.reshape(dims + dims).transpose(list(perm) + [k + p for p in perm])
    return tensor.reshape(size, size)


def inverse_permutation(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for k, p in enumerate(perm):
        inv[p] = k
    return inv


def partial_trace(mat: np.ndarray, dims: Sequence[int], trace_out: Sequence[int]) -> np.ndarray:
    """Trace out the factors listed in ``trace_out``."""
    mat = np.asarray(mat)
    dims = tuple(int(x) for x in dims)
    if mat.shape != (int(np.prod(dims)),) * 2:
        raise DimensionMismatchError(f"matrix of shape {mat.shape} does not match dims {dims}")
    trace_out = sorted(set(trace_out))
    if any(not 0 <= k < len(dims) for k in trace_out):
        raise DimensionMismatchError(f"subsystems {trace_out} out of range for {len(dims)} factors")
    keep = [k for k in range(len(dims)) if k not in trace_out]
    letters = string.ascii_letters
    rows = [letters[k] for k in range(len(dims))]
    cols = [letters[k] if k in trace_out else letters[len(dims) + k] for k in range(len(dims))]
    out = "".join(rows[k] for k in keep) + "".join(cols[k] for k in keep)
    result = np.einsum("".join(rows) + "".join(cols) + "->" + out, mat.reshape(dims + dims))
    size = int(np.prod([dims[k] for k in keep]))
    return result.reshape(size, size)


def tensor_power(mat: np.ndarray, n: int) -> np.ndarray:
    """``mat^{(x) n}`` for a vector or matrix; ``n = 0`` gives the scalar one."""
    mat = np.asarray(mat)
    out = np.ones((1,) * mat.ndim, dtype=mat.dtype)
    for _ in range(n):
        out = np.kron(out, mat)
    return out


def max_entangled(d: int) -> np.ndarray:
    """Unnormalized ``|1>> = sum_i |i>|i>``."""
    return np.eye(d).reshape(-1)


def grouping_permutation(n: int, k: int) -> list[int]:
    """``perm`` for :func:`permute_systems` taking interleaved to grouped layout."""
    return [c * k + f for f in range(k) for c in range(n)]


def interleaved_to_grouped(mat: np.ndarray, n: int, dims: Sequence[int]) -> np.ndarray:
    """``(A B ...)^{(x) n}`` layout to ``A^n B^n ...``; ``dims`` are the per-copy factors."""
    return permute_systems(mat, list(dims) * n, grouping_permutation(n, len(dims)))


def grouped_to_interleaved(mat: np.ndarray, n: int, dims: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`interleaved_to_grouped`."""
    grouped_dims = [d for d in dims for _ in range(n)]
    return permute_systems(mat, grouped_dims, inverse_permutation(grouping_permutation(n, len(dims))))
