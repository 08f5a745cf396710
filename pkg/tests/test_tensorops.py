import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdilation.errors import DimensionMismatchError
from rdilation.tensorops import (
    grouped_to_interleaved,
    interleaved_to_grouped,
    inverse_permutation,
    max_entangled,
    partial_trace,
    permute_systems,
    tensor_power,
)


def random_factors(rng, dims):
    return [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for d in dims]


def kron_all(mats):
    out = np.ones((1, 1))
    for m in mats:
        out = np.kron(out, m)
    return out


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(min_value=1, max_value=3), min_size=1, max_size=4).flatmap(
    lambda dims: st.tuples(st.just(dims), st.permutations(list(range(len(dims)))))
))
def test_permute_systems_moves_product_factors(case):
    dims, perm = case
    rng = np.random.default_rng(len(dims))
    mats = random_factors(rng, dims)
    got = permute_systems(kron_all(mats), dims, perm)
    assert np.allclose(got, kron_all([mats[p] for p in perm]))
    back = permute_systems(got, [dims[p] for p in perm], inverse_permutation(perm))
    assert np.allclose(back, kron_all(mats))


def test_permute_vector(rng):
    a, b = rng.standard_normal(2), rng.standard_normal(3)
    assert np.allclose(permute_systems(np.kron(a, b), [2, 3], [1, 0]), np.kron(b, a))


def test_permute_errors():
    with pytest.raises(ValueError):
        permute_systems(np.eye(4), [2, 2], [0, 0])
    with pytest.raises(DimensionMismatchError):
        permute_systems(np.eye(5), [2, 2], [1, 0])


def test_partial_trace_of_products(rng):
    a, b, c = random_factors(rng, [2, 3, 2])
    full = kron_all([a, b, c])
    assert np.allclose(partial_trace(full, [2, 3, 2], [1]), np.trace(b) * np.kron(a, c))
    assert np.allclose(partial_trace(full, [2, 3, 2], [0, 2]), np.trace(a) * np.trace(c) * b)
    with pytest.raises(DimensionMismatchError):
        partial_trace(full, [2, 3, 2], [3])


def test_tensor_power_and_max_entangled():
    assert tensor_power(np.eye(2), 0).shape == (1, 1)
    assert np.array_equal(tensor_power(np.eye(2), 3), np.eye(8))
    assert np.array_equal(max_entangled(2), [1, 0, 0, 1])


@pytest.mark.parametrize("n,dims", [(2, (2, 3)), (3, (2, 2)), (2, (2, 1, 3))])
def test_grouping_roundtrip(n, dims, rng):
    per_copy = [random_factors(rng, dims) for _ in range(n)]
    interleaved = kron_all([m for copy in per_copy for m in copy])
    grouped = kron_all([per_copy[c][f] for f in range(len(dims)) for c in range(n)])
    assert np.allclose(interleaved_to_grouped(interleaved, n, dims), grouped)
    assert np.allclose(grouped_to_interleaved(grouped, n, dims), interleaved)
