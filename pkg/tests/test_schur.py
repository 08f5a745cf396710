import numpy as np
import pytest

from rdilation.channels import haar_unitary
from rdilation.combinatorics import partitions, sym_dim, unitary_dim
from rdilation.errors import NotUnitaryError, SizeBudgetError
from rdilation.schur import (
    ORDERING_VERSION,
    block_diagonal_target_pi,
    generalized_phase_estimation,
    phase_estimation_probabilities,
    schur_transform,
    unitary_irrep_block,
    young_projector,
    young_projector_character,
    young_projector_schur,
)
from rdilation.symrep import all_permutations, permutation_action
from rdilation.tensorops import tensor_power

GRID = [(1, 2), (2, 2), (2, 3), (3, 2), (3, 3), (4, 2)]


@pytest.mark.parametrize("n,d", GRID)
def test_schur_transform_orthogonal(n, d):
    st = schur_transform(n, d)
    assert st.unitary.shape == (d**n, d**n)
    assert np.allclose(st.unitary @ st.unitary.T, np.eye(d**n), atol=1e-12)
    assert len(st.labels) == d**n


@pytest.mark.parametrize("n,d", GRID)
def test_permutations_block_diagonal(n, d):
    st = schur_transform(n, d)
    for sigma in all_permutations(n):
        got = st.unitary @ permutation_action(sigma, d) @ st.unitary.T
        assert np.allclose(got, block_diagonal_target_pi(st, sigma), atol=1e-10)


@pytest.mark.parametrize("n,d", [(2, 2), (3, 2), (2, 3)])
def test_unitaries_block_diagonal(n, d, rng):
    st = schur_transform(n, d)
    for _ in range(5):
        u = haar_unitary(d, rng)
        rotated = st.unitary @ tensor_power(u, n) @ st.unitary.T
        for lam, (off, dl, m) in st.blocks.items():
            f = unitary_irrep_block(u, lam)
            sl = st.block_slice(lam)
            assert np.allclose(rotated[sl, sl], np.kron(f, np.eye(m)), atol=1e-10)
            assert np.allclose(f @ f.conj().T, np.eye(dl), atol=1e-10)


def test_labels_and_rows():
    st = schur_transform(2, 2)
    assert st.labels == (((2,), 0, 0), ((2,), 1, 0), ((2,), 2, 0), ((1, 1), 0, 0))
    singlet = st.unitary[st.row((1, 1), 0, 0)]
    assert np.allclose(np.abs(singlet), [0, 1 / np.sqrt(2), 1 / np.sqrt(2), 0])
    assert singlet[1] == -singlet[2]
    assert ORDERING_VERSION


def test_empty_blocks_omitted():
    st = schur_transform(3, 2)
    assert (1, 1, 1) not in st.blocks
    assert st.shapes == [(3,), (2, 1)]


def test_budget():
    with pytest.raises(SizeBudgetError):
        schur_transform(5, 3, budget=100)
    with pytest.raises(ValueError):
        schur_transform(0, 2)


def test_deterministic():
    a = schur_transform(3, 2).unitary
    b = schur_transform(3, 2).unitary
    assert np.array_equal(a, b)


@pytest.mark.parametrize("n,d", [(2, 2), (3, 2), (3, 3), (4, 2)])
def test_young_projectors_agree_and_resolve_identity(n, d):
    total = np.zeros((d**n, d**n))
    for lam in partitions(n):
        a, b = young_projector_character(lam, d), young_projector_schur(lam, d)
        assert np.abs(a - b).max() <= 1e-10
        assert np.allclose(a @ a, a, atol=1e-10)
        assert np.trace(a) == pytest.approx(sym_dim(lam) * unitary_dim(lam, d))
        total += a
    assert np.allclose(total, np.eye(d**n), atol=1e-10)


def test_young_projector_examples(rng):
    v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    v /= np.linalg.norm(v)
    sym = young_projector((3,), 3, 3)
    vvv = tensor_power(v, 3)
    assert np.allclose(sym @ vvv, vvv, atol=1e-12)
    singlet = young_projector((1, 1), 2, 2)
    psi = np.array([0, 1, -1, 0]) / np.sqrt(2)
    assert np.allclose(singlet, np.outer(psi, psi), atol=1e-12)
    assert np.trace(young_projector((2, 1), 3, 2)) == pytest.approx(4)
    assert np.count_nonzero(young_projector((1, 1, 1), 3, 2)) == 0


def test_irrep_block_examples(rng):
    assert np.allclose(unitary_irrep_block(np.eye(2), (2, 1)), np.eye(2), atol=1e-12)
    u = haar_unitary(2, rng)
    f = unitary_irrep_block(u, (2,))
    assert f.shape == (3, 3)
    # eigenvalues a^2, ab, b^2 give det(U)^3 for the symmetric square
    assert np.linalg.det(f) == pytest.approx(np.linalg.det(u) ** 3)
    # symmetric square in the basis |00>, (|01>+|10>)/sqrt2, |11>
    a, b, c, d = u.ravel()
    s2 = np.sqrt(2)
    sym_sq = np.array(
        [[a * a, s2 * a * b, b * b], [s2 * a * c, a * d + b * c, s2 * b * d], [c * c, s2 * c * d, d * d]]
    )
    # similar matrices: equal traces of all powers
    for p in (1, 2, 3):
        assert np.trace(np.linalg.matrix_power(f, p)) == pytest.approx(np.trace(np.linalg.matrix_power(sym_sq, p)))
    with pytest.raises(NotUnitaryError):
        unitary_irrep_block(np.array([[1.0, 1.0], [0.0, 1.0]]), (2,))


def test_phase_estimation(rng):
    v = haar_unitary(2, rng)[:, 0]
    prod = np.outer(np.kron(v, v), np.kron(v, v).conj())
    lam, post = generalized_phase_estimation(prod, 2, 2, rng_seed=1)
    assert lam == (2,)
    assert np.allclose(post, prod, atol=1e-12)
    psi = np.array([0, 1, -1, 0]) / np.sqrt(2)
    lam, _ = generalized_phase_estimation(np.outer(psi, psi), 2, 2, rng_seed=2)
    assert lam == (1, 1)


@pytest.mark.parametrize("n,d", [(2, 2), (3, 2), (2, 3)])
def test_phase_estimation_probabilities_sum(n, d, rng):
    x = rng.standard_normal((d**n, d**n)) + 1j * rng.standard_normal((d**n, d**n))
    rho = x @ x.conj().T
    rho /= np.trace(rho)
    probs = phase_estimation_probabilities(rho, n, d)
    assert sum(probs.values()) == pytest.approx(1.0, abs=1e-12)
    assert all(p >= -1e-12 for p in probs.values())
