import numpy as np
import pytest

from rdilation.channels import (
    apply,
    canonical_purification,
    choi_purification_to_isometry,
    haar_unitary,
    random_kraus_rank_r_channel,
    random_rank_r_state,
    unitary_channel,
)
from rdilation.errors import SizeBudgetError
from rdilation.haar_oracle import (
    class_function_residual,
    cycle_type_counts,
    dilation_average_oracle,
    haar_moment_check,
    monte_carlo_average,
    permutation_operators,
    purification_average_oracle,
    twirl_exact,
    twirl_factors,
    weingarten_closed_form_n2,
    weingarten_table,
)
from rdilation.tensorops import permute_systems, tensor_power

SWAP = permutation_operators(2, 2)[1]


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_weingarten_single_copy(d):
    assert weingarten_table(1, d).value((1,)) == pytest.approx(1 / d)


@pytest.mark.parametrize("d", [2, 3, 4, 7])
def test_weingarten_two_copies(d):
    table = weingarten_table(2, d)
    closed = weingarten_closed_form_n2(d)
    for cyc, val in closed.items():
        assert abs(table.value(cyc) - val) <= 1e-12


@pytest.mark.parametrize("d", [3, 4, 5])
def test_weingarten_three_copies(d):
    den = d * (d * d - 1) * (d * d - 4)
    table = weingarten_table(3, d)
    assert table.value((1, 1, 1)) == pytest.approx((d * d - 2) / den, abs=1e-12)
    assert table.value((2, 1)) == pytest.approx(-d / den, abs=1e-12)
    assert table.value((3,)) == pytest.approx(2 / den, abs=1e-12)


@pytest.mark.parametrize("n,d", [(2, 1), (3, 2), (4, 2), (3, 3), (4, 3)])
def test_weingarten_structure(n, d):
    table = weingarten_table(n, d)
    assert class_function_residual(table) <= 1e-12
    assert haar_moment_check(n, d) <= 1e-10
    assert set(table.values) == set(cycle_type_counts(n))


def test_weingarten_limits():
    with pytest.raises(SizeBudgetError):
        weingarten_table(6, 2)
    with pytest.raises(ValueError):
        weingarten_table(0, 2)


def test_permutation_operators_swap():
    ops = permutation_operators(2, 2)
    assert np.array_equal(ops[0], np.eye(4))
    ket01 = np.array([0, 1, 0, 0])
    assert np.array_equal(ops[1] @ ket01, [0, 0, 1, 0])


def test_twirl_single_copy(rng):
    x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.allclose(twirl_exact(x, 1, 3), np.trace(x) / 3 * np.eye(3), atol=1e-12)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_twirl_two_copies_matches_projector_formula(d, rng):
    size = d * d
    swap = permutation_operators(2, d)[1]
    x = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    expected = np.zeros((size, size), dtype=complex)
    for sign in (1, -1):
        proj = (np.eye(size) + sign * swap) / 2
        if np.trace(proj) > 0.5:
            expected += np.trace(proj @ x) / np.trace(proj) * proj
    assert np.allclose(twirl_exact(x, 2, d), expected, atol=1e-12)


def test_twirl_is_invariant_projection(rng):
    x = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    t = twirl_exact(x, 3, 2)
    assert np.allclose(twirl_exact(t, 3, 2), t, atol=1e-12)
    u = tensor_power(haar_unitary(2, rng), 3)
    assert np.allclose(u @ t @ u.conj().T, t, atol=1e-12)


def test_twirl_factors_only_touches_selected_factor(rng):
    a = rng.standard_normal((2, 2))
    b = rng.standard_normal((3, 3))
    x = np.kron(np.kron(a, b), np.kron(a, b))
    out = twirl_factors(x, 2, (2, 3), 1)
    expected = permute_systems(np.kron(np.kron(a, a), twirl_exact(np.kron(b, b), 2, 3)), [2, 2, 3, 3], [0, 2, 1, 3])
    assert np.allclose(out, expected, atol=1e-12)


@pytest.mark.parametrize("d,r", [(2, 1), (2, 2), (3, 2)])
def test_purification_oracle_single_copy(d, r, rng):
    rho = random_rank_r_state(d, min(d, r), rng)
    assert np.allclose(purification_average_oracle(rho, r, 1), np.kron(np.eye(r) / r, rho), atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_purification_oracle_pure_rank_one(n, rng):
    psi = random_rank_r_state(2, 1, rng)
    block = np.kron(np.diag([1.0]), psi)
    assert np.allclose(purification_average_oracle(psi, 1, n), tensor_power(block, n), atol=1e-12)


def test_purification_oracle_maximally_mixed_closed_form():
    # rho = pi_2, r = 2: the canonical purification is |1>>/sqrt2, E S ordering per copy
    phi = np.eye(2).reshape(-1) / np.sqrt(2)
    x = np.kron(np.outer(phi, phi), np.outer(phi, phi))  # (E S)(E S)
    x = permute_systems(x, [2, 2, 2, 2], [0, 2, 1, 3])  # E E S S
    swap = SWAP
    expected = np.zeros((16, 16))
    for sign in (1, -1):
        proj = (np.eye(4) + sign * swap) / 2
        lifted = np.kron(proj, np.eye(4))
        reduced = (lifted @ x).reshape(4, 4, 4, 4).trace(axis1=0, axis2=2)
        expected += np.kron(proj, reduced) / np.trace(proj)
    expected = permute_systems(expected, [2, 2, 2, 2], [0, 2, 1, 3])
    assert np.allclose(purification_average_oracle(np.eye(2) / 2, 2, 2), expected, atol=1e-12)


@pytest.mark.parametrize("r", [1, 2])
def test_dilation_oracle_single_copy(r, rng):
    lam = random_kraus_rank_r_channel(2, 2, r, rng)
    avg = dilation_average_oracle(lam, r, 1)
    x = random_rank_r_state(2, 2, rng)
    assert np.allclose(apply(avg, x), np.kron(np.eye(r) / r, apply(lam, x)), atol=1e-12)


def test_dilation_oracle_unitary_is_power(rng):
    u = haar_unitary(2, rng)
    avg = dilation_average_oracle(unitary_channel(u), 1, 2)
    iso = choi_purification_to_isometry(unitary_channel(u), 1)
    assert np.allclose(avg.choi, unitary_channel(np.kron(iso.matrix, iso.matrix)).choi, atol=1e-12)


def test_dilation_oracle_matches_purification_of_choi_state(rng):
    lam = random_kraus_rank_r_channel(2, 2, 2, rng)
    n, r = 2, 2
    direct = dilation_average_oracle(lam, r, n).choi  # I^n (E O)^n
    state = purification_average_oracle(lam.choi / 2, r, n) * 2**n  # (E I O)^n
    reordered = permute_systems(state, [r, 2, 2] * n, [1, 4, 0, 2, 3, 5])
    assert np.abs(direct - reordered).max() <= 1e-9


def test_monte_carlo_constant():
    est = monte_carlo_average(lambda g: g.standard_normal(), lambda _: np.eye(2), 10)
    assert np.array_equal(est.mean, np.eye(2))
    assert np.all(est.stderr == 0)
    with pytest.raises(ValueError):
        monte_carlo_average(lambda g: 0, lambda _: 0, 1)


def test_monte_carlo_single_copy_twirl():
    x = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    est = monte_carlo_average(lambda g: haar_unitary(2, g), lambda u: u @ x @ u.conj().T, 10_000, seed=11)
    assert est.max_sigma(np.trace(x) / 2 * np.eye(2)) <= 5


def test_monte_carlo_purification_two_copies(rng):
    rho = random_rank_r_state(2, 2, rng)
    vec = canonical_purification(rho, 2)

    def sample(u):
        v = np.kron(u, np.eye(2)) @ vec
        return tensor_power(np.outer(v, v.conj()), 2)

    est = monte_carlo_average(lambda g: haar_unitary(2, g), sample, 10_000, seed=12)
    assert est.max_sigma(purification_average_oracle(rho, 2, 2)) <= 5
