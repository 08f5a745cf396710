import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdilation.channels import (
    Comb,
    DensityOperator,
    QuantumChannel,
    adjoint_channel,
    apply,
    apply_map,
    canonical_purification,
    choi_purification_to_isometry,
    comb_apply,
    comb_from_channels,
    comb_purify,
    compose,
    fidelity,
    haar_unitary,
    identity_channel,
    is_valid_comb,
    kraus_rank,
    link_product,
    partial_trace,
    permute_systems,
    petz_general,
    petz_recovery,
    random_kraus_rank_r_channel,
    random_rank_r_state,
    teeth_comb,
    tensor,
    trace_distance,
    trace_out_environment,
    unitary_channel,
    validate_comb,
)
from rdilation.errors import CausalityError, FormulaAssumptionError, NumericalError, PromiseViolationError

PAULI = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1.0, -1.0])]


def bloch_state(v):
    return 0.5 * (np.eye(2) + sum(c * p for c, p in zip(v, PAULI[1:])))


def depolarizing():
    return QuantumChannel.from_kraus([0.5 * p for p in PAULI])


def dephasing(p=0.3):
    return QuantumChannel.from_kraus([np.sqrt(1 - p) * np.eye(2), np.sqrt(p) * PAULI[3]])


def test_density_operator_clips_small_negatives():
    mat = np.diag([1.0 + 5e-11, -5e-11])
    rho = DensityOperator(mat)
    assert np.linalg.eigvalsh(rho.matrix).min() >= 0
    assert np.trace(rho.matrix) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        DensityOperator(np.diag([1.1, -0.1]))
    with pytest.raises(ValueError):
        DensityOperator(np.diag([0.6, 0.6]))


def test_choi_convention():
    # unnormalized, input first, trace = d_in
    chan = identity_channel(3)
    assert np.allclose(chan.choi, np.outer(np.eye(3).ravel(), np.eye(3).ravel()))
    assert np.trace(depolarizing().choi) == pytest.approx(2)
    assert np.allclose(depolarizing().choi, np.eye(4) / 2)


@pytest.mark.parametrize("d_in,d_out,r", [(2, 2, 1), (2, 2, 3), (3, 2, 2), (2, 3, 4)])
def test_kraus_and_choi_paths_agree(d_in, d_out, r, rng):
    chan = random_kraus_rank_r_channel(d_in, d_out, r, rng)
    via_choi = QuantumChannel(chan.choi, d_in, d_out)
    rho = random_rank_r_state(d_in, d_in, rng)
    assert np.allclose(apply(chan, rho), apply(via_choi, rho), atol=1e-12)
    assert kraus_rank(chan) == r
    assert np.allclose(QuantumChannel.from_kraus(via_choi.kraus()).choi, chan.choi, atol=1e-12)


def test_validation_rejects_non_tp():
    with pytest.raises(NumericalError):
        QuantumChannel.from_kraus([np.eye(2) * 0.5])
    with pytest.raises(NumericalError):
        QuantumChannel(np.eye(4), 2, 2)


def test_compose_and_tensor(rng):
    a = random_kraus_rank_r_channel(2, 3, 2, rng)
    b = random_kraus_rank_r_channel(3, 2, 2, rng)
    rho = random_rank_r_state(2, 2, rng)
    assert np.allclose(apply(compose(b, a), rho), apply(b, apply(a, rho)), atol=1e-12)
    mixed = compose(QuantumChannel(b.choi, 3, 2), a)
    assert np.allclose(mixed.choi, compose(b, a).choi, atol=1e-12)
    tau = random_rank_r_state(3, 2, rng)
    assert np.allclose(apply(tensor(a, b), np.kron(rho, tau)), np.kron(apply(a, rho), apply(b, tau)), atol=1e-12)
    choi_path = tensor(QuantumChannel(a.choi, 2, 3), QuantumChannel(a.choi, 2, 3))
    assert np.allclose(choi_path.choi, tensor(a, a).choi, atol=1e-12)


def test_link_product_examples(rng):
    ident = identity_channel(2).choi
    out, systems = link_product(ident, [("A", 2), ("B", 2)], ident, [("B", 2), ("C", 2)])
    assert systems == [("A", 2), ("C", 2)]
    assert np.allclose(out, ident)
    x = rng.standard_normal((4, 4))
    y = rng.standard_normal((9, 9))
    out, systems = link_product(x, [("A", 2), ("B", 2)], y, [("C", 3), ("D", 3)])
    assert np.allclose(out, np.kron(x, y))


def test_canonical_purification(rng):
    rho = random_rank_r_state(3, 2, rng)
    vec = canonical_purification(rho, 2).reshape(2, 3)
    assert np.allclose(vec.T @ vec.conj(), rho, atol=1e-12)
    with pytest.raises(PromiseViolationError):
        canonical_purification(random_rank_r_state(3, 3, rng), 2)


def test_isometry_examples(rng):
    u = haar_unitary(2, rng)
    iso = choi_purification_to_isometry(unitary_channel(u), 1)
    phase = iso.matrix[0, 0] / u[0, 0]
    assert abs(phase) == pytest.approx(1.0)
    assert np.allclose(iso.matrix, phase * u, atol=1e-12)
    dep = choi_purification_to_isometry(depolarizing(), 4)
    assert kraus_rank(dep.channel()) == 1
    assert np.allclose(trace_out_environment(dep.channel(), 4).choi, depolarizing().choi, atol=1e-12)
    deph = choi_purification_to_isometry(dephasing(), 2)
    assert np.abs(deph.matrix.conj().T @ deph.matrix - np.eye(2)).max() <= 1e-10
    with pytest.raises(PromiseViolationError):
        choi_purification_to_isometry(depolarizing(), 3)


def test_isometry_choi_vector_layout(rng):
    chan = random_kraus_rank_r_channel(2, 3, 2, rng)
    iso = choi_purification_to_isometry(chan, 2)
    vec = iso.choi_vector()
    pure = np.outer(vec, vec.conj())
    assert np.allclose(partial_trace(pure, [2, 2, 3], [1]), chan.choi, atol=1e-12)


def test_adjoint_is_dual(rng):
    chan = random_kraus_rank_r_channel(3, 2, 2, rng)
    adj = adjoint_channel(chan)
    x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    y = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    lhs = np.trace(y.conj().T @ apply(chan, x))
    rhs = np.trace(apply_map(adj.choi, 2, 3, y).conj().T @ x)
    assert lhs == pytest.approx(rhs)


def test_petz_examples(rng):
    u = haar_unitary(2, rng)
    rec = petz_recovery(unitary_channel(u))
    assert np.allclose(rec.choi, unitary_channel(u.conj().T).choi, atol=1e-12)
    # tracing out the first qubit: recovery is Y -> pi_2 (x) Y
    trace_first = QuantumChannel.from_kraus([np.kron(e[None, :], np.eye(2)) for e in np.eye(2)])
    rec = petz_recovery(trace_first)
    y = random_rank_r_state(2, 2, rng)
    assert np.allclose(apply(rec, y), np.kron(np.eye(2) / 2, y), atol=1e-12)


@pytest.mark.parametrize("d_in,d_out,r", [(2, 2, 1), (4, 2, 2), (6, 2, 3)])
def test_petz_matches_general_formula(d_in, d_out, r, rng):
    for _ in range(5):
        chan = QuantumChannel.from_kraus(haar_unitary(d_in, rng).reshape(r, d_out, d_in))
        rec = petz_recovery(chan)
        assert np.abs(rec.choi - petz_general(chan).choi).max() <= 1e-9
        rec.validate()


def test_petz_assumption_checks(rng):
    with pytest.raises(FormulaAssumptionError):
        petz_recovery(random_kraus_rank_r_channel(3, 2, 2, rng))
    amp_damp = QuantumChannel.from_kraus([np.array([[1, 0], [0, np.sqrt(0.5)]]), np.array([[0, np.sqrt(0.5)], [0, 0]])])
    with pytest.raises(PromiseViolationError):
        petz_recovery(amp_damp)


def test_distances():
    rho = bloch_state([0.3, -0.2, 0.5])
    sigma = bloch_state([-0.1, 0.4, 0.2])
    assert trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-15)
    assert trace_distance(np.diag([1, 0]), np.diag([0, 1])) == pytest.approx(1.0)
    assert trace_distance(rho, sigma) == pytest.approx(0.5 * np.linalg.norm([0.4, -0.6, 0.3]))
    assert fidelity(rho, rho) == pytest.approx(1.0)
    assert fidelity(np.diag([1, 0]), np.diag([0, 1])) == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=3))
def test_fuchs_van_de_graaf(seed, r):
    rng = np.random.default_rng(seed)
    rho, sigma = random_rank_r_state(3, r, rng), random_rank_r_state(3, 3, rng)
    t, f = trace_distance(rho, sigma), fidelity(rho, sigma)
    assert 1 - np.sqrt(f) <= t + 1e-9
    assert t <= np.sqrt(max(0.0, 1 - f)) + 1e-9


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_random_channels_are_cptp(seed):
    rng = np.random.default_rng(seed)
    chan = random_kraus_rank_r_channel(2, 3, 2, rng)
    QuantumChannel(chan.choi, 2, 3).validate()
    out = apply(chan, random_rank_r_state(2, 2, rng))
    assert np.trace(out) == pytest.approx(1.0)
    assert np.linalg.eigvalsh(out).min() >= -1e-12


@pytest.fixture
def two_comb(rng):
    first = random_kraus_rank_r_channel(2, 4, 2, rng)  # I1 -> O1 A1
    second = random_kraus_rank_r_channel(4, 2, 2, rng)  # I2 A1 -> O2
    return comb_from_channels([first, second], [(2, 2), (2, 2)], [2]), first, second


def test_comb_causality(two_comb):
    comb, _, _ = two_comb
    validate_comb(comb)
    swapped = Comb(comb.teeth, permute_systems(comb.choi, comb.dims, [3, 1, 2, 0]))
    assert not is_valid_comb(swapped)
    with pytest.raises(CausalityError) as info:
        validate_comb(swapped)
    assert info.value.tooth in (1, 2)


def test_comb_apply_matches_direct_composition(two_comb, rng):
    comb, first, second = two_comb
    middle = random_kraus_rank_r_channel(2, 2, 2, rng)
    got = comb_apply(comb, [middle])
    # direct: first, then middle on O1 keeping the memory, then second on (I2, A1)
    direct = compose(second, compose(tensor(middle, identity_channel(2)), first))
    assert np.allclose(got.choi, direct.choi, atol=1e-12)
    got.validate()


def test_comb_purification(two_comb):
    comb, _, _ = two_comb
    pur = comb_purify(comb)
    assert np.allclose(pur.traced(), comb.choi, atol=1e-10)
    for tooth in pur.teeth:
        assert np.allclose(tooth.conj().T @ tooth, np.eye(tooth.shape[1]), atol=1e-9)
    linked = teeth_comb(pur)
    vals = np.linalg.eigvalsh(linked)
    assert np.sum(vals > 1e-9) == 1
    sys_dims = comb.dims + [pur.env_dim]
    assert np.allclose(partial_trace(linked, sys_dims, [len(sys_dims) - 1]), comb.choi, atol=1e-10)
