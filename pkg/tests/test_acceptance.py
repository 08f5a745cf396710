"""Acceptance criteria.

Each test prints one ``CRITERION k: PASS|FAIL`` line (visible with ``-s``) and
records it for the terminal summary.
"""

import itertools
import math
import time

import numpy as np
import pytest

from rdilation import circuits
from rdilation.channels import (
    QuantumChannel,
    apply,
    canonical_purification,
    haar_unitary,
    petz_general,
    petz_recovery,
    random_rank_r_state,
)
from rdilation.combinatorics import partitions, sym_dim
from rdilation.haar_oracle import (
    monte_carlo_average,
    purification_average_oracle,
    twirl_exact,
    weingarten_closed_form_n2,
    weingarten_table,
)
from rdilation.kronecker import cg_coefficient_relation_check, kronecker_coefficient, tensor_rep
from rdilation.schur import block_diagonal_target_pi, schur_transform
from rdilation.symrep import Permutation, all_permutations, irrep_matrices, permutation_action, permutation_index
from rdilation.tensorops import tensor_power

from conftest import ACCEPTANCE_LINES


def record(k, ok, detail, start):
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'}  {detail}  ({time.perf_counter() - start:.1f} s)"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def worst_report(reports):
    return max(r.residual for r in reports), all(r.passed for r in reports)


def test_criterion_01_schur_orthogonality():
    start = time.perf_counter()
    worst = 0.0
    for n in (2, 3, 4, 5):
        for lam in partitions(n):
            g = irrep_matrices(tuple(lam))
            m = g.shape[1]
            avg = np.einsum("sji,skl->jikl", g, g) / math.factorial(n)
            target = np.einsum("jk,il->jikl", np.eye(m), np.eye(m)) / m
            worst = max(worst, float(np.abs(avg - target).max()))
    elapsed = time.perf_counter() - start
    record(1, worst <= 1e-10 and elapsed < 30, f"max residual {worst:.2e} (tol 1e-10)", start)


def test_criterion_02_schur_weyl_covariance():
    start = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for n, d in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)]:
        st = schur_transform(n, d)
        u_sch = st.unitary
        for sigma in all_permutations(n):
            got = u_sch @ permutation_action(sigma, d) @ u_sch.T
            worst = max(worst, float(np.abs(got - block_diagonal_target_pi(st, sigma)).max()))
        for _ in range(50):
            u = haar_unitary(d, rng)
            rotated = u_sch @ tensor_power(u, n) @ u_sch.T
            target = np.zeros_like(rotated)
            for lam, (off, dl, m) in st.blocks.items():
                rows = off + np.arange(dl) * m
                sl = st.block_slice(lam)
                target[sl, sl] = np.kron(rotated[np.ix_(rows, rows)], np.eye(m))
            worst = max(worst, float(np.abs(rotated - target).max()))
    elapsed = time.perf_counter() - start
    record(2, worst <= 1e-9 and elapsed < 120, f"max residual {worst:.2e} (tol 1e-9, 50 Haar samples per point)", start)


def test_criterion_03_random_purification_channel():
    start = time.perf_counter()
    reports = circuits.verify("thm1", seed=3, samples=20)
    worst, ok = worst_report(reports)
    rng = np.random.default_rng(33)
    closed = 0.0
    for d in (1, 2, 3):
        for r in (1, 2):
            phi = circuits.random_purification_channel(1, d, r)
            for _ in range(20):
                rho = random_rank_r_state(d, min(d, r), rng)
                closed = max(closed, float(np.abs(apply(phi, rho) - np.kron(np.eye(r) / r, rho)).max()))
    ok = ok and closed <= 1e-8 and len(reports) == 18
    elapsed = time.perf_counter() - start
    record(3, ok and elapsed < 120, f"max trace distance {worst:.2e}, n=1 closed form {closed:.2e} (tol 1e-8)", start)


def test_criterion_04_random_dilation_superchannel():
    start = time.perf_counter()
    reports = circuits.verify("thm2", seed=4, samples=20)
    worst, ok = worst_report(reports)
    grid = sorted(tuple(r.params.values()) for r in reports)
    ok = ok and grid == sorted([(2, 2, 1, 2), (2, 2, 2, 2), (2, 2, 2, 3), (2, 1, 2, 2)])
    elapsed = time.perf_counter() - start
    record(4, ok and elapsed < 300, f"max trace distance {worst:.2e} over {len(reports)} grid points (tol 1e-8)", start)


def test_criterion_05_kronecker_form_equivalence():
    start = time.perf_counter()
    reports = circuits.verify("fig3-vs-fig2a", seed=5, samples=20)
    reports += circuits.verify("thm2-kronecker", seed=5, samples=20)
    worst, ok = worst_report(reports)
    relation = 0.0
    triples = 0
    for n in (2, 3, 4):
        for lam, mu, nu in itertools.product(partitions(n), repeat=3):
            if kronecker_coefficient(mu, nu, lam):
                relation = max(relation, cg_coefficient_relation_check(lam, mu, nu))
                triples += 1
    ok = ok and relation <= 1e-9
    elapsed = time.perf_counter() - start
    detail = f"superchannel gap {worst:.2e} (tol 1e-8), CG relation {relation:.2e} on {triples} triples (tol 1e-9)"
    record(5, ok and elapsed < 300, detail, start)


def _hom_dimension(rep_a, rep_b, gens):
    da, db = rep_a.shape[1], rep_b.shape[1]
    rows = [np.kron(rep_b[k], np.eye(da)) - np.kron(np.eye(db), rep_a[k].T) for k in gens]
    sing = np.linalg.svd(np.vstack(rows), compute_uv=False)
    return int(np.sum(sing < 1e-9)) + max(0, da * db - len(sing))


def test_criterion_06_kronecker_arithmetic():
    start = time.perf_counter()
    ok = True
    for n in range(1, 6):
        for mu in partitions(n):
            for nu in partitions(n):
                total = sum(sym_dim(lam) * kronecker_coefficient(mu, nu, lam) for lam in partitions(n))
                ok &= total == sym_dim(mu) * sym_dim(nu)
    mismatches = 0
    for n in (3, 4):
        gens = [permutation_index(Permutation(tuple(range(k)) + (k + 1, k) + tuple(range(k + 2, n)))) for k in range(n - 1)]
        for mu, nu, lam in itertools.product(partitions(n), repeat=3):
            brute = _hom_dimension(irrep_matrices(tuple(lam)), tensor_rep(mu, nu), gens)
            mismatches += brute != kronecker_coefficient(mu, nu, lam)
    ok = ok and mismatches == 0
    elapsed = time.perf_counter() - start
    record(6, ok and elapsed < 60, f"dimension sums exact for n<=5, {mismatches} brute-force mismatches at n=3,4", start)


def test_criterion_07_petz_map():
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    agree = cptp = 0.0
    for d_in, d_out, r in [(2, 2, 1), (4, 2, 2)]:
        for _ in range(50):
            chan = QuantumChannel.from_kraus(haar_unitary(d_in, rng).reshape(r, d_out, d_in))
            rec = petz_recovery(chan)
            agree = max(agree, float(np.abs(rec.choi - petz_general(chan).choi).max()))
            tp = np.abs(rec.choi.reshape(d_out, d_in, d_out, d_in).trace(axis1=1, axis2=3) - np.eye(d_out)).max()
            cptp = max(cptp, float(tp), float(-min(0.0, np.linalg.eigvalsh(rec.choi).min())))
    elapsed = time.perf_counter() - start
    ok = agree <= 1e-9 and cptp <= 1e-9 and elapsed < 30
    record(7, ok, f"formula gap {agree:.2e}, CPTP residual {cptp:.2e} (tol 1e-9, 50 channels per point)", start)


def test_criterion_08_isometry_lift():
    start = time.perf_counter()
    reports = circuits.verify("thm3", seed=8, samples=10)
    lift = [r for r in reports if r.construction == "thm3"]
    env = [r for r in reports if r.construction == "thm3-env-trace"]
    worst_lift, ok_lift = worst_report(lift)
    worst_env, ok_env = worst_report(env)
    ok = ok_lift and ok_env and {r.params["n"] for r in lift} == {1, 2}
    record(8, ok, f"lift gap {worst_lift:.2e}, environment trace gap {worst_env:.2e} (tol 1e-8)", start)


def test_criterion_09_supersuperchannel():
    start = time.perf_counter()
    reports = circuits.verify("thm7", seed=9)
    main = [r for r in reports if r.construction == "thm7"]
    reduction = [r for r in reports if r.construction == "thm7-k1-reduction"]
    worst_main, ok_main = worst_report(main)
    worst_red, ok_red = worst_report(reduction)
    ok = ok_main and ok_red and all(r.tolerance <= 1e-7 for r in main) and all(r.tolerance <= 1e-9 for r in reduction)
    elapsed = time.perf_counter() - start
    record(9, ok and elapsed < 300, f"comb oracle gap {worst_main:.2e} (tol 1e-7), k=1 reduction {worst_red:.2e} (tol 1e-9)", start)


def test_criterion_10_oracle_self_consistency():
    start = time.perf_counter()
    trials = 10_000
    sigmas = {}
    x1 = np.array([[0.6, 0.1 + 0.3j], [0.1 - 0.3j, 0.4]])
    est = monte_carlo_average(lambda g: haar_unitary(2, g), lambda u: u @ x1 @ u.conj().T, trials, seed=101)
    sigmas["twirl n=1 d=2"] = est.max_sigma(twirl_exact(x1, 1, 2))
    rng = np.random.default_rng(102)
    x2 = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    est = monte_carlo_average(
        lambda g: tensor_power(haar_unitary(2, g), 2), lambda u: u @ x2 @ u.conj().T, trials, seed=103
    )
    sigmas["twirl n=2 d=2"] = est.max_sigma(twirl_exact(x2, 2, 2))
    rho = random_rank_r_state(2, 2, rng)
    vec = canonical_purification(rho, 2)

    def purified_pair(u):
        v = np.kron(u, np.eye(2)) @ vec
        return tensor_power(np.outer(v, v.conj()), 2)

    est = monte_carlo_average(lambda g: haar_unitary(2, g), purified_pair, trials, seed=104)
    sigmas["purification n=2 d=2 r=2"] = est.max_sigma(purification_average_oracle(rho, 2, 2))
    wg_gap = 0.0
    for d in (2, 3, 4, 5):
        table = weingarten_table(2, d)
        wg_gap = max(wg_gap, max(abs(table.value(c) - v) for c, v in weingarten_closed_form_n2(d).items()))
    worst = max(sigmas.values())
    ok = worst <= 5 and wg_gap <= 1e-12
    record(10, ok, f"max deviation {worst:.2f} SE over {len(sigmas)} points (limit 5), Wg n=2 gap {wg_gap:.1e}", start)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-s"]))
