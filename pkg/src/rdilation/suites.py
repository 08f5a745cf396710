"""Verification suites behind ``rdilation verify``.

Each suite returns a list of :class:`Check` records.  Randomness is derived
from a single root seed with :class:`numpy.random.SeedSequence`, one child
sequence per check, in a fixed order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import circuits
from .channels import (
    Comb,
    QuantumChannel,
    haar_unitary,
    is_valid_comb,
    permute_systems,
    petz_general,
    petz_recovery,
    comb_purify,
)
from .combinatorics import partitions, sym_dim
from .kronecker import (
    cg_coefficient_relation_check,
    controlled_kronecker_gate,
    covariance_residual,
    kronecker_coefficient,
    kronecker_transform,
)
from .schur import block_diagonal_target_pi, schur_transform, young_projector_character, young_projector_schur
from .symrep import all_permutations, irrep_matrices, permutation_action, permutation_index, qft_sn
from .tensorops import tensor_power


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    passed: bool
    note: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "residual": self.residual, "tolerance": self.tolerance, "pass": self.passed, "note": self.note}


def _check(name: str, residual: float, tol: float, note: str = "") -> Check:
    residual = float(residual)
    return Check(name, residual, tol, bool(residual <= tol), note)


@dataclass
class SuiteConfig:
    n: int | None = None
    d: int | None = None
    d_in: int | None = None
    d_out: int | None = None
    rank: int | None = None
    seed: int = 0
    tol: float | None = None
    budget: int = circuits.DEFAULT_BUDGET


def _tol(cfg: SuiteConfig, default: float) -> float:
    return default if cfg.tol is None else cfg.tol


def schur_orthogonality_residual(n: int) -> float:
    """``max | (1/n!) sum_s g(s)_{ji} g(s)_{j'i'} - delta delta / m |`` over all ``lambda |- n``."""
    worst = 0.0
    size = math.factorial(n)
    for lam in partitions(n):
        g = irrep_matrices(tuple(lam))
        m = g.shape[1]
        avg = np.einsum("sji,skl->jikl", g, g) / size
        target = np.einsum("jk,il->jikl", np.eye(m), np.eye(m)) / m
        worst = max(worst, float(np.abs(avg - target).max()))
    return worst


def schur_covariance_residuals(n: int, d: int, samples: int, rng) -> tuple[float, float, float]:
    """``(unitarity, permutation covariance, unitary covariance)`` residuals."""
    st = schur_transform(n, d)
    u = st.unitary
    unit = float(np.abs(u @ u.T - np.eye(d**n)).max())
    perm = 0.0
    for sigma in all_permutations(n):
        target = block_diagonal_target_pi(st, sigma)
        perm = max(perm, float(np.abs(u @ permutation_action(sigma, d) @ u.T - target).max()))
    uni = 0.0
    for _ in range(samples):
        w = haar_unitary(d, rng)
        rotated = u @ tensor_power(w, n) @ u.T
        target = np.zeros_like(rotated)
        for lam, (off, dl, m) in st.blocks.items():
            rows = off + np.arange(dl) * m
            f = rotated[np.ix_(rows, rows)]
            sl = slice(off, off + dl * m)
            target[sl, sl] = np.kron(f, np.eye(m))
        uni = max(uni, float(np.abs(rotated - target).max()))
    return unit, perm, uni


def _children(seed: int, count: int):
    return [np.random.default_rng(c) for c in np.random.SeedSequence(seed).spawn(count)]


def suite_schur(cfg: SuiteConfig) -> list[Check]:
    tol = _tol(cfg, 1e-9)
    grid = [(cfg.n, cfg.d or 2)] if cfg.n else [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)]
    out = []
    for (n, d), rng in zip(grid, _children(cfg.seed, len(grid))):
        if d**n > cfg.budget:
            out.append(Check(f"schur n={n} d={d}", float("nan"), tol, False, "skipped: size budget"))
            continue
        unit, perm, uni = schur_covariance_residuals(n, d, 50, rng)
        out.append(_check(f"schur unitarity n={n} d={d}", unit, tol))
        out.append(_check(f"schur permutation covariance n={n} d={d}", perm, tol))
        out.append(_check(f"schur unitary covariance n={n} d={d}", uni, tol, "50 Haar samples"))
        proj = max(float(np.abs(young_projector_character(lam, d) - young_projector_schur(lam, d)).max()) for lam in partitions(n))
        out.append(_check(f"young projector agreement n={n} d={d}", proj, tol))
    return out


def suite_qft(cfg: SuiteConfig) -> list[Check]:
    tol = _tol(cfg, 1e-10)
    ns = [cfg.n] if cfg.n else [2, 3, 4, 5]
    out = []
    for n in ns:
        q = qft_sn(n)
        out.append(_check(f"qft unitarity n={n}", np.abs(q @ q.T - np.eye(q.shape[0])).max(), tol))
        out.append(_check(f"schur orthogonality n={n}", schur_orthogonality_residual(n), tol))
        worst = 0.0
        perms = all_permutations(n)
        for lam in partitions(n):
            g = irrep_matrices(tuple(lam))
            for a in range(0, len(perms), max(1, len(perms) // 12)):
                for b in range(0, len(perms), max(1, len(perms) // 12)):
                    prod = perms[a] * perms[b]
                    worst = max(worst, float(np.abs(g[a] @ g[b] - g[permutation_index(prod)]).max()))
        out.append(_check(f"young orthogonal homomorphism n={n}", worst, tol))
    return out


def suite_kronecker(cfg: SuiteConfig) -> list[Check]:
    tol = _tol(cfg, 1e-9)
    ns = [cfg.n] if cfg.n else [2, 3, 4]
    out = []
    for n in ([cfg.n] if cfg.n else [2, 3, 4, 5]):
        worst = 0
        for mu in partitions(n):
            for nu in partitions(n):
                total = sum(sym_dim(lam) * kronecker_coefficient(mu, nu, lam) for lam in partitions(n))
                worst = max(worst, abs(total - sym_dim(mu) * sym_dim(nu)))
        out.append(_check(f"kronecker dimension sum n={n}", worst, 0.0, "exact integers"))
    for n in ns:
        cov = max(covariance_residual(kronecker_transform(mu, nu)) for mu in partitions(n) for nu in partitions(n))
        out.append(_check(f"kronecker covariance n={n}", cov, tol))
        rel = 0.0
        for lam in partitions(n):
            for mu in partitions(n):
                for nu in partitions(n):
                    if kronecker_coefficient(mu, nu, lam):
                        rel = max(rel, cg_coefficient_relation_check(lam, mu, nu))
        out.append(_check(f"cg coefficient relation n={n}", rel, tol, "after multiplicity canonicalization"))
        for variant in ("canonical", "relation"):
            gate = controlled_kronecker_gate(n, variant)
            out.append(_check(f"controlled kronecker gate ({variant}) unitarity n={n}", np.abs(gate @ gate.T - np.eye(gate.shape[0])).max(), tol))
    return out


def _reports_to_checks(reports) -> list[Check]:
    out = []
    for rep in reports:
        params = ",".join(f"{k}={v}" for k, v in rep.params.items())
        out.append(Check(f"{rep.construction} {params}", rep.residual, rep.tolerance, rep.passed, f"target: {rep.target}"))
    return out


def suite_purification(cfg: SuiteConfig) -> list[Check]:
    grid = [(cfg.n, cfg.d or 2, cfg.rank or 2)] if cfg.n else None
    return _reports_to_checks(circuits.verify("thm1", grid, seed=cfg.seed, tol=_tol(cfg, 1e-8)))


def _xi_grid(cfg: SuiteConfig):
    if cfg.n or cfg.rank or cfg.d_in or cfg.d_out:
        return [(cfg.d_in or 2, cfg.d_out or 2, cfg.rank or 2, cfg.n or 2)]
    return None


def suite_dilation(cfg: SuiteConfig) -> list[Check]:
    grid = _xi_grid(cfg)
    out = _reports_to_checks(circuits.verify("thm2", grid, seed=cfg.seed, tol=_tol(cfg, 1e-8)))
    lift_grid = None if grid is None else [g for g in grid if g[3] <= 2]
    if lift_grid != []:
        out += _reports_to_checks(circuits.verify("thm3", lift_grid, seed=cfg.seed, tol=_tol(cfg, 1e-8)))
    return out


def suite_dilation_kronecker(cfg: SuiteConfig) -> list[Check]:
    grid = _xi_grid(cfg)
    out = _reports_to_checks(circuits.verify("thm2-kronecker", grid, seed=cfg.seed, tol=_tol(cfg, 1e-8)))
    return out + _reports_to_checks(circuits.verify("fig3-vs-fig2a", grid, seed=cfg.seed, tol=_tol(cfg, 1e-8)))


def suite_petz(cfg: SuiteConfig, samples: int = 50) -> list[Check]:
    tol = _tol(cfg, 1e-9)
    grid = [(cfg.d_out * cfg.rank, cfg.d_out, cfg.rank)] if (cfg.d_out and cfg.rank) else [(2, 2, 1), (4, 2, 2)]
    out = []
    for (d_in, d_out, r), rng in zip(grid, _children(cfg.seed, len(grid))):
        agree = cptp = 0.0
        for _ in range(samples):
            # Lambda = Tr_E o U with U Haar on C^r (x) C^d_out satisfies Lambda(pi) = pi
            u = haar_unitary(d_in, rng)
            kraus = u.reshape(r, d_out, d_in)
            lam = QuantumChannel.from_kraus(kraus)
            rec = petz_recovery(lam)
            agree = max(agree, float(np.abs(rec.choi - petz_general(lam).choi).max()))
            tp = np.abs(np.einsum("iaja->ij", rec.choi.reshape(d_out, d_in, d_out, d_in)) - np.eye(d_out)).max()
            cptp = max(cptp, float(tp), float(-min(0.0, np.linalg.eigvalsh(rec.choi).min())))
        out.append(_check(f"petz formula agreement d_in={d_in} d_out={d_out} r={r}", agree, tol, f"{samples} channels"))
        out.append(_check(f"petz CPTP d_in={d_in} d_out={d_out} r={r}", cptp, tol))
    return out


def suite_comb(cfg: SuiteConfig) -> list[Check]:
    tol = _tol(cfg, 1e-8)
    out = []
    rngs = _children(cfg.seed, 3)
    comb = circuits.random_test_comb([(2, 2), (2, 2)], [2], [2, 2], rngs[0])
    out.append(Check("comb causality accepted", 0.0, tol, is_valid_comb(comb)))
    wrong = permute_systems(comb.choi, comb.dims, [1, 0, 2, 3])
    corrupted = Comb(comb.teeth, wrong)
    out.append(Check("comb causality rejects swapped wires", 0.0, tol, not is_valid_comb(corrupted)))
    pur = comb_purify(comb)
    out.append(_check("comb purification trace", np.abs(pur.traced() - comb.choi).max(), tol))
    grid = [(2, cfg.n)] if cfg.n else None
    out += _reports_to_checks(circuits.verify("thm7", grid, seed=cfg.seed, tol=_tol(cfg, 1e-7)))
    return out


SUITES: dict[str, Callable[[SuiteConfig], list[Check]]] = {
    "schur": suite_schur,
    "qft": suite_qft,
    "kronecker": suite_kronecker,
    "purification": suite_purification,
    "dilation": suite_dilation,
    "dilation-kronecker": suite_dilation_kronecker,
    "petz": suite_petz,
    "comb": suite_comb,
}


def run_suite(name: str, cfg: SuiteConfig) -> list[Check]:
    if name == "all":
        return [c for key in SUITES for c in SUITES[key](cfg)]
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](cfg)
