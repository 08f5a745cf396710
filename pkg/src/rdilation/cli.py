"""``rdilation`` command line.

Commands::

    rdilation dims --n N --d D
    rdilation kronecker --n N
    rdilation verify SUITE [--n --d --d-in --d-out --rank --seed --tol --budget --out]
    rdilation dump {schur,qft,cg} [--n --d --mu --nu --out]

Exit codes: 0 when every check passes, 1 when any check fails, 2 for usage
or configuration errors (including exceeding the size budget).

All randomness in ``verify`` descends from ``--seed`` (default 0): each suite
spawns child streams from ``numpy.random.SeedSequence(seed)`` in a fixed order.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from typing import Sequence, TextIO

import numpy as np

from . import __version__
from .circuits import DEFAULT_BUDGET
from .combinatorics import Partition, dimension_table, partitions
from .errors import RDilationError, SizeBudgetError
from .kronecker import kronecker_coefficient, kronecker_transform
from .schur import ORDERING_VERSION, schur_transform
from .suites import SUITES, SuiteConfig, run_suite
from .symrep import qft_labels, qft_sn

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUITE_NAMES = list(SUITES) + ["all"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _partition(text: str) -> Partition:
    try:
        return Partition.parse(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"bad partition {text!r}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rdilation", description="Random purification and dilation toolkit")
    parser.add_argument("--version", action="version", version=f"rdilation {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, *, n_required=False):
        p.add_argument("--n", type=_positive_int, required=n_required)
        p.add_argument("--budget", type=_positive_int, default=DEFAULT_BUDGET)
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("dims", help="print m_lambda and d_lambda for all lambda |- n")
    common(p, n_required=True)
    p.add_argument("--d", type=_positive_int, required=True)

    p = sub.add_parser("kronecker", help="print the nonzero Kronecker coefficients for n")
    common(p, n_required=True)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=SUITE_NAMES)
    common(p)
    p.add_argument("--d", type=_positive_int)
    p.add_argument("--d-in", type=_positive_int)
    p.add_argument("--d-out", type=_positive_int)
    p.add_argument("--rank", type=_positive_int)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--tol", type=_positive_float)

    p = sub.add_parser("dump", help="write a transform as a matrix plus label map")
    p.add_argument("object", choices=["schur", "qft", "cg"])
    common(p, n_required=True)
    p.add_argument("--d", type=_positive_int, default=2)
    p.add_argument("--mu", type=_partition)
    p.add_argument("--nu", type=_partition)
    return parser


def _label(p: Sequence[int]) -> str:
    return "[" + ",".join(str(x) for x in p) + "]"


def _table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [list(map(str, header))] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(header))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells) + "\n"


def _check_n(n: int, budget: int) -> None:
    if math.factorial(n) > budget:
        raise SizeBudgetError(f"n! = {math.factorial(n)} exceeds the size budget {budget}")


def cmd_dims(n: int, d: int, fmt: str = "text", budget: int = DEFAULT_BUDGET) -> str:
    _check_n(n, budget)
    rows = dimension_table(n, d)
    if fmt == "json":
        data = [{"lambda": list(lam), "m": m, "d": dl} for lam, m, dl in rows]
        return json.dumps({"n": n, "d": d, "rows": data}, sort_keys=True) + "\n"
    return _table(["lambda", "m_lambda", "d_lambda"], [(_label(lam), m, dl) for lam, m, dl in rows])


def cmd_kronecker(n: int, fmt: str = "text", budget: int = DEFAULT_BUDGET) -> str:
    _check_n(n, budget)
    parts = partitions(n)
    rows = [(mu, nu, lam, kronecker_coefficient(mu, nu, lam)) for mu in parts for nu in parts for lam in parts]
    if fmt == "json":
        data = [{"mu": list(mu), "nu": list(nu), "lambda": list(lam), "g": g} for mu, nu, lam, g in rows]
        return json.dumps({"n": n, "rows": data}, sort_keys=True) + "\n"
    return _table(["mu", "nu", "lambda", "g"], [(_label(a), _label(b), _label(c), g) for a, b, c, g in rows])


def cmd_verify(suite: str, cfg: SuiteConfig) -> tuple[int, dict]:
    if suite not in SUITE_NAMES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITE_NAMES)}")
    start = time.perf_counter()
    checks = run_suite(suite, cfg)
    runtime_ms = (time.perf_counter() - start) * 1000.0
    params = {k: getattr(cfg, k) for k in ("n", "d", "d_in", "d_out", "rank", "tol", "budget")}
    report = {
        "suite": suite,
        "params": params,
        "seed": cfg.seed,
        "tool_version": __version__,
        "checks": [c.to_dict() for c in checks],
        "total_runtime_ms": round(runtime_ms, 3),
    }
    code = EXIT_OK if checks and all(c.passed for c in checks) else EXIT_FAIL
    return code, report


def format_report_text(report: dict) -> str:
    lines = [f"suite {report['suite']} seed {report['seed']} (rdilation {report['tool_version']})"]
    for c in report["checks"]:
        status = "PASS" if c["pass"] else "FAIL"
        note = f"  [{c['note']}]" if c["note"] else ""
        lines.append(f"{status}  {c['name']}  residual={c['residual']:.3e}  tol={c['tolerance']:.1e}{note}")
    passed = sum(c["pass"] for c in report["checks"])
    lines.append(f"{passed}/{len(report['checks'])} checks passed in {report['total_runtime_ms'] / 1000:.2f} s")
    return "\n".join(lines) + "\n"


def write_dump(stream: TextIO, obj: str, dims: dict, matrix: np.ndarray, label_header: Sequence[str], labels: Sequence) -> None:
    """Dump format.

    ``#``-prefixed header lines (object, dims, ordering, shape), then one
    matrix row per line as ``re im`` pairs separated by spaces, then a
    ``# labels`` line followed by ``#``-prefixed label rows.
    """
    rows, cols = matrix.shape
    stream.write(f"# object: {obj}\n")
    stream.write("# dims: " + " ".join(f"{k}={v}" for k, v in dims.items()) + "\n")
    stream.write(f"# ordering: {ORDERING_VERSION}\n")
    stream.write(f"# shape: {rows} {cols}\n")
    for row in np.asarray(matrix, dtype=complex):
        stream.write(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row) + "\n")
    stream.write("# labels: " + " ".join(label_header) + "\n")
    for k, lab in enumerate(labels):
        stream.write("# " + " ".join([str(k)] + [_label(x) if isinstance(x, tuple) else str(x) for x in lab]) + "\n")


def read_dump(stream: TextIO) -> tuple[dict, np.ndarray, list[list[str]]]:
    """Parse :func:`write_dump` output into ``(header, matrix, label rows)``."""
    header, rows, labels, in_labels = {}, [], [], False
    for line in stream:
        line = line.rstrip("\n")
        if line.startswith("# labels:"):
            in_labels = True
            header["labels"] = line.split(":", 1)[1].split()
        elif line.startswith("#") and in_labels:
            labels.append(line[1:].split())
        elif line.startswith("#"):
            key, _, value = line[1:].partition(":")
            header[key.strip()] = value.strip()
        elif line.strip():
            vals = np.array(line.split(), dtype=float)
            rows.append(vals[0::2] + 1j * vals[1::2])
    return header, np.array(rows), labels


def cmd_dump(obj: str, n: int, d: int, mu, nu, budget: int, stream: TextIO) -> None:
    if obj == "schur":
        st = schur_transform(n, d, budget)
        write_dump(stream, "schur", {"n": n, "d": d}, st.unitary, ["row", "lambda", "u", "i"], st.labels)
    elif obj == "qft":
        _check_n(n, budget)
        labels = qft_labels(n)
        write_dump(stream, "qft", {"n": n}, qft_sn(n), ["row", "lambda", "i", "j"], labels)
    else:
        _check_n(n, budget)
        if mu is None or nu is None:
            raise UsageError("dump cg needs --mu and --nu")
        if sum(mu) != n or sum(nu) != n:
            raise UsageError(f"--mu and --nu must be partitions of {n}")
        kt = kronecker_transform(mu, nu)
        dims = {"n": n, "mu": _label(mu), "nu": _label(nu)}
        write_dump(stream, "cg", dims, kt.unitary, ["row", "lambda", "i", "a"], kt.labels)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"rdilation: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "dims":
            _emit(cmd_dims(args.n, args.d, args.format, args.budget), args.out)
            return EXIT_OK
        if args.command == "kronecker":
            _emit(cmd_kronecker(args.n, args.format, args.budget), args.out)
            return EXIT_OK
        if args.command == "dump":
            if args.out is None:
                cmd_dump(args.object, args.n, args.d, args.mu, args.nu, args.budget, sys.stdout)
            else:
                with open(args.out, "w", encoding="utf-8") as fh:
                    cmd_dump(args.object, args.n, args.d, args.mu, args.nu, args.budget, fh)
            return EXIT_OK
        cfg = SuiteConfig(
            n=args.n, d=args.d, d_in=args.d_in, d_out=args.d_out, rank=args.rank,
            seed=args.seed, tol=args.tol, budget=args.budget,
        )
        code, report = cmd_verify(args.suite, cfg)
        if args.out is not None:
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump(report, fh, sort_keys=True, indent=2)
                fh.write("\n")
        if args.format == "json":
            sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
        else:
            sys.stdout.write(format_report_text(report))
        return code
    except (UsageError, SizeBudgetError) as exc:
        print(f"rdilation: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RDilationError as exc:
        print(f"rdilation: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
