"""Command-line front end.

Subcommands: ``decide`` (run the protocol on two state files), ``reduce``
(partial trace), ``refform`` (reference form and diagonalizers), ``gen``
(seeded random states, optionally with an LU-conjugated partner).

Exit codes: 0 equivalent / success, 1 usage or I/O error, 2 invalid state
(with the violated invariant named), 3 not equivalent, 4 undecided. Exit
codes and --json output are the stable interface; human-readable text is not.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .errors import InvalidStateError, LueqError
from .oracle import random_local_unitary, random_state
from .protocol import DecisionConfig, apply_local_unitary, decide_lu_equivalence
from .reduction import partial_trace
from .reference_form import qubit_diagonalizers, reference_form
from .stateio import dumps, parse_state, pure_state_document, state_document

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID_STATE = 2
EXIT_NOT_EQUIVALENT = 3
EXIT_UNDECIDED = 4


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract here is exit 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(_fail(message))


def _fail(message: str, code: int = EXIT_USAGE) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SystemExit(_fail(f"cannot read {path}: {exc}"))
    try:
        return parse_state(text)
    except InvalidStateError as exc:
        raise SystemExit(_fail(str(exc), EXIT_INVALID_STATE))
    except ValueError as exc:
        raise SystemExit(_fail(f"{path}: {exc}"))


def _config_from(args) -> DecisionConfig:
    tol_verify = float(os.environ.get("LUEQ_TOL_VERIFY", DecisionConfig.tol_verify))
    if args.tol_verify is not None:
        tol_verify = args.tol_verify
    return DecisionConfig(
        tol_verify=tol_verify,
        eps_coefficient=args.tol_coef,
        oracle=args.oracle,
        oracle_budget=args.oracle_budget,
        seed=args.seed,
    )


def _cmd_decide(args) -> int:
    state_a = _load(args.file_a)
    state_b = _load(args.file_b)
    if state_a.n != state_b.n:
        return _fail(f"qubit counts differ: {state_a.n} vs {state_b.n}")
    verdict, trace = decide_lu_equivalence(state_a, state_b, _config_from(args))
    if args.json:
        report = {
            "verdict": verdict.status,
            "unitaries": (
                [[[ [float(x.real), float(x.imag)] for x in row] for row in u] for u in verdict.unitaries]
                if verdict.unitaries is not None
                else None
            ),
            "residual": verdict.residual,
            "witness": verdict.witness.to_dict() if verdict.witness else None,
            "reason": verdict.reason,
            "trace": trace.to_dict(),
        }
        print(dumps(report))
    else:
        print(f"verdict: {verdict.status}")
        if verdict.residual is not None:
            print(f"residual: {verdict.residual:.3e}")
        if verdict.witness is not None:
            print(f"witness: {verdict.witness.to_dict()}")
        if verdict.reason is not None:
            print(f"reason: {verdict.reason}")
        if verdict.unitaries is not None:
            for k, u in enumerate(verdict.unitaries, start=1):
                print(f"U{k}:")
                for row in u:
                    print("  " + "  ".join(f"{x.real:+.12f}{x.imag:+.12f}j" for x in row))
        if args.trace:
            for line in trace.steps:
                print(f"# {line}", file=sys.stderr)
    return {
        "equivalent": EXIT_OK,
        "not-equivalent": EXIT_NOT_EQUIVALENT,
        "undecided": EXIT_UNDECIDED,
    }[verdict.status]


def _cmd_reduce(args) -> int:
    state = _load(args.file)
    try:
        keep = tuple(int(tok) for tok in args.keep.split(",") if tok)
    except ValueError:
        return _fail(f"cannot parse keep list {args.keep!r}")
    try:
        reduced = partial_trace(state, keep)
    except LueqError as exc:
        return _fail(str(exc))
    print(dumps(state_document(reduced)))
    return EXIT_OK


def _cmd_refform(args) -> int:
    state = _load(args.file)
    diagonalizers = qubit_diagonalizers(state)
    ref = reference_form(state, diagonalizers)
    doc = {
        "state": state_document(ref),
        "diagonalizers": [
            [[[float(x.real), float(x.imag)] for x in row] for row in d] for d in diagonalizers
        ],
    }
    print(dumps(doc))
    return EXIT_OK


def _dominant_eigenvector(matrix: np.ndarray) -> np.ndarray:
    values, vectors = np.linalg.eigh(matrix)
    psi = vectors[:, -1]
    pivot = psi[np.argmax(np.abs(psi))]
    return psi * (abs(pivot) / pivot)


def _cmd_gen(args) -> int:
    try:
        state = random_state(args.n, args.rank, args.seed)
    except LueqError as exc:
        return _fail(str(exc))
    out = Path(args.out)
    if args.rank == 1:
        doc = pure_state_document(args.n, _dominant_eigenvector(state.matrix))
    else:
        doc = state_document(state)
    out.write_text(dumps(doc) + "\n")
    written = [str(out)]
    if args.apply_lu is not None:
        locals_ = random_local_unitary(args.n, args.apply_lu)
        partner = apply_local_unitary(state, locals_)
        partner_path = out.with_name(out.stem + "_lu" + out.suffix)
        partner_path.write_text(dumps(state_document(partner)) + "\n")
        unitary_path = out.with_name(out.stem + "_unitaries" + out.suffix)
        unitary_path.write_text(
            dumps([[[[float(x.real), float(x.imag)] for x in row] for row in u] for u in locals_]) + "\n"
        )
        written += [str(partner_path), str(unitary_path)]
    for path in written:
        print(path)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lueq", description="Local-unitary equivalence of n-qubit states.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-verify", type=float, default=None, help="verification tolerance")
    common.add_argument("--tol-coef", type=float, default=DecisionConfig.eps_coefficient)
    common.add_argument("--oracle", choices=("on", "off", "auto"), default="auto")
    common.add_argument("--oracle-budget", type=int, default=DecisionConfig.oracle_budget)
    common.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("decide", parents=[common], help="decide LU-equivalence of two states")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.add_argument("--trace", action="store_true", help="step log on stderr")
    p.set_defaults(fn=_cmd_decide)

    p = sub.add_parser("reduce", help="partial trace onto a qubit subset")
    p.add_argument("file")
    p.add_argument("--keep", required=True, help="comma-separated 1-based qubit labels")
    p.set_defaults(fn=_cmd_reduce)

    p = sub.add_parser("refform", help="reference form and diagonalizers")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_refform)

    p = sub.add_parser("gen", help="write seeded random state files")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--apply-lu", type=int, default=None, metavar="SEED2",
                   help="also write an LU-conjugated partner and its unitaries")
    p.add_argument("--out", default="state.json")
    p.set_defaults(fn=_cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except SystemExit as exc:  # raised by usage/IO/validation shortcuts
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except InvalidStateError as exc:
        return _fail(str(exc), EXIT_INVALID_STATE)
    except LueqError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
