"""Command-line front end.

Four subcommands: code-info (structural report), decode (single LP
decode of a noise vector), search (one seeded pseudo-codeword search),
spectrum (seeded batch with CSV output).  Exit codes: 0 success, 1 usage
error, 2 data error (unreadable alist or vector), 3 numerical failure.
All randomness is controlled by --seed; identical invocations produce
byte-identical output.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .codes import (
    AlistFormatError,
    CodeStructureError,
    ParityCheckMatrix,
    parse_alist,
    validate_code,
)
from .decoder import lp_decode
from .lpsolve import LpNumericalError, rational_snap
from .polytope import build_cone, build_ps, dump_lp_text
from .spectrum import (
    cumulative_spectrum,
    records_csv,
    run_trials,
    single_trial,
    spectrum_csv,
)

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="lpinstanton", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    info = sub.add_parser("code-info", help="structural report of an alist code")
    info.add_argument("--alist", required=True, help="path to an alist file")
    info.add_argument(
        "--no-girth", action="store_true", help="skip the girth computation"
    )

    dec = sub.add_parser("decode", help="LP-decode one noise vector")
    dec.add_argument("--alist", required=True)
    dec.add_argument(
        "--x",
        default="-",
        help="whitespace-separated reals, a file path or - for stdin",
    )
    dec.add_argument(
        "--dual", action="store_true", help="also compute the dual certificate"
    )
    dec.add_argument(
        "--emit-lp", metavar="PATH", help="dump the decoding polytope in LP text"
    )

    srch = sub.add_parser("search", help="one seeded pseudo-codeword search")
    srch.add_argument("--alist", required=True)
    srch.add_argument("--algo", required=True, choices=("moa", "pcs"))
    srch.add_argument("--seed", required=True, type=int)
    srch.add_argument("--deviation", type=float, default=None)
    srch.add_argument("--max-iter", type=int, default=100)
    srch.add_argument(
        "--emit-lp", metavar="PATH", help="dump the search polytope in LP text"
    )

    spec = sub.add_parser("spectrum", help="seeded batch of searches")
    spec.add_argument("--alist", required=True)
    spec.add_argument("--algo", required=True, choices=("moa", "pcs"))
    spec.add_argument("--trials", required=True, type=int)
    spec.add_argument("--seed", required=True, type=int)
    spec.add_argument("--deviation", type=float, default=None)
    spec.add_argument("--max-iter", type=int, default=100)
    spec.add_argument("--jobs", type=int, default=1)
    spec.add_argument("--out", required=True, help="per-trial records CSV path")
    spec.add_argument("--spectrum-out", help="cumulative spectrum CSV path")
    return parser


def _load_code(path: str) -> ParityCheckMatrix:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _DataError(f"cannot read alist file {path}: {exc}") from exc
    try:
        return parse_alist(text)
    except (AlistFormatError, CodeStructureError) as exc:
        raise _DataError(f"{path}: {exc}") from exc


def _read_vector(source: str, n: int) -> np.ndarray:
    if source == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise _DataError(f"cannot read vector from {source}: {exc}") from exc
    tokens = text.split()
    try:
        values = [float(t) for t in tokens]
    except ValueError as exc:
        raise _DataError(f"vector contains a non-numeric token: {exc}") from exc
    if len(values) != n:
        raise _DataError(f"vector has {len(values)} entries, code expects {n}")
    return np.asarray(values)


def _bool_csv(flag: bool) -> str:
    return "true" if flag else "false"


def _cmd_code_info(args) -> int:
    h = _load_code(args.alist)
    report = validate_code(h, with_girth=not args.no_girth)
    if report.regular is not None:
        reg = f"({report.regular[0]},{report.regular[1]})"
    else:
        reg = "none"
    line = (
        f"N={report.n_bits} M={report.n_checks} "
        f"rank={report.gf2_rank} dim={report.dimension} regular={reg}"
    )
    if report.girth is not None:
        line += f" girth={report.girth}"
    print(line)
    return 0


def _cmd_decode(args) -> int:
    h = _load_code(args.alist)
    x = _read_vector(args.x, h.n_bits)
    if args.emit_lp:
        Path(args.emit_lp).write_text(dump_lp_text(build_ps(h)))
    outcome = lp_decode(h, x, with_dual=args.dual)
    print("lp_value,correct")
    print(f"{outcome.lp_value!r},{_bool_csv(outcome.correct)}")
    if args.dual:
        print("dual_value")
        print(repr(outcome.dual.value))
    print("bit,beta")
    for i, v in enumerate(outcome.beta):
        print(f"{i},{float(v)!r}")
    return 0


def _cmd_search(args) -> int:
    h = _load_code(args.alist)
    if args.emit_lp:
        cs = build_cone(h) if args.algo == "moa" else build_ps(h)
        Path(args.emit_lp).write_text(dump_lp_text(cs))
    record, result = single_trial(
        h, args.algo, args.seed, 0, args.deviation, args.max_iter
    )
    if result is None:
        print("search failed numerically", file=sys.stderr)
        return 3
    snapped = rational_snap(build_cone(h), result.endpoint)
    print("weight,iterations,converged")
    print(f"{result.weight!r},{result.iterations},{_bool_csv(result.converged)}")
    print("bit,endpoint,endpoint_snapped,instanton")
    for i in range(h.n_bits):
        frac = ""
        if snapped is not None:
            frac = f"{snapped[i].numerator}/{snapped[i].denominator}"
        print(
            f"{i},{float(result.endpoint[i])!r},{frac},"
            f"{float(result.instanton[i])!r}"
        )
    return 0


def _cmd_spectrum(args) -> int:
    h = _load_code(args.alist)
    if args.trials < 1:
        raise _UsageError("--trials must be at least 1")
    if args.jobs < 1:
        raise _UsageError("--jobs must be at least 1")
    records = run_trials(
        h,
        args.algo,
        args.trials,
        args.seed,
        deviation=args.deviation,
        max_iter=args.max_iter,
        jobs=args.jobs,
    )
    Path(args.out).write_text(records_csv(records))
    converged = [r for r in records if r.converged]
    if args.spectrum_out:
        if not converged:
            print("no converged trials; spectrum not written", file=sys.stderr)
            return 3
        Path(args.spectrum_out).write_text(
            spectrum_csv(cumulative_spectrum(records))
        )
    min_w = min((r.weight for r in converged), default=float("nan"))
    print("trials,converged,min_weight")
    print(f"{args.trials},{len(converged)},{min_w!r}")
    return 0


_COMMANDS = {
    "code-info": _cmd_code_info,
    "decode": _cmd_decode,
    "search": _cmd_search,
    "spectrum": _cmd_spectrum,
}


def main(argv: "list[str] | None" = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except _DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except LpNumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except SystemExit as exc:  # argparse --help
        code = exc.code
        return int(code) if isinstance(code, int) else 0


if __name__ == "__main__":
    sys.exit(main())
