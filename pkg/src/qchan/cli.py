"""``qchan`` command line.

Exit codes: 0 success, 1 failed check or I/O error, 2 bad arguments or
unparseable channel file, 3 channel validation failure, 4 dimension mismatch.
With ``--json`` every outcome, errors included, is a single JSON document on
stdout.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__, bench, families, io, verify
from .channel import Channel, ChannelValidationError, validate
from .circuit import ShotPlan, estimate_superfidelity, exact_p0, required_register
from .metrics import REPORT_FIELDS, process_metrics
from .random import RandomSource

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_DIM = 4

PAPER_SIZE = 1_000_000


class CliError(Exception):
    def __init__(self, code: int, message: str, details: dict | None = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.details = details or {}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_USAGE, f"{self.prog}: {message}")


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    """Flags accepted both before and after the subcommand."""
    default = argparse.SUPPRESS if suppress else None
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS if suppress else False, help="machine-readable output")
    p.add_argument("--seed", type=_u64, default=default, help="random seed (unsigned 64-bit, default 0)")
    p.add_argument("--no-validate", dest="no_validate", action="store_true",
                   default=argparse.SUPPRESS if suppress else False, help="skip CP-TP validation of input channels")
    p.add_argument("--out", default=default, help="write the main output to this path")
    return p


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2^64)")
    return v


def _dims(text: str) -> list[int]:
    """``"2-9"``, ``"2,3,5"`` or ``"4"``."""
    try:
        if "-" in text:
            lo, hi = (int(x) for x in text.split("-", 1))
            return list(range(lo, hi + 1))
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension list {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qchan", description="Superfidelity-based distances between quantum channels.",
                     parents=[_global_flags(False)])
    parser.add_argument("--version", action="version", version=f"qchan {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    sub.required = True
    flags = _global_flags(True)

    p = sub.add_parser("metric", parents=[flags], help="all similarity and distance measures between two channel files")
    p.add_argument("file_a")
    p.add_argument("file_b")

    p = sub.add_parser("bench", parents=[flags], help="Monte-Carlo statistics over random channel pairs (CSV)")
    p.add_argument("--dims", type=_dims, default=list(range(2, 10)), help="e.g. 2-9 or 2,3,4 (default 2-9)")
    p.add_argument("--n-pairs", type=int, default=10_000, help="pairs per dimension (default 10000)")
    p.add_argument("--paper-size", action="store_true", help=f"use {PAPER_SIZE} pairs per dimension")
    p.add_argument("--k", type=int, default=None, help="Kraus rank of the sampled channels (default d^2)")

    p = sub.add_parser("verify", parents=[flags], help="run a verification suite")
    p.add_argument("suite", help=", ".join(verify.SUITES))
    p.add_argument("--n", type=int, default=None, help="override the number of random instances")

    p = sub.add_parser("circuit", parents=[flags], help="simulate SWAP-test estimation of the process superfidelity")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--shots", type=int, default=0, help="shots per experiment; 0 gives exact values")

    p = sub.add_parser("family", parents=[flags], help="write a named channel as Kraus JSON")
    p.add_argument("name", choices=io.FAMILY_NAMES)
    p.add_argument("params", nargs="+", help="depolarizing D P | werner_holevo D P | pauli D P00 P01 ... | dephasing F")
    return parser


# ----------------------------------------------------------------------------
# output helpers
# ----------------------------------------------------------------------------


def _emit(args, text: str | None, payload: dict | list | None, stream=None):
    stream = stream or sys.stdout
    if args.json:
        print(json.dumps(payload, indent=2), file=stream)
    elif text is not None:
        print(text, file=stream)


def _write_out(path: str, text: str):
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(EXIT_FAILED, f"cannot write {path}: {exc}")


def _load(path: str, check: bool) -> Channel:
    try:
        c = io.load(path)
    except io.ChannelSpecError as exc:
        raise CliError(EXIT_USAGE, f"{path}: {exc}")
    if check:
        report = validate(c)
        if not report.ok:
            raise CliError(EXIT_INVALID, f"{path}: channel is not CP-TP: {report.summary()}",
                           {"file": path, "defects": report.as_dict()})
    return c


def _load_pair(args):
    check = not args.no_validate
    a, b = _load(args.file_a, check), _load(args.file_b, check)
    if a.dim != b.dim:
        raise CliError(EXIT_DIM, f"dimension mismatch: {args.file_a} has dim {a.dim}, {args.file_b} has dim {b.dim}",
                       {"dim_a": a.dim, "dim_b": b.dim})
    return a, b


# ----------------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------------


def cmd_metric(args) -> int:
    a, b = _load_pair(args)
    report = process_metrics(a, b, validate=False)
    values = report.as_dict()
    width = max(len(k) for k in REPORT_FIELDS)
    text = "\n".join(f"{k:<{width}}  {values[k]:.15g}" for k in REPORT_FIELDS)
    payload = {"dim": a.dim, **values}
    if args.out:
        _write_out(args.out, json.dumps(payload, indent=2) + "\n")
    _emit(args, text, payload)
    return EXIT_OK


def cmd_bench(args) -> int:
    n = PAPER_SIZE if args.paper_size else args.n_pairs
    if n < 1:
        raise CliError(EXIT_USAGE, "--n-pairs must be >= 1")
    if args.out:
        _write_out(args.out, "")  # fail on an unwritable path before the long run
    try:
        dims = bench.check_dims(args.dims)
        stats = bench.run_bench(dims, n, seed=args.seed, k=args.k, log=sys.stderr)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc))
    csv_text = bench.format_csv(stats)
    if args.out:
        _write_out(args.out, csv_text)
    payload = [
        {"metric": s.metric, "dim": s.dim, "k": s.k, "seed": s.seed, "n_pairs": s.n_pairs,
         "mean": s.mean, "p5": s.p5, "p95": s.p95, "bins": list(s.bins)}
        for s in stats
    ]
    if args.json:
        _emit(args, None, {"out": args.out, "stats": payload})
    elif not args.out:
        sys.stdout.write(csv_text)
    else:
        print(f"wrote {len(stats)} rows to {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite not in verify.SUITES:
        raise CliError(EXIT_USAGE, f"unknown suite {args.suite!r}; choose from {', '.join(verify.SUITES)}")
    results = verify.run_suite(args.suite, n=args.n, seed=args.seed)
    passed = all(r.passed for r in results)
    lines = [r.line() for r in results]
    lines.append(f"{args.suite}: {'PASS' if passed else 'FAIL'} ({sum(r.passed for r in results)}/{len(results)})")
    payload = {"suite": args.suite, "passed": passed, "checks": [r.as_dict() for r in results]}
    if args.out:
        _write_out(args.out, json.dumps(payload, indent=2) + "\n")
    _emit(args, "\n".join(lines), payload)
    return EXIT_OK if passed else EXIT_FAILED


def cmd_circuit(args) -> int:
    if args.shots < 0:
        raise CliError(EXIT_USAGE, "--shots must be >= 0")
    a, b = _load_pair(args)
    plan = ShotPlan(args.shots, args.shots, args.shots, RandomSource(args.seed))
    rep = estimate_superfidelity(a, b, plan, validate=False)
    footprint = required_register(a.dim)
    payload = {"dim": a.dim, "p0": exact_p0(a, b, validate=False), **rep.as_dict(),
               "register": footprint.__dict__}
    rows = [
        ("overlap tr(rho_a rho_b)", rep.overlap_estimate, rep.se_overlap, rep.exact_overlap),
        ("purity a", rep.purity_a, rep.se_purity_a, rep.exact_purity_a),
        ("purity b", rep.purity_b, rep.se_purity_b, rep.exact_purity_b),
        ("superfidelity", rep.superfidelity_estimate, None, rep.exact_superfidelity),
    ]
    lines = [f"shots per experiment: {args.shots} (seed {args.seed})"]
    for name, est, se, exact in rows:
        se_text = "" if se is None else f" +/- {se:.3g}"
        lines.append(f"{name:<24} estimate {est:.10f}{se_text}   exact {exact:.10f}")
    lines.append(f"register: 1 control qubit + 4 subsystems of dim {a.dim} (total dimension {footprint.hilbert_dim})")
    if args.out:
        _write_out(args.out, json.dumps(payload, indent=2) + "\n")
    _emit(args, "\n".join(lines), payload)
    return EXIT_OK


def _family_channel(name: str, params: list[str]) -> Channel:
    def need(k):
        if len(params) != k:
            raise CliError(EXIT_USAGE, f"family {name} takes {k} parameter(s), got {len(params)}")

    try:
        if name in ("depolarizing", "werner_holevo"):
            need(2)
            d, p = int(params[0]), float(params[1])
            return families.depolarizing(d, p) if name == "depolarizing" else families.werner_holevo(d, p)
        if name == "pauli":
            d = int(params[0])
            need(1 + d * d)
            probs = [[float(params[1 + i * d + j]) for j in range(d)] for i in range(d)]
            return families.generalized_pauli(d, probs)
        need(1)
        text = params[0].strip()
        if text.startswith("["):
            return families.dephasing_qudit(io.decode_matrix(json.loads(text)))
        return families.dephasing_qubit(complex(text.replace(" ", "").replace("i", "j")))
    except (ValueError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_USAGE, f"invalid parameters for {name}: {exc}")


def cmd_family(args) -> int:
    c = _family_channel(args.name, args.params)
    text = io.dumps(c, "kraus", description=f"{args.name} {' '.join(args.params)}")
    if args.out:
        _write_out(args.out, text + "\n")
        if args.json:
            _emit(args, None, {"out": args.out, "dim": c.dim, "kraus_rank": len(c.kraus)})
        else:
            print(f"wrote {args.name} channel ({len(c.kraus)} Kraus operators) to {args.out}")
    else:
        print(text)
    return EXIT_OK


COMMANDS = {
    "metric": cmd_metric,
    "bench": cmd_bench,
    "verify": cmd_verify,
    "circuit": cmd_circuit,
    "family": cmd_family,
}


def _wants_json(argv) -> bool:
    return "--json" in argv


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        args.seed = 0 if args.seed is None else args.seed
        return COMMANDS[args.command](args)
    except CliError as exc:
        code, message, details = exc.code, exc.message, exc.details
    except ChannelValidationError as exc:
        code, message, details = EXIT_INVALID, str(exc), {"defects": exc.report.as_dict()}
    if _wants_json(argv):
        print(json.dumps({"error": message, "exit_code": code, **details}, indent=2))
    else:
        print(f"error: {message}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
