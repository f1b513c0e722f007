"""Command line front end.

Exit codes: 0 PASS, 1 usage error, 2 budget error, 3 a constant-1
inequality was violated.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import BudgetError, ConfigurationError, RangeError
from .experiments import ExperimentConfig, UsageError, emit_report, load_report, run_experiment

log = logging.getLogger("bvsquares")

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_VIOLATION = 0, 1, 2, 3

SUBCOMMANDS = {
    "sieve": "sieve",
    "ap-error": "ap-error",
    "bv-average": "bv-average",
    "farey-count": "farey",
    "large-sieve": "large-sieve",
    "char-table": "char-table",
    "lemma7-toy": "lemma7-toy",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _common(p: argparse.ArgumentParser) -> None:
    # defaults are None so that only explicit flags override a config file
    p.add_argument("--config", type=Path, help="JSON file with ExperimentConfig fields")
    p.add_argument("--x", type=float, action="append", help="x value (repeatable)")
    p.add_argument("--theta", type=float, help="Q = x**theta")
    p.add_argument("--lambda", dest="lam", type=float, help="conductor scale x**lambda")
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", help="Delta as a rational, e.g. 1/10")
    p.add_argument("--g", type=int)
    p.add_argument("--Q", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--M", type=float, action="append", help="factor size (repeatable)")
    p.add_argument("--k", type=int, action="append", help="Riesz order (repeatable)")
    p.add_argument("--beta", help="target point as a rational")
    p.add_argument("--m", type=int, help="modulus")
    p.add_argument("--a", type=int, help="fixed reduced residue (default: worst case)")
    p.add_argument("--seed", type=int)
    p.add_argument("--cases", type=int, help="number of seeded cases")
    p.add_argument("--t-shift", dest="t_shift", type=float, help="imaginary part of s")
    p.add_argument("--family", choices=["one", "moebius", "mangoldt", "random", "log"])
    p.add_argument("--threads", type=int)
    p.add_argument("--out", type=Path, help="output file (default stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--timings", action="store_true", help="include wall time in the output")


FIELDS = ("x", "theta", "lam", "eps", "delta", "g", "Q", "N", "M", "k", "beta", "m", "a",
          "seed", "cases", "t_shift", "family", "threads")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bvsquares", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in SUBCOMMANDS:
        _common(sub.add_parser(name, help=f"run the {name} experiment"))
    rp = sub.add_parser("report", help="re-emit a saved JSON report")
    rp.add_argument("path", type=Path)
    rp.add_argument("--out", type=Path)
    rp.add_argument("--format", choices=["csv", "json"], default="csv")
    rp.add_argument("--timings", action="store_true")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    data = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"config: cannot read {args.config}: {exc}") from exc
        unknown = set(data) - set(FIELDS) - {"kind"}
        if unknown:
            raise UsageError(f"config: unknown field(s) {sorted(unknown)}")
    for name in FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            data[name] = v
    data["kind"] = SUBCOMMANDS[args.command]
    for key in ("x", "M", "k"):
        if key in data and not isinstance(data[key], (list, tuple)):
            data[key] = [data[key]]
    try:
        return ExperimentConfig(**data)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"config: {exc}") from exc


def _write(payload: bytes, out: Path | None) -> None:
    if out is None:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    else:
        out.write_bytes(payload)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "report":
            rep = load_report(args.path.read_bytes())
        else:
            cfg = config_from_args(args)
            rep = run_experiment(cfg)
            log.info("%s: %d rows in %.3fs", cfg.kind, len(rep.rows), rep.runtime)
        _write(emit_report(rep, args.format, args.timings), args.out)
    except BudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigurationError, RangeError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if rep.status != "PASS":
        print(f"inequality violated in {rep.violations} row(s)", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
