"""Command-line entry point.

Exit codes: 0 success, 1 I/O error, 2 input parse error, 3 hypothesis failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import dmod
from .foliation import check_lie_subalgebra
from .report import PHASES, AnalysisConfig, InputError, parse_field_file, run_analysis

EXIT_OK, EXIT_IO, EXIT_PARSE, EXIT_HYPOTHESIS = 0, 1, 2, 3


def _load(path):
    try:
        return parse_field_file(path), None
    except OSError as exc:
        print(f"error: cannot read {path}: {exc.strerror or exc}", file=sys.stderr)
        return None, EXIT_IO
    except InputError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return None, EXIT_PARSE


def cmd_analyze(config: AnalysisConfig) -> int:
    F, code = _load(config.input)
    if F is None:
        return code
    report = run_analysis(F, config)
    text = report.to_json()
    if config.output:
        try:
            with open(config.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {config.output}: {exc.strerror or exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    if report.hypothesis_failure:
        print(f"hypothesis failure: {report.hypothesis_failure}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    return EXIT_OK


def cmd_check(path) -> int:
    F, code = _load(path)
    if F is None:
        return code
    lie = check_lie_subalgebra(F)
    if not lie.closed:
        i, j = lie.failing_pair
        print(f"not a Lie subalgebra: bracket of generators {i} and {j} is {lie.bracket}, not in the module")
        return EXIT_HYPOTHESIS
    hyp = dmod.check_hypotheses(F)
    if not hyp.pairwise_commuting:
        i, j = hyp.failing_pair
        print(f"generators {i} and {j} do not commute: commutator {hyp.commutator}")
        return EXIT_HYPOTHESIS
    if not hyp.symbols_regular_sequence:
        print(
            f"symbols are not a regular sequence: dimension {hyp.symbol_ideal_dimension}, "
            f"expected {2 * F.n - F.r}"
        )
        return EXIT_HYPOTHESIS
    print("ok: Lie subalgebra, commuting generators, regular symbol sequence")
    return EXIT_OK


def _phases(text):
    items = [p.strip() for p in text.split(",") if p.strip()]
    bad = [p for p in items if p not in PHASES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown phase(s) {bad}; choose from {','.join(PHASES)}")
    return tuple(items)


def build_parser():
    parser = argparse.ArgumentParser(prog="dfoliation", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run the analyses and write a JSON report")
    a.add_argument("--input", required=True)
    a.add_argument("--truncation", type=int, default=6, help="highest filtration level (default 6)")
    a.add_argument("--koszul-cap", type=int, default=4)
    a.add_argument("--fi-cap", type=int, default=3, help="degree cap for first integrals")
    a.add_argument("--window", type=int, default=3, help="stabilization window")
    a.add_argument("--only", type=_phases, default=PHASES, help="comma-separated phases")
    a.add_argument("--output")

    c = sub.add_parser("check", help="Lie closure and commuting/regular-symbol hypotheses")
    c.add_argument("--input", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if args.command == "check":
        return cmd_check(args.input)
    try:
        config = AnalysisConfig(
            input=args.input,
            truncation=args.truncation,
            koszul_cap=args.koszul_cap,
            fi_cap=args.fi_cap,
            window=args.window,
            output=args.output,
            only=args.only,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return cmd_analyze(config)


if __name__ == "__main__":
    sys.exit(main())
