"""Command line entry point: ``interworld <command> ...``.

Exit codes: 0 success, 2 validation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import replace

from .decoherence import ScatteringChannel, decoherence_budget, phase_kick_summary, rest_gas_flux
from .drive import ExcitationModel
from .protocol import run_protocol, transmit_bits
from .report import emit_report, reproduce_paper_table, text_summary, to_csv
from .scenario import ScenarioError, ScenarioNotFoundError, parse_scenario

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 2, 3


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "text"], default=None,
                        help="output format (default: text on stdout, both with --out)")
    common.add_argument("--out", metavar="DIR", help="write report files into DIR")

    parser = argparse.ArgumentParser(prog="interworld", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("budget", parents=[common], help="decoherence-time table of a scenario")
    p.add_argument("scenario")

    p = sub.add_parser("run", parents=[common], help="protocol Monte Carlo")
    p.add_argument("scenario")
    p.add_argument("--model", choices=[m.value for m in ExcitationModel])
    p.add_argument("--seed", type=_seed)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("channel", parents=[common], help="send a bit string between worlds")
    p.add_argument("scenario")
    p.add_argument("--bits", required=True)
    p.add_argument("--model", choices=[m.value for m in ExcitationModel])
    p.add_argument("--seed", type=_seed)

    sub.add_parser("paper-table", parents=[common], help="reference decoherence and excitation numbers")

    p = sub.add_parser("trajectories", parents=[common], help="phase-kick ensemble against exp(-t/T)")
    p.add_argument("scenario")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--seed", type=_seed, default=0)
    return parser


def _override(scenario, args):
    if getattr(args, "model", None):
        scenario = replace(scenario, model=ExcitationModel(args.model))
    if getattr(args, "seed", None) is not None:
        scenario = replace(scenario, seed=args.seed)
    return scenario


def _build_report(args):
    if args.command == "paper-table":
        return reproduce_paper_table()
    scenario = _override(parse_scenario(args.scenario), args)
    if args.command == "budget":
        return decoherence_budget(scenario.trap, scenario.pulse)
    if args.command == "run":
        return run_protocol(scenario, workers=args.workers)
    if args.command == "channel":
        return transmit_bits(args.bits, scenario)
    channel = ScatteringChannel("rest gas", scenario.trap.elastic_cross_section_sigma_c, rest_gas_flux(scenario.trap))
    return phase_kick_summary(channel, args.n, seed=args.seed)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report = _build_report(args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        if args.out:
            formats = (args.format,) if args.format else ("csv", "text")
            for path in emit_report(report, args.out, formats):
                print(path)
        else:
            sys.stdout.write(to_csv(report) if args.format == "csv" else text_summary(report))
    except ScenarioNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
