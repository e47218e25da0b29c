"""
qdpi - command-line front end for the quantum data-processing toolkit.

    qdpi compute entropy --state mixed2
    qdpi check dpi --channel1 "id(2)" --channel2 "twopauli(0.5)" --ensemble mm2 --format json
    qdpi fuzz --inequality lindblad --trials 100 --seed 7
    qdpi replay --inequality sdpi --seed 7 --trial 12
    qdpi replay --inequality sdpi --instance '{"seed": 7, "trial": 12, "dims": [2], ...}'
    qdpi sweep-two-pauli --steps 11 --out sweep.csv
    qdpi parse "mix(0.3, erase(2), id(2))"

Exit codes: 0 success, 1 validation or usage error, 2 I/O error,
3 violation of a theorem-backed inequality under --strict.
"""

import argparse
import json
import sys
from contextlib import contextmanager
from typing import IO, Iterator, Optional, Sequence, Tuple

import structlog
from pydantic import ValidationError

from app.config import settings
from app.errors import InvalidInputError, QDPIError
from app.schemas.quantum import is_infinite
from app.schemas.reports import FuzzSettings, OptimizerSettings
from app.services import compute_service, expression_service, inequality_service
from app.services.inequality_service import THEOREM_BACKED, Inequality
from app.utils import formats
from app.utils.logger import configure_logging

logger = structlog.get_logger()

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2
EXIT_VIOLATION = 3


class UsageError(Exception):
    """Raised instead of argparse's own exit so usage errors map to exit code 1."""


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _dims(text: str) -> Tuple[int, ...]:
    try:
        dims = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"dimensions must be comma-separated integers, got '{text}'")
    if not dims or any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError(f"dimensions must be positive, got '{text}'")
    return dims


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=settings.default_seed, help="campaign / optimizer seed")
    common.add_argument("--tol", type=float, default=None, help="tolerance (default depends on the check)")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--strict", action="store_true", help="exit 3 on theorem-backed violations")
    common.add_argument("--log-level", default=None, help="log level for the stderr log stream")

    budget = ArgumentParser(add_help=False)
    budget.add_argument("--grid-points", type=int, default=settings.grid_points, help="qubit sphere grid size")
    budget.add_argument("--random-starts", type=int, default=settings.random_starts, help="random starts for d > 2")
    budget.add_argument("--refine-starts", type=int, default=settings.refine_starts, help="starts refined locally")
    budget.add_argument(
        "--coordinate-iterations", type=int, default=settings.coordinate_iterations, help="descent steps per start"
    )
    budget.add_argument(
        "--refinement-rounds", type=int, default=settings.refinement_rounds, help="golden-section rounds per start"
    )

    inputs = ArgumentParser(add_help=False)
    inputs.add_argument("--channel", help="channel expression")
    inputs.add_argument("--channel1", help="first channel expression")
    inputs.add_argument("--channel2", help="second channel expression")
    inputs.add_argument("--ensemble", help="ensemble name or JSON path")

    parser = ArgumentParser(prog="qdpi", description="Quantum data-processing inequality toolkit")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    compute = commands.add_parser("compute", parents=[common, budget, inputs], help="compute one quantity")
    compute.add_argument("quantity", choices=[q.value for q in compute_service.Quantity])
    compute.add_argument("--state", help="state name or JSON path")
    compute.add_argument("--state2", help="second state for relent")
    compute.set_defaults(handler=cmd_compute)

    check = commands.add_parser("check", parents=[common, budget, inputs], help="check one inequality instance")
    check.add_argument("inequality", help="lindblad, jointconv, dpi, chanconv, slindblad, sdpi, ...")
    for flag in ("--state1", "--state2", "--sigma1", "--sigma2"):
        check.add_argument(flag, help="state name or JSON path")
    check.add_argument("--c", type=float, default=None, help="mixing weight")
    check.set_defaults(handler=cmd_check)

    fuzz = commands.add_parser("fuzz", parents=[common, budget], help="run a seeded fuzz campaign")
    fuzz.add_argument("--inequality", required=True)
    fuzz.add_argument("--trials", type=int, default=100)
    fuzz.add_argument("--dims", type=_dims, default=(2,), help="comma-separated dimensions, e.g. 2,3")
    fuzz.set_defaults(handler=cmd_fuzz)

    replay = commands.add_parser("replay", parents=[common, budget], help="re-run one fuzz trial")
    replay.add_argument("--inequality", required=True)
    replay.add_argument("--trial", type=int, default=None)
    replay.add_argument("--instance", default=None, help="instance descriptor (JSON) copied from a report")
    replay.add_argument("--dims", type=_dims, default=(2,))
    replay.set_defaults(handler=cmd_replay)

    sweep = commands.add_parser("sweep-two-pauli", parents=[common, budget], help="tabulate c(S) of the two-Pauli channel")
    sweep.add_argument("--start", type=float, default=0.0)
    sweep.add_argument("--end", type=float, default=1.0)
    sweep.add_argument("--steps", type=int, default=11)
    sweep.set_defaults(handler=cmd_sweep)

    parse = commands.add_parser("parse", parents=[common], help="syntax-check a channel expression")
    parse.add_argument("expression")
    parse.set_defaults(handler=cmd_parse)

    return parser


@contextmanager
def _output(path: Optional[str]) -> Iterator[IO[str]]:
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as f:
        yield f


def _budget(args: argparse.Namespace) -> OptimizerSettings:
    return OptimizerSettings(
        grid_points=args.grid_points,
        random_starts=args.random_starts,
        refine_starts=args.refine_starts,
        coordinate_iterations=args.coordinate_iterations,
        refinement_rounds=args.refinement_rounds,
        seed=args.seed,
    )


def _channel(text: Optional[str]):
    return None if text is None else expression_service.channel_from_text(text)


def _state(name: Optional[str]):
    return None if name is None else formats.resolve_state(name)


def _ensemble(name: Optional[str]):
    return None if name is None else formats.resolve_ensemble(name)


def cmd_compute(args: argparse.Namespace) -> int:
    value, details = compute_service.compute(
        args.quantity,
        state=_state(args.state),
        state2=_state(args.state2),
        ensemble=_ensemble(args.ensemble),
        channel=_channel(args.channel),
        budget=_budget(args),
    )
    with _output(args.out) as out:
        if args.format == "json":
            document = {"quantity": args.quantity, "value": str(value) if is_infinite(value) else value, "details": details}
            out.write(json.dumps(document) + "\n")
        else:
            out.write(formats.format_number(value) + "\n")
    return EXIT_OK


def _strict_exit(args: argparse.Namespace, inequality: Inequality, violations: int) -> int:
    if args.strict and inequality in THEOREM_BACKED and violations:
        logger.warning("Strict mode violation", inequality=inequality.value, violations=violations)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    inequality = inequality_service.resolve_inequality(args.inequality)
    report = inequality_service.run_check(
        inequality,
        channel=_channel(args.channel),
        channel1=_channel(args.channel1),
        channel2=_channel(args.channel2),
        state1=_state(args.state1),
        state2=_state(args.state2),
        sigma1=_state(args.sigma1),
        sigma2=_state(args.sigma2),
        ensemble=_ensemble(args.ensemble),
        c=args.c,
        tol=args.tol,
        budget=_budget(args),
    )
    with _output(args.out) as out:
        formats.ReportWriter(out, args.format).write(report)
    return _strict_exit(args, inequality, int(not report.satisfied))


def cmd_fuzz(args: argparse.Namespace) -> int:
    campaign = FuzzSettings(inequality=args.inequality, trials=args.trials, dims=args.dims, seed=args.seed, tol=args.tol)
    inequality = inequality_service.resolve_inequality(campaign.inequality)
    with _output(args.out) as out:
        writer = formats.ReportWriter(out, args.format)
        summary, _ = inequality_service.fuzz(campaign, _budget(args), on_report=writer.write)
    sys.stderr.write(summary.model_dump_json() + "\n")
    return _strict_exit(args, inequality, summary.violations)


def _descriptor(text: str) -> dict:
    try:
        descriptor = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"--instance is not valid JSON: {e}") from None
    if not isinstance(descriptor, dict):
        raise InvalidInputError("--instance must be a JSON object")
    return descriptor


def cmd_replay(args: argparse.Namespace) -> int:
    if args.instance is not None:
        report = inequality_service.replay_instance(args.inequality, _descriptor(args.instance), args.tol)
    elif args.trial is None:
        raise InvalidInputError("replay needs --trial or --instance")
    else:
        report = inequality_service.replay(args.inequality, args.seed, args.trial, args.dims, args.tol, _budget(args))
    with _output(args.out) as out:
        formats.ReportWriter(out, args.format).write(report)
    return _strict_exit(args, inequality_service.resolve_inequality(args.inequality), int(not report.satisfied))


def cmd_sweep(args: argparse.Namespace) -> int:
    rows = compute_service.sweep_two_pauli(args.start, args.end, args.steps, _budget(args))
    with _output(args.out) as out:
        formats.write_sweep(rows, out, args.format)
    return EXIT_OK


def cmd_parse(args: argparse.Namespace) -> int:
    expr = expression_service.parse_channel(args.expression)
    canonical = expression_service.format_channel(expr)
    with _output(args.out) as out:
        if args.format == "json":
            dim_in, dim_out = expr.dims
            out.write(json.dumps({"canonical": canonical, "dim_in": dim_in, "dim_out": dim_out}) + "\n")
        else:
            out.write(canonical + "\n")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        sys.stderr.write(f"qdpi: error: {e}\n")
        return EXIT_INVALID
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except (QDPIError, ValidationError) as e:
        logger.error("Command failed", command=args.command, error=str(e))
        sys.stderr.write(f"qdpi: error: {e}\n")
        return EXIT_INVALID
    except OSError as e:
        logger.error("I/O failure", command=args.command, error=str(e))
        sys.stderr.write(f"qdpi: error: {e}\n")
        return EXIT_IO


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
