"""Command-line entry point: python -m app.cli [global flags] <command> [args]"""
import argparse
import json
import logging
import sys
from typing import List, Optional, Sequence

from pydantic import ValidationError

from app.config import DEFAULT_MAX_GEN, DEFAULT_MAY_BOUND, DEFAULT_PRIME, configure_logging
from app.exceptions import InvalidConfigError, S3CohomologyError
from app.ringstruct import FAIL
from app.schemas import RunConfig, SuiteReport
from app.verification_service import DEFAULT_GAMMA_S, run_suite, store_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m app.cli",
        description="Exact verification of the cohomology of the Morava stabilizer algebra S(3).",
    )
    parser.add_argument("--prime", type=int, default=DEFAULT_PRIME, help=f"odd prime p (default: {DEFAULT_PRIME})")
    parser.add_argument("--max-gen", type=int, default=DEFAULT_MAX_GEN,
                        help=f"largest t_i index used in S(3) (default: {DEFAULT_MAX_GEN})")
    parser.add_argument("--may-bound", type=int, default=DEFAULT_MAY_BOUND,
                        help=f"May filtration bound for class identification (default: {DEFAULT_MAY_BOUND})")
    parser.add_argument("--out", default=None, help="write the report here instead of stdout")
    parser.add_argument("--format", default="json", help="json or text (default: json)")
    parser.add_argument("--persist", action="store_true", help="store the run in the database")
    parser.add_argument("--dump-products", action="store_true", help="include the full product table")
    parser.add_argument("--log-level", default=None, help="override S3COH_LOG_LEVEL")

    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("cohomology", help="Betti numbers, named generators and the collapse certificate")
    commands.add_parser("relations", help="product relations of H*F(3) and H*F(2)")
    gamma = commands.add_parser("gamma", help="classes of the images of gamma_s")
    gamma.add_argument("s", type=int, nargs="*", default=list(DEFAULT_GAMMA_S))
    product = commands.add_parser("product", help="the product gamma_s beta zeta_3")
    product.add_argument("--n", type=int, required=True)
    product.add_argument("--s", type=int, required=True)
    commands.add_parser("verify-all", help="every suite in order")
    return parser


def render_text(report: SuiteReport) -> str:
    lines = [f"{report.suite} at p = {report.prime}: {report.status}"]
    if report.algebra_only:
        lines.append("algebra-only mode: topological statements are not asserted")
    for check in report.checks:
        lines.append(f"  [{check.status:>11}] {check.check_id}  ({check.anchor})")
        if check.status != "pass":
            lines.append(f"                {json.dumps(check.details, sort_keys=True, default=str)}")
    return "\n".join(lines) + "\n"


def render(report: SuiteReport, fmt: str) -> str:
    if fmt == "text":
        return render_text(report)
    return json.dumps(report.model_dump(), indent=2, sort_keys=True, default=str) + "\n"


def persist(report: SuiteReport, config: RunConfig) -> None:
    from app.database import SessionLocal, init_db

    init_db()
    db = SessionLocal()
    try:
        store_report(db, report, config)
    finally:
        db.close()


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)

    try:
        config = RunConfig(
            prime=args.prime,
            max_gen=args.max_gen,
            may_bound=args.may_bound,
            out=args.out,
            format=args.format,
            persist=args.persist,
            dump_products=args.dump_products,
        )
    except ValidationError as err:
        print(f"[error] invalid configuration: {err}", file=sys.stderr)
        return EXIT_INVALID

    if config.algebra_only:
        print(f"[warning] p = {config.prime} < 7: running in algebra-only mode", file=sys.stderr)

    gamma_s: List[int] = args.s if args.command == "gamma" else list(DEFAULT_GAMMA_S)
    if any(s < 1 for s in gamma_s):
        print("[error] gamma indices must be positive", file=sys.stderr)
        return EXIT_INVALID
    cases = [(args.n, args.s)] if args.command == "product" else None

    try:
        if cases is not None:
            report = run_suite(config, args.command, gamma_s, cases)
        else:
            report = run_suite(config, args.command, gamma_s)
    except InvalidConfigError as err:
        print(f"[error] {err}", file=sys.stderr)
        return EXIT_INVALID
    except S3CohomologyError as err:
        logger.error("%s aborted: %s", args.command, err)
        return EXIT_CHECK_FAILED

    if config.persist:
        persist(report, config)

    output = render(report, config.format)
    if config.out:
        with open(config.out, "w", encoding="utf-8") as handle:
            handle.write(output)
    else:
        sys.stdout.write(output)

    return EXIT_CHECK_FAILED if report.status == FAIL else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
