"""Main application entry point"""
import argparse
import logging
import sys
from typing import Callable, Dict, Optional, Sequence

from pydantic import BaseModel, ValidationError

from src.cli.commands import cmd_ek, cmd_galois, cmd_lvalue, cmd_period, cmd_verify, write_report
from src.config.logging_config import setup_logging
from src.config.settings import settings
from src.core.exceptions import CMPeriodsError
from src.jobs import JobConfig, SelfTestJob, run_job
from src.models.reports import ErrorDetail, ErrorReport
from src.repositories.setting_repository import setting_repository

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_LIBRARY_ERROR = 2
EXIT_SELFTEST_FAILED = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cmperiods",
        description="CM-type combinatorics, Eisenstein-Kronecker series and Hecke L-values",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=None,
                        help=f"Working precision in bits (default {settings.precision.default_bits}).")
    common.add_argument("--json", type=str, default=None, help="Also write the report to this path.")

    galois_parser = subparsers.add_parser("galois", help="CM-types, reflex fields and signs.")
    galois_sub = galois_parser.add_subparsers(dest="galois_command", required=True)
    for name, help_text in (
        ("reflex", "Reflex field and type of a CM-type."),
        ("sign", "The sign of a CM-type at (eta, tau)."),
        ("critical", "Critical decomposition of an infinity type."),
        ("demo", "Everything the setting offers, field by field."),
    ):
        sub = galois_sub.add_parser(name, help=help_text, parents=[common])
        sub.add_argument("--setting", type=str, default="zeta5",
                         help=f"Built-in setting ({', '.join(setting_repository.names())}) or a setting file.")
        if name != "demo":
            sub.add_argument("--field", type=str, default=None, help="Registered field (default: top field).")
        if name in ("reflex", "sign"):
            sub.add_argument("--type", type=str, required=True, help="CM-type, e.g. e1,e2.")
        if name == "sign":
            sub.add_argument("--tau", type=str, required=True, help="Galois element.")
            sub.add_argument("--eta", type=str, default="1", help="Embedding of the reflex field.")
        if name == "critical":
            sub.add_argument("--mu", type=str, required=True, help="Infinity type, e.g. 2c-3.")

    ek_parser = subparsers.add_parser("ek", help="Eisenstein-Kronecker series.", parents=[common])
    ek_parser.add_argument("--lattice", type=str, default="Z[i]", help="Z[i], O, an ideal or basis:w1,w2.")
    ek_parser.add_argument("--field", type=str, default=None, help="Field of an ideal lattice.")
    ek_parser.add_argument("--b", type=int, required=True, help="Exponent of conj(lambda).")
    ek_parser.add_argument("--a", type=int, required=True, help="Exponent of lambda in the denominator.")
    ek_parser.add_argument("--t", type=str, default=None, help="Translate.")
    ek_parser.add_argument("--s", type=str, default="0", help="Evaluation point.")
    ek_parser.add_argument("--gamma", type=int, default=1, help="Order of the unit group acting on L + t.")
    ek_parser.add_argument("--method", choices=("continued", "direct"), default="continued")
    ek_parser.add_argument("--radius", type=float, default=None, help="Truncation radius of the direct sum.")

    lvalue_parser = subparsers.add_parser("lvalue", help="Partial and total Hecke L-values.", parents=[common])
    lvalue_parser.add_argument("--char", type=str, required=True, help="Character spec string.")
    lvalue_parser.add_argument("--s", type=str, default="0", help="Evaluation point.")
    lvalue_parser.add_argument("--method", choices=("eseries", "dirichlet"), default="eseries")
    lvalue_parser.add_argument("--nmax", type=int, default=None, help="Norm bound of the Dirichlet sum.")

    period_parser = subparsers.add_parser("period", help="CM period of a class number one field.", parents=[common])
    period_parser.add_argument("--field", type=str, default="Q(i)", help="Field such as Q(sqrt-7).")

    verify_parser = subparsers.add_parser("verify", help="Algebraicity of the Deligne ratio.", parents=[common])
    verify_parser.add_argument("--char", type=str, required=True, help="Character spec string.")
    verify_parser.add_argument("--maxdeg", type=int, default=None, help="Largest polynomial degree searched.")
    verify_parser.add_argument("--omega-scale", dest="omega_scale", type=str, default=None,
                               help="Replace Omega by this multiple of it.")

    selftest_parser = subparsers.add_parser("selftest", help="Run the acceptance battery.", parents=[common])
    selftest_parser.add_argument("--filter", type=str, default=None, help="Only run one module's checks.")
    selftest_parser.add_argument("--verify-prec", type=int, default=256, help="Precision of the ratio checks.")
    selftest_parser.add_argument("--nmax", type=int, default=None, help="Norm bound of the Dirichlet oracle.")
    return parser


class Application:
    """Command dispatcher: runs one command and turns its outcome into output and an exit code."""

    def __init__(self):
        self._commands: Dict[str, Callable[[argparse.Namespace], BaseModel]] = {
            "galois": cmd_galois,
            "ek": cmd_ek,
            "lvalue": cmd_lvalue,
            "period": cmd_period,
            "verify": cmd_verify,
        }

    def emit(self, report: BaseModel, path: Optional[str] = None) -> None:
        sys.stdout.write(report.model_dump_json(indent=2) + "\n")
        if path:
            write_report(report, path)

    def fail(self, detail: ErrorDetail) -> int:
        self.emit(ErrorReport(error=detail))
        return EXIT_LIBRARY_ERROR

    def selftest(self, args: argparse.Namespace) -> int:
        config = JobConfig(
            module_filter=args.filter,
            precision=args.prec or settings.precision.default_bits,
            verify_precision=args.verify_prec,
            dirichlet_nmax=args.nmax or settings.lvalue.dirichlet_nmax,
        )
        summary = run_job(SelfTestJob, config)
        self.emit(summary, args.json)
        return EXIT_OK if summary.ok else EXIT_SELFTEST_FAILED

    def run(self, args: argparse.Namespace) -> int:
        logger.info("=" * 60)
        logger.info(f"cmperiods {args.command}")
        logger.info(f"Precision: {args.prec or settings.precision.default_bits} bits")
        logger.info("=" * 60)

        try:
            if args.command == "selftest":
                return self.selftest(args)
            report = self._commands[args.command](args)
            self.emit(report, args.json)
            return EXIT_OK

        except CMPeriodsError as e:
            logger.error(f"{args.command} failed: {e.code}: {e.message}")
            return self.fail(ErrorDetail(**e.to_dict()))

        except ValidationError as e:
            first = e.errors()[0]
            message = f"{'.'.join(str(p) for p in first['loc'])}: {first['msg']}"
            logger.error(f"Invalid configuration: {message}")
            return self.fail(ErrorDetail(code="spec_parse_error", message=message))

        except Exception as e:
            logger.error(f"Unexpected error: {e}", exc_info=True)
            return EXIT_UNEXPECTED


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Main entry point for the application.

    Steps:
    1. Setup logging
    2. Parse the command line
    3. Run the command and map its outcome to an exit code
    """
    setup_logging()
    args = build_parser().parse_args(argv)
    return Application().run(args)


if __name__ == "__main__":
    """
    Entry point when running as a script.

    Usage:
        python -m src.main selftest
        python -m src.main verify --char "hecke field=Q(i) f=(1+i)^3 a=4 b=0" --prec 256
    """
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        sys.exit(130)
