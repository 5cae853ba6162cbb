import argparse
import logging
import sys
from pathlib import Path

from core.cli_io import CONDITIONS, SYNTHESIS_KINDS, cmd_check, cmd_fixture, cmd_oracle, cmd_synthesize, cmd_validate, write_report
from core.config_manager import ConfigManager
from core.fixtures import FIXTURES
from core.oracle import KINDS as ORACLE_KINDS
from core.utils import Utils


def setup_global_exception_handler():
    """Setup global exception handler to log uncaught exceptions"""
    def global_exception_handler(exc_type, exc_value, exc_traceback):
        if issubclass(exc_type, KeyboardInterrupt):
            sys.__excepthook__(exc_type, exc_value, exc_traceback)
            return

        if issubclass(exc_type, RecursionError):
            logging.error("Recursion error detected. Application will exit.")
        else:
            logging.error(f"An unexpected error occurred: {exc_value}", exc_info=(exc_type, exc_value, exc_traceback))

    sys.excepthook = global_exception_handler


def _numbers(raw):
    value = Utils.parse_number(raw)
    return value if isinstance(value, list) else [value]


def _add_family_options(parser):
    parser.add_argument("family", nargs="?", help="Family JSON document")
    parser.add_argument("--random", metavar="N,M,D", help="Use a seeded random family instead of a file")
    parser.add_argument("--phi", help="Comparison function JSON document")
    parser.add_argument("--difference", action="store_true", help="Apply the condition to A - A")


def build_parser():
    parser = argparse.ArgumentParser(prog="lipcert", description="Certify compactness conditions of finite function families")
    parser.add_argument("--eps", type=float, help="Oscillation bound (default from configuration)")
    parser.add_argument("--seed", type=int, help="Seed for random instances")
    parser.add_argument("--tol", type=float, help="Absolute comparison tolerance")
    parser.add_argument("--out", help="Write the report here instead of printing it")
    parser.add_argument("--config", default="Default", help="Configuration name")
    parser.add_argument("--config-dir", help="Directory holding lipcert_config.json and configurations/")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    validate = commands.add_parser("validate", help="Validate a space, comparison function or family document")
    validate.add_argument("input")

    check = commands.add_parser("check", help="Check one condition")
    check.add_argument("condition", choices=CONDITIONS)
    _add_family_options(check)
    check.add_argument("--cover", help="Cover JSON document")
    check.add_argument("--witness", help="Lambda witness JSON document")
    check.add_argument("--delta", type=float)
    check.add_argument("--n", type=float, help="Outer tube index")
    check.add_argument("--Y", type=_numbers, help="Comma-separated point subset")

    synthesize = commands.add_parser("synthesize", help="Build a cover or witness and re-check it")
    synthesize.add_argument("kind", choices=SYNTHESIS_KINDS)
    _add_family_options(synthesize)
    synthesize.add_argument("--cover", help="Input cover JSON document")
    synthesize.add_argument("--witness", help="Input lambda witness JSON document")
    synthesize.add_argument("--delta", type=float)
    synthesize.add_argument("--n", type=float, help="Outer tube index")
    synthesize.add_argument("--Y", type=_numbers, help="Comma-separated point subset")
    synthesize.add_argument("--net", type=_numbers, help="Comma-separated member indices of a net")
    synthesize.add_argument("--net-budget", type=int, help="Largest acceptable net size")
    synthesize.add_argument("--artifact", help="Write the synthesized cover or witness here")

    oracle = commands.add_parser("oracle", help="Exact covering profile and minimal oscillation")
    oracle.add_argument("space", nargs="?", help="Space JSON document")
    oracle.add_argument("--family", help="Family JSON document")
    oracle.add_argument("--random", metavar="N,M,D")
    oracle.add_argument("--phi")
    oracle.add_argument("--difference", action="store_true")
    oracle.add_argument("--eps-grid", type=_numbers, help="Comma-separated radii")
    oracle.add_argument("--kind", choices=ORACLE_KINDS)
    oracle.add_argument("--parts", type=int, default=1)
    oracle.add_argument("--xlsx", help="Also write the profile as a workbook")

    fixture = commands.add_parser("fixture", help="Build and verify a named fixture")
    fixture.add_argument("name", help=f"One of {', '.join(sorted(FIXTURES))}")
    fixture.add_argument("params", nargs="*", help="key=value parameters")
    fixture.add_argument("--artifact", help="Write the fixture document here")
    fixture.add_argument("--xlsx", help="Also write the claim table as a workbook")
    return parser


def load_settings(args):
    """Configuration profile with explicit command-line overrides applied"""
    base_dir = Path(args.config_dir) if args.config_dir else Path.cwd()
    settings = ConfigManager(base_dir).load_config(args.config)
    if args.tol is not None:
        settings["tolerance"] = args.tol
    if args.seed is not None:
        settings["seed"] = args.seed
    if args.eps is not None:
        settings["default_eps"] = args.eps
    return settings


def run(args, settings):
    if args.command == "validate":
        return cmd_validate(args.input, settings, out=args.out)
    if args.command == "check":
        return cmd_check(args.condition, settings, family=args.family, random_spec=args.random, cover=args.cover,
                         phi=args.phi, witness=args.witness, eps=args.eps, delta=args.delta, n=args.n, Y=args.Y,
                         difference=args.difference, out=args.out)
    if args.command == "synthesize":
        return cmd_synthesize(args.kind, settings, family=args.family, random_spec=args.random, cover=args.cover,
                              phi=args.phi, witness=args.witness, eps=args.eps, delta=args.delta, n=args.n,
                              Y=args.Y, net=args.net, net_budget=args.net_budget, artifact=args.artifact,
                              out=args.out)
    if args.command == "oracle":
        return cmd_oracle(settings, space=args.space, family=args.family, random_spec=args.random, phi=args.phi,
                          eps_grid=args.eps_grid, kind=args.kind, parts=args.parts, difference=args.difference,
                          xlsx=args.xlsx, out=args.out)
    return cmd_fixture(args.name, settings, Utils.parse_params(args.params), xlsx=args.xlsx,
                       artifact=args.artifact, out=args.out)


def main(argv=None):
    """Command-line entry point; returns the exit code"""
    args = build_parser().parse_args(argv)
    settings = load_settings(args)

    level = logging.DEBUG if args.verbose else getattr(logging, str(settings.get("log_level", "INFO")).upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format='%(asctime)s [%(levelname)s] %(message)s',
        handlers=[logging.StreamHandler()]
    )

    setup_global_exception_handler()

    code, report = run(args, settings)
    write_report(report, args.out, int(settings.get("report", {}).get("indent", 2)))
    return code


if __name__ == "__main__":
    sys.exit(main())
