import argparse
import logging
import sys
from typing import Dict, List, Optional

from pydantic import ValidationError

from core.config import LOG_LEVEL
from core.hyp2var import Hyp2Kind
from cli.handlers import CommandHandlers
from cli.models import Command, Domain, OutputFormat, RunConfig, Suite, UsageError
from utils.validators import Validator

logger = logging.getLogger(__name__)

GLOBAL_KEYS = ("format", "output", "tol")

# Flags of deriv/fracderiv; their values stay decimal text until the argument models parse them
GRID_FLAGS = ("x0", "x1", "nx", "y0", "y1", "ny", "delta", "alpha", "beta", "gamma", "delta-exp",
              "m", "l", "k", "n", "n-nodes")
FRAC_FLAGS = ("mu", "nu", "kappa")


class ArgumentParser(argparse.ArgumentParser):
    """argparse reporting errors as UsageError instead of exiting"""

    def error(self, message):
        raise UsageError(message)


def _add_global_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="plain key=value file; flags override its values")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat])
    parser.add_argument("--output", help="report path (default: stdout)")
    parser.add_argument("--tol", help="relative series tolerance")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="orthoderiv",
                            description="Two-dimensional orthogonal and fractional derivatives")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    sub = commands.add_parser(Command.EVAL.value, help="evaluate a two-variable hypergeometric function")
    sub.add_argument("kind", choices=[k.value for k in Hyp2Kind])
    sub.add_argument("assignments", nargs="*", metavar="key=value")
    _add_global_flags(sub)

    sub = commands.add_parser(Command.KERNEL.value, help="closed-form kernel I_r(s, t)")
    sub.add_argument("--from-deriv", action="store_true",
                     help="parameters are alpha, beta, gamma, k, n, mu, nu instead of a..e")
    sub.add_argument("--oracle", action="store_true", help="recompute by quadrature")
    sub.add_argument("--strict", action="store_true", help="enforce the integral conditions")
    sub.add_argument("--oracle-nodes")
    sub.add_argument("assignments", nargs="*", metavar="key=value")
    _add_global_flags(sub)

    for command, fractional in ((Command.DERIV, False), (Command.FRACDERIV, True)):
        sub = commands.add_parser(command.value, help=f"{command.value} over an (x, y) grid")
        sub.add_argument("--domain", choices=[d.value for d in Domain])
        sub.add_argument("--f", help="registry name (polynomial, exp, exp-decay, trig) or expression")
        for flag in GRID_FLAGS + (FRAC_FLAGS if fractional else ()):
            sub.add_argument(f"--{flag}")
        if fractional:
            sub.add_argument("--method", choices=["kernel", "weyl"])
            sub.add_argument("--source", choices=["closed", "oracle"])
        _add_global_flags(sub)

    sub = commands.add_parser(Command.VERIFY.value, help="run verification suites")
    sub.add_argument("--suite", choices=[s.value for s in Suite])
    sub.add_argument("--samples")
    sub.add_argument("--seed")
    _add_global_flags(sub)
    return parser


def load_config_file(path: str) -> Dict[str, str]:
    try:
        with open(path, encoding="utf-8") as handle:
            values, malformed = Validator.parse_config_lines(handle)
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    if malformed:
        raise UsageError(f"malformed lines in {path}: {malformed}")
    return values


def make_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge the config file and the flags (flags win) into a RunConfig"""
    merged = load_config_file(args.config) if args.config else {}
    namespace = {key: value for key, value in vars(args).items()
                 if key not in ("command", "config", "assignments") and value is not None}
    for flag in ("from_deriv", "oracle", "strict"):
        if namespace.get(flag) is False:
            del namespace[flag]
        elif flag in namespace:
            namespace[flag] = "true"
    merged.update(namespace)

    if getattr(args, "assignments", None):
        assigned, invalid = Validator.parse_assignments(args.assignments)
        if invalid:
            raise UsageError(f"expected key=value with a decimal value, got {invalid}")
        merged.update(assigned)

    settings = {key: merged.pop(key) for key in GLOBAL_KEYS if key in merged}
    return RunConfig(command=args.command, parameters=merged, **settings)


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command; returns the exit code"""
    logging.basicConfig(
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        level=getattr(logging, LOG_LEVEL.upper(), logging.INFO),
        stream=sys.stderr,
    )
    try:
        config = make_run_config(build_parser().parse_args(argv))
    except UsageError as exc:
        logger.error(f"usage: {exc}")
        return UsageError.exit_code
    except ValidationError as exc:
        logger.error(f"invalid configuration: {exc}")
        return UsageError.exit_code
    logger.debug(f"running {config.command.value} with {config.parameters}")
    return CommandHandlers().run(config)


if __name__ == "__main__":
    sys.exit(main())
