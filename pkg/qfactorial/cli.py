"""Command-line entry point: one subcommand per operation, JSON report on stdout."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import List, Optional

from qfactorial.commands import algebra, conditions, families, incidence, witness
from qfactorial.commands.common import CommandContext
from qfactorial.core.errors import QFactorialError
from qfactorial.core.settings import get_settings

logger = logging.getLogger(__name__)


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="seed for projections and random families")
    common.add_argument("--prime", type=int, help="work over F_p instead of Q")
    common.add_argument("--budget", type=int, help="override the search and scan budgets")
    common.add_argument("--workers", type=int, help="threads for per-point solves and scans")
    common.add_argument("--verbose", "-v", action="count", default=0)
    return common


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(prog=settings.title, description=settings.description)
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.version}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    parents = [_common_parser()]
    for module in (algebra, conditions, incidence, families, witness):
        module.register(subparsers, parents)
    return parser


def _configure_logging(verbose: int) -> None:
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = getattr(logging, get_settings().log_level.upper(), logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    _configure_logging(args.verbose)
    try:
        ctx = CommandContext.from_args(args)
        result = args.handler(ctx, args)
        report = ctx.report(args, result)
    except QFactorialError as exc:
        logger.debug("%s failed", args.command, exc_info=True)
        print(json.dumps(exc.payload(), sort_keys=True), file=sys.stderr)
        return exc.exit_status

    print(json.dumps(report.model_dump(), sort_keys=True, indent=2))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover - convenience execution path
    main()
