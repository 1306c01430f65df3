"""trainshim CLI: `trainshim [options] -- command args...`"""

from __future__ import annotations

import argparse
import sys

from .errors import ShimError
from .scrape import ScrapeConfig
from .wrapper import wrap_entrypoint


def parse_args(argv):
    parser = argparse.ArgumentParser(
        prog="trainshim",
        description="Run an experiment command with metric and manifest instrumentation.",
    )
    parser.add_argument("--workspace", default=".", help="workspace directory (default: cwd)")
    parser.add_argument(
        "--scrape",
        action="append",
        default=[],
        metavar="REGEX",
        help="stdout pattern with named groups (loss required; step, grad_norm optional); "
        "repeatable, first match wins",
    )
    parser.add_argument(
        "--scrape-split",
        default="train",
        choices=("train", "val"),
        help="split tag for scraped events",
    )
    parser.add_argument("command", nargs=argparse.REMAINDER,
                        help="-- followed by the command to wrap")
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv if argv is not None else sys.argv[1:])
    command = args.command
    if command and command[0] == "--":
        command = command[1:]
    if not command:
        print("trainshim: no command given (expected: trainshim [options] -- cmd ...)",
              file=sys.stderr)
        return 2
    config = None
    if args.scrape:
        config = ScrapeConfig.from_specs([(p, args.scrape_split) for p in args.scrape])
    try:
        status = wrap_entrypoint(command, args.workspace, scrape_config=config)
    except ShimError as exc:
        print(f"trainshim: {exc}", file=sys.stderr)
        return 2
    return status


if __name__ == "__main__":
    sys.exit(main())
