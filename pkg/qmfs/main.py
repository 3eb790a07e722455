import argparse
import logging
import sys
import traceback
from importlib import import_module
from typing import List, Optional

from qmfs import __version__
from qmfs.core.config import settings
from qmfs.core.errors import QmfsError

logger = logging.getLogger(__name__)

# Subcommand modules; each exposes register(subparsers)
COMMANDS = [
    "qmfs.commands.solve",
    "qmfs.commands.verify",
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmfs",
        description="Quaternionic method of fundamental solutions for chiral Maxwell problems",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="Overrides QMFS_LOG_LEVEL")
    parser.add_argument("--seed", type=int, default=None, help="Reserved; every pipeline is deterministic")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for module_path in COMMANDS:
        module = import_module(module_path)
        register = getattr(module, "register", None)
        if register is None:
            logger.warning("Module %s has no register function; skipping", module_path)
            continue
        register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    if args.seed is not None:
        logger.debug("seed=%d ignored", args.seed)

    try:
        return args.handler(args)
    except QmfsError as exc:
        logger.error("error=%s detail=%s", exc.name, exc)
        return 2
    except Exception as exc:
        logger.error("error=%s detail=%s", type(exc).__name__, exc)
        logger.error(traceback.format_exc())
        return 1


if __name__ == "__main__":
    sys.exit(main())
