from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from .commands import COMMANDS
from .commands.common import EXIT_ERROR, EXIT_NOT_CONVERGED, write_run_record
from .config import RunConfig, get_settings, resolve_run_config
from .errors import NumericError, TopoError

logger = logging.getLogger("backend.app")

_NOT_CONFIG = {"command", "config_path", "verbose"}


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(prog="toposimp", description=settings.app_name)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMANDS.values():
        module.register(subparsers)
    return parser


def configure_logging(verbose: bool = False) -> None:
    level = logging.DEBUG if verbose else getattr(logging, get_settings().log_level.upper(), logging.INFO)
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    overrides = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}

    cfg: Optional[RunConfig] = None
    try:
        cfg = resolve_run_config(args.command, args.config_path, overrides)
        return COMMANDS[args.command].run(cfg)
    except NumericError as exc:
        code, message = EXIT_NOT_CONVERGED, str(exc)
    except (TopoError, OSError) as exc:
        code, message = EXIT_ERROR, str(exc)
    except ValidationError as exc:
        fields = ", ".join(".".join(str(p) for p in e["loc"]) or "config" for e in exc.errors())
        code, message = EXIT_ERROR, f"invalid value for {fields}: {exc.errors()[0]['msg']}"

    logger.error("[%s] %s", args.command, message)
    if cfg is not None:
        try:
            write_run_record(cfg, code, notes=[message])
        except OSError:
            pass
    return code


if __name__ == "__main__":
    sys.exit(main())
