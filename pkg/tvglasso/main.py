"""
Command-line entry point.

Dispatches to the registered commands and maps failures to exit codes:
0 success, 2 configuration, 3 numerical, 4 I/O.
"""

import sys
import time
from typing import List, Optional

from pydantic import ValidationError

from tvglasso.cli import build_parser
from tvglasso.core.config import settings
from tvglasso.core.exceptions import TvglassoError
from tvglasso.core.logging import configure_logging, get_logger
from tvglasso.utils.metrics import command_duration_seconds, command_failures_total, write_metrics

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def exit_code_for(exc: BaseException) -> int:
    """Exit code reported for an exception escaping a command"""
    if isinstance(exc, TvglassoError):
        return exc.exit_code
    if isinstance(exc, OSError):
        return EXIT_IO
    if isinstance(exc, (ValidationError, ValueError)):
        return EXIT_CONFIG
    return 1


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run one command and return its exit code.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        Process exit code
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.log_level:
        configure_logging(args.log_level)

    command = args.command if args.command != "devlab" else f"devlab.{args.experiment}"
    logger.info("command_started", command=command, version=settings.VERSION)
    start_time = time.perf_counter()
    code = EXIT_OK
    try:
        code = args.handler(args)
    except Exception as e:
        code = exit_code_for(e)
        command_failures_total.labels(command=command, error_type=type(e).__name__).inc()
        logger.error(
            "command_failed",
            command=command,
            error=str(e),
            exc_type=type(e).__name__,
            exit_code=code,
            exc_info=settings.DEBUG,
        )
        if code == 1:
            raise
    finally:
        duration = time.perf_counter() - start_time
        command_duration_seconds.labels(command=command).observe(duration)
        if args.metrics_file:
            write_metrics(args.metrics_file)

    logger.info(
        "command_finished",
        command=command,
        exit_code=code,
        duration_ms=round(duration * 1000, 2),
    )
    return code


if __name__ == "__main__":
    sys.exit(main())
