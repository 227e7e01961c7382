"""
Command aggregation.
"""

import argparse

from tvglasso.cli import devlab, estimate, path, simulate, track
from tvglasso.core.config import settings


def build_parser() -> argparse.ArgumentParser:
    """Root parser with every command registered"""
    parser = argparse.ArgumentParser(
        prog=settings.PROJECT_NAME,
        description="Time-varying sparse Gaussian graphical models",
    )
    parser.add_argument("--version", action="version", version=settings.VERSION)
    parser.add_argument("--log-level", default=None, help="Override LOG_LEVEL")
    parser.add_argument(
        "--metrics-file", default=None, help="Write Prometheus metrics to this file on exit"
    )

    # Include sub-commands
    subparsers = parser.add_subparsers(dest="command", required=True)
    simulate.register(subparsers)
    estimate.register(subparsers)
    path.register(subparsers)
    track.register(subparsers)
    devlab.register(subparsers)
    return parser
